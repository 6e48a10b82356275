"""Finite-size diffraction of the weighted comb on the two-tile point set.

The l-th approximant density at wave vector k is

    nu_l(k) = (1/l) |sum_{n=1}^{l} w(n) exp(-i k f(n))|^2 ,

with all weights equal to one unless stated otherwise.  Scaling of nu_l with
l separates the spectrum: growth like l is a Bragg peak, growth like l^alpha
with alpha in (-1,1) is the singular-continuous signature, and decay like
1/l is the generic (extinct) case.

Sign-sequence exponential sums S_l(x) = sum_{j<l} eta_j exp(-2 pi i j x) are
handled separately: at l = 2^n they collapse to the classical product

    |S_{2^n}(x)|^2 = 2^{2n} prod_{j<n} sin^2(pi 2^j x),

which is used both as a fast evaluator and as a structural identity under
test.  Fourier coefficients c_m of the tile-modulation phase and their
even/odd partial sums kappa, kappa_eta decide Bragg extinction.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .tmcore import QuasicrystalParams, sign_array, tm_sign

__all__ = [
    "ApproximantValue",
    "FourierCoefficients",
    "AlphaFit",
    "ExtinctionError",
    "fourier_sum",
    "approximant_density",
    "density_at_sizes",
    "eta_sum",
    "eta_sums_at_sizes",
    "riesz_product",
    "coefficient_cm",
    "kappa_pair",
    "kappa_eta_closed",
    "kappa_closed",
    "is_bragg",
    "scaling_exponent_alpha",
    "fitted_alpha",
]


class ExtinctionError(ValueError):
    """A sampled approximant density vanished along the requested sizes."""


# ---------------------------------------------------------------------------
# truncated Fourier sums of the weighted comb
# ---------------------------------------------------------------------------

def _weight_at(weights, n: int) -> complex:
    if weights is None:
        return 1.0
    if callable(weights):
        return weights(n)
    return weights[n - 1]


def fourier_sum(l: int, k: float, params: QuasicrystalParams, weights=None) -> complex:
    """sum_{n=1}^{l} w(n) exp(-i k f(n)) with Kahan-compensated accumulation.

    Reference scalar path; use `density_at_sizes` for large scans.  `weights`
    is None (all ones), a sequence indexed by n-1, or a callable of n.
    """
    if l < 0:
        raise ValueError("l must be >= 0")
    half_sum = float(params.alpha1)
    half_diff = float((params.a - params.b) / 2)
    sr = si = cr = ci = 0.0  # sums and compensations, real/imag
    for n in range(1, l + 1):
        f = n * half_sum
        if n % 2 == 1:
            f += half_diff * tm_sign(n - 1)
        z = _weight_at(weights, n) * cmath.exp(-1j * k * f)
        y = z.real - cr
        t = sr + y
        cr = (t - sr) - y
        sr = t
        y = z.imag - ci
        t = si + y
        ci = (t - si) - y
        si = t
    return complex(sr, si)


@dataclass(frozen=True)
class ApproximantValue:
    """nu_l(k): the l-th approximant density at wave vector k."""

    l: int
    k: float
    density: float

    def __post_init__(self) -> None:
        if self.density < 0:
            raise ValueError("densities are nonnegative by construction")


def approximant_density(l: int, k: float, params: QuasicrystalParams, weights=None) -> float:
    """(1/l) |fourier_sum|^2."""
    if l < 1:
        raise ValueError("l must be >= 1")
    return abs(fourier_sum(l, k, params, weights)) ** 2 / l


def density_at_sizes(
    k: float,
    sizes: Sequence[int],
    params: QuasicrystalParams,
    weights: np.ndarray | None = None,
    chunk: int = 1 << 20,
) -> np.ndarray:
    """Approximant densities at several truncation sizes in one cumulative
    pass over n (vectorized, chunked).  `weights`, when given, is an array
    indexed by n-1 covering max(sizes)."""
    caller_sizes = [int(s) for s in sizes]
    if not caller_sizes:
        return np.zeros(0)
    sorted_idx = np.argsort(caller_sizes, kind="stable")
    sizes_arr = np.asarray(caller_sizes, dtype=np.int64)[sorted_idx]
    if sizes_arr[0] < 1:
        raise ValueError("sizes must be >= 1")
    l_max = int(sizes_arr[-1])
    half_sum = float(params.alpha1)
    half_diff = float((params.a - params.b) / 2)
    out = np.empty(len(sizes_arr))
    total = 0.0 + 0.0j
    pos = 0
    for lo in range(1, l_max + 1, chunk):
        hi = min(lo + chunk, l_max + 1)
        n = np.arange(lo, hi, dtype=np.float64)
        f = n * half_sum
        odd = np.arange(lo, hi) % 2 == 1
        eta_prev = sign_array(lo - 1, hi - 1)
        f[odd] += half_diff * eta_prev[odd]
        ph = np.exp(-1j * k * f)
        if weights is not None:
            ph *= np.asarray(weights[lo - 1 : hi - 1])
        cs = np.cumsum(ph)
        while pos < len(sizes_arr) and sizes_arr[pos] < hi:
            s = int(sizes_arr[pos])
            out[pos] = abs(total + cs[s - lo]) ** 2 / s
            pos += 1
        total += cs[-1]
    result = np.empty(len(out))
    result[sorted_idx] = out
    return result


# ---------------------------------------------------------------------------
# sign-sequence exponential sums
# ---------------------------------------------------------------------------

def eta_sum(l: int, x: float) -> complex:
    """S_l(x) = sum_{j=0}^{l-1} eta_j exp(-2 pi i j x), direct evaluation."""
    if l < 0:
        raise ValueError("l must be >= 0")
    acc = 0.0 + 0.0j
    for j in range(l):
        acc += tm_sign(j) * cmath.exp(-2j * math.pi * j * x)
    return acc


def eta_sums_at_sizes(x: float, sizes: Sequence[int], chunk: int = 1 << 20) -> np.ndarray:
    """|S_l(x)|^2 / l at several sizes l, one vectorized cumulative pass."""
    sizes_sorted = sorted(int(s) for s in sizes)
    if not sizes_sorted:
        return np.zeros(0)
    if sizes_sorted[0] < 1:
        raise ValueError("sizes must be >= 1")
    l_max = sizes_sorted[-1]
    vals = {}
    total = 0.0 + 0.0j
    pending = list(sizes_sorted)
    for lo in range(0, l_max, chunk):
        hi = min(lo + chunk, l_max)
        j = np.arange(lo, hi, dtype=np.float64)
        ph = sign_array(lo, hi) * np.exp(-2j * math.pi * x * j)
        cs = np.cumsum(ph)
        while pending and pending[0] <= hi:
            s = pending.pop(0)
            vals[s] = abs(total + cs[s - 1 - lo]) ** 2 / s
        total += cs[-1]
    return np.array([vals[int(s)] for s in sizes])


def _dyadic_fracs(x, n: int) -> list:
    """frac(2^j x) for j = 0..n-1; exact when x is a Fraction."""
    out = []
    if isinstance(x, Fraction):
        cur = x - math.floor(x)
        for _ in range(n):
            out.append(cur)
            cur = 2 * cur
            if cur >= 1:
                cur -= 1
        return out
    cur = math.fmod(float(x), 1.0)
    if cur < 0:
        cur += 1.0
    for _ in range(n):
        out.append(cur)
        cur = math.fmod(2.0 * cur, 1.0)
    return out


def riesz_product(n: int, x) -> float:
    """2^{2n} prod_{j<n} sin^2(pi 2^j x); equals |S_{2^n}(x)|^2.

    Accepts float or Fraction x; with a Fraction the dyadic orbit is exact,
    so vanishing factors (dyadic x) give an exact zero.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    value = 1.0
    for frac in _dyadic_fracs(x, n):
        s = math.sin(math.pi * float(frac))
        if isinstance(frac, Fraction) and frac == 0:
            return 0.0
        value *= 4.0 * s * s
    return value


def scaling_exponent_alpha(l: int, x) -> float:
    """Finite-size exponent alpha_l(x) defined by l^{alpha_l} = |S_l(x)|^2/l.

    Returns -inf (the explicit extinction marker) when the sum vanishes.
    Powers of two go through the product form in log space, so l may be
    astronomically large; other l are evaluated directly.
    """
    if l < 2:
        raise ValueError("l must be >= 2")
    n = l.bit_length() - 1
    if l == 1 << n:
        log_sq = 2.0 * n * math.log(2.0)  # log 2^{2n}
        for frac in _dyadic_fracs(x, n):
            s = abs(math.sin(math.pi * float(frac)))
            if s == 0.0:
                return -math.inf
            log_sq += 2.0 * math.log(s)
        return (log_sq - n * math.log(2.0)) / (n * math.log(2.0))
    if l > 4096:
        sq = float(eta_sums_at_sizes(float(x), [l])[0]) * l
    else:
        sq = abs(eta_sum(l, float(x))) ** 2
    if sq == 0.0:
        return -math.inf
    return math.log(sq / l) / math.log(l)


# ---------------------------------------------------------------------------
# Fourier coefficients of the tile-modulation phase
# ---------------------------------------------------------------------------

def _sinc(x: float) -> float:
    """sin(x)/x with the removable singularity filled in."""
    if abs(x) < 1e-8:
        return 1.0 - x * x / 6.0
    return math.sin(x) / x


def coefficient_cm(m: int, k: float, params: QuasicrystalParams) -> complex:
    """c_m(k) = (-1)^m exp(-i k a2/2) sinc(a2 k/2 + m pi), the m-th Fourier
    coefficient of x -> exp(-i k a2 frac(x)) with a2 = 2(a-b)."""
    a2 = float(params.alpha2)
    sign = -1.0 if m % 2 else 1.0
    return sign * cmath.exp(-0.5j * k * a2) * _sinc(0.5 * a2 * k + m * math.pi)


def kappa_closed(k: float, params: QuasicrystalParams) -> complex:
    """Even-index coefficient sum: the Fourier series evaluated at x = 0 and
    x = 1/2 (midpoint regularization at the jump), averaged."""
    theta = float(params.alpha2) * k
    base = (1.0 + cmath.exp(-1j * theta)) / 2.0
    mid = cmath.exp(-0.5j * theta)
    return (base + mid) / 2.0


def kappa_eta_closed(k: float, params: QuasicrystalParams) -> complex:
    """Odd-index coefficient sum; vanishes exactly when k (a-b) is a multiple
    of 2 pi (the Bragg-extinction locus)."""
    theta = float(params.alpha2) * k
    base = (1.0 + cmath.exp(-1j * theta)) / 2.0
    mid = cmath.exp(-0.5j * theta)
    return (base - mid) / 2.0


@dataclass(frozen=True)
class FourierCoefficients:
    """Even/odd coefficient sums at one wave vector.

    kappa/kappa_eta are the closed forms; the partial fields are symmetric
    truncations over |m| <= m_max, kept for convergence control.
    """

    k: float
    m_max: int
    kappa: complex
    kappa_eta: complex
    kappa_partial: complex
    kappa_eta_partial: complex
    converged: bool


def _partial_kappa_sums(k: float, params: QuasicrystalParams, m_max: int) -> tuple:
    a2 = float(params.alpha2)
    m = np.arange(-m_max, m_max + 1)
    x = 0.5 * a2 * k + m * math.pi
    sc = np.where(np.abs(x) < 1e-12, 1.0, np.sin(x) / np.where(x == 0, 1.0, x))
    vals = np.where(m % 2 == 0, 1.0, -1.0) * sc * cmath.exp(-0.5j * a2 * k)
    even = m % 2 == 0
    return complex(vals[even].sum()), complex(vals[~even].sum())


def kappa_pair(
    k: float,
    params: QuasicrystalParams,
    m_max: int = 100_000,
    tol: float = 1e-6,
) -> FourierCoefficients:
    """Closed forms plus symmetric partial sums over |m| <= m_max.

    Convergence is flagged by comparing the truncations at m_max and 2 m_max;
    the symmetric tails cancel in pairs, giving an O(1/m_max) approach.
    """
    if m_max < 1:
        raise ValueError("m_max must be >= 1")
    kp, ke = _partial_kappa_sums(k, params, m_max)
    kp2, ke2 = _partial_kappa_sums(k, params, 2 * m_max)
    converged = abs(kp - kp2) <= tol and abs(ke - ke2) <= tol
    return FourierCoefficients(
        k=k,
        m_max=m_max,
        kappa=kappa_closed(k, params),
        kappa_eta=kappa_eta_closed(k, params),
        kappa_partial=kp,
        kappa_eta_partial=ke,
        converged=converged,
    )


# ---------------------------------------------------------------------------
# Bragg membership and exponent fitting
# ---------------------------------------------------------------------------

def is_bragg(q: Fraction) -> bool:
    """True iff the reduced denominator of q is a power of two, i.e. the
    normalized wave vector sits in the periodized dyadic group."""
    d = Fraction(q).denominator
    return d & (d - 1) == 0


@dataclass(frozen=True)
class AlphaFit:
    """Least-squares exponent of nu_l against l on a log-log grid."""

    alpha: float
    residual: float          # rms residual of the fit in log nu
    sizes: tuple
    densities: tuple


def fitted_alpha(
    k: float,
    sizes: Sequence[int],
    params: QuasicrystalParams,
    weights: np.ndarray | None = None,
) -> AlphaFit:
    """Fit log nu_l(k) = alpha log l + c over the given sizes.

    Sizes should be (roughly) geometrically spaced; at least four are
    required.  A density indistinguishable from zero at any sampled size
    aborts the fit: the subsequence is extinct and the exponent undefined.
    """
    sizes = [int(s) for s in sizes]
    if len(sizes) < 4:
        raise ValueError("need at least four sizes for a stable fit")
    dens = density_at_sizes(k, sizes, params, weights=weights)
    # numerical zero: |sum|^2/l below the rounding floor of an l-term sum
    floor = np.array([(1e-12 * l) ** 2 / l for l in sizes])
    if np.any(dens <= floor):
        bad = int(np.argmax(dens <= floor))
        raise ExtinctionError(
            f"density at size {sizes[bad]} is numerically zero; "
            "the exponent is undefined along this subsequence"
        )
    ll = np.log(np.asarray(sizes, dtype=float))
    lv = np.log(dens)
    coeffs, res = np.polyfit(ll, lv, 1, full=True)[:2]
    rms = math.sqrt(res[0] / len(sizes)) if len(res) else 0.0
    return AlphaFit(float(coeffs[0]), rms, tuple(sizes), tuple(float(d) for d in dens))
