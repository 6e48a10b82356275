"""Arithmetic of p-rarefied partial sums of the sign sequence.

For an odd integer p >= 3 and residue i, S_{p,i}(n) is the sum of eta_m over
m < n with m = i (mod p).  The vector S(n) of all p residues obeys the exact
doubling relation S(2^s n) = M S(n), where s is the multiplicative order of 2
mod p and M is the p x p circulant matrix with entries S_{p,i-j}(2^s).  The
spectrum of M drives everything: the leading modulus lambda_1 gives the
growth exponent beta = log(lambda_1)/(s log 2), and continuous log-periodic
profiles psi_{p,j} interpolate S_{p,j}(n)/n^beta.

Two independent implementations of the sums are kept side by side: plain
summation (the oracle) and a binary digit recursion derived from
eta_{2m} = eta_m, eta_{2m+1} = -eta_m:

    S_{p,i}(2m) = S_{p, i/2 mod p}(m) - S_{p, (i-1)/2 mod p}(m)

with an additive boundary term eta_m at residue 2m mod p when the argument is
odd.  The recursion is exact integer arithmetic in O(p log n).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .tmcore import sign_array, tm_sign
from .quadfield import is_prime, order_of_two

__all__ = [
    "RarefiedVector",
    "TransferMatrix",
    "ScalingExponents",
    "FractalProfile",
    "NewmanReport",
    "PositivityReport",
    "GrabnerReport",
    "rarefied_sum",
    "rarefied_sum_direct",
    "rarefied_vector",
    "rarefied_series",
    "transfer_matrix",
    "cosets_of_two",
    "coset_eigenvalue",
    "residue_exponent",
    "eigenvalues_explicit",
    "scaling_exponents",
    "profile_period_factor",
    "profile_value",
    "fractal_profile",
    "coquet_decompose",
    "newman_check",
    "positivity_scan",
    "grabner_composite",
]

_LOG2 = math.log(2.0)


# ---------------------------------------------------------------------------
# rarefied sums
# ---------------------------------------------------------------------------

def _check_p(p: int) -> None:
    if p < 3 or p % 2 == 0:
        raise ValueError("p must be an odd integer >= 3")


def _svec(p: int, n: int) -> list:
    """Exact S_{p,*}(n) via the binary digit recursion, iterating over the
    bits of n from the most significant end.  Tracks eta of the current
    prefix m and the residue 2m mod p for the odd-bit boundary term."""
    if n == 0:
        return [0] * p
    inv2 = pow(2, -1, p)
    perm_num = [(i * inv2) % p for i in range(p)]
    perm_den = [((i - 1) * inv2) % p for i in range(p)]
    s = [0] * p
    m_mod = 0        # current prefix m modulo p
    eta_m = 1        # eta of the current prefix
    for bit in bin(n)[2:]:
        s = [s[perm_num[i]] - s[perm_den[i]] for i in range(p)]
        m_mod = (2 * m_mod) % p
        if bit == "1":
            s[m_mod] += eta_m
            m_mod = (m_mod + 1) % p
            eta_m = -eta_m
    return s


def rarefied_sum(p: int, i: int, n: int) -> int:
    """S_{p,i}(n), exact, via the digit recursion (O(p log n))."""
    _check_p(p)
    if not 0 <= i < p:
        raise ValueError("residue i must lie in [0, p)")
    if n < 0:
        raise ValueError("n must be >= 0")
    return _svec(p, n)[i]


def rarefied_sum_direct(p: int, i: int, n: int) -> int:
    """Oracle implementation: plain O(n/p) summation over the progression."""
    _check_p(p)
    if not 0 <= i < p:
        raise ValueError("residue i must lie in [0, p)")
    return sum(tm_sign(m) for m in range(i, n, p))


@dataclass(frozen=True)
class RarefiedVector:
    """The integer vector (S_{p,0}(n), ..., S_{p,p-1}(n))."""

    p: int
    n: int
    entries: tuple

    def __post_init__(self) -> None:
        # column sum equals the plain prefix sum of the sign sequence
        total = sum(self.entries)
        expected = 0 if self.n % 2 == 0 else tm_sign(self.n - 1)
        if total != expected:
            raise AssertionError("rarefied column sum violates the prefix-sum identity")

    def __getitem__(self, i: int) -> int:
        return self.entries[i]


def rarefied_vector(p: int, n: int) -> RarefiedVector:
    _check_p(p)
    if n < 0:
        raise ValueError("n must be >= 0")
    return RarefiedVector(p, n, tuple(_svec(p, n)))


def rarefied_series(p: int, i: int, n_max: int, chunk: int = 1 << 22) -> np.ndarray:
    """S_{p,i}(n) for n = 1..n_max as an int64 array (vectorized scan).

    Values are bounded by n_max, far inside int64 range.
    """
    _check_p(p)
    out = np.empty(n_max, dtype=np.int64)
    total = 0
    for start in range(0, n_max, chunk):
        stop = min(start + chunk, n_max)
        eta = sign_array(start, stop).astype(np.int64)
        idx = np.arange(start, stop)
        eta[idx % p != i] = 0
        np.cumsum(eta, out=eta)
        out[start:stop] = eta + total
        total = int(out[stop - 1])
    return out


# ---------------------------------------------------------------------------
# transfer matrix and its spectrum
# ---------------------------------------------------------------------------

def cosets_of_two(p: int) -> list:
    """Cosets of the subgroup <2> inside (Z/pZ)*, smallest representative first."""
    if p == 2 or not is_prime(p):
        raise ValueError("p must be an odd prime")
    sub = []
    x = 1
    while True:
        sub.append(x)
        x = (2 * x) % p
        if x == 1:
            break
    seen = set()
    cosets = []
    for a in range(1, p):
        if a in seen:
            continue
        cs = sorted((a * w) % p for w in sub)
        seen.update(cs)
        cosets.append(tuple(cs))
    return cosets


def coset_eigenvalue(p: int, t: int) -> complex:
    """Circulant eigenvalue at character t: prod over w in t<2> of (1 - zeta^w),
    zeta = exp(-2 pi i / p).  Its modulus equals |xi| of the matching coset."""
    if t % p == 0:
        raise ValueError("t must be nonzero mod p")
    s = order_of_two(p)
    zeta = cmath.exp(-2j * math.pi / p)
    w = t % p
    mu = 1.0 + 0j
    for _ in range(s):
        mu *= 1.0 - zeta**w
        w = (2 * w) % p
    return mu


def residue_exponent(p: int, t: int) -> float:
    """Growth exponent of the sign-sequence exponential sum at frequency t/p:
    log|mu_t| / (s log 2).  It is constant on cosets of <2>, so for primes
    with two cosets the exponent genuinely depends on the residue t: only
    the coset carrying lambda_1 grows at the headline rate."""
    s = order_of_two(p)
    return math.log(abs(coset_eigenvalue(p, t))) / (s * _LOG2)


def eigenvalues_explicit(p: int) -> list:
    """One eigenvalue xi_a = (-2i)^s * prod_{j in a<2>} sin(2 pi j / p) per
    coset, sorted by modulus descending.  Their product equals p."""
    s = order_of_two(p)
    out = []
    for cs in cosets_of_two(p):
        prod = 1.0
        for j in cs:
            prod *= math.sin(2.0 * math.pi * j / p)
        out.append((-2j) ** s * prod)
    out.sort(key=abs, reverse=True)
    return out


@dataclass(frozen=True)
class ScalingExponents:
    """beta from lambda_1; beta1 from the two-case lambda_2 rule.

    The rule has a gap at lambda_2 = 1; in that boundary band beta1 is None
    and `lambda2_boundary` is set instead of silently picking a branch.
    """

    beta: float
    beta1: float | None
    lambda1: float
    lambda2: float
    lambda2_boundary: bool = False


@dataclass(frozen=True)
class TransferMatrix:
    """The circulant p x p integer matrix M with M[i][j] = S_{p,i-j}(2^s)."""

    p: int
    s: int
    entries: tuple              # row tuples, exact integers
    eigenvalues: tuple          # explicit coset eigenvalues, |.| descending
    exponents: ScalingExponents

    def column(self) -> tuple:
        """First column (S_{p,0}(2^s), ..., S_{p,p-1}(2^s))."""
        return tuple(row[0] for row in self.entries)

    def apply(self, vec: Sequence[int]) -> list:
        return [sum(row[j] * vec[j] for j in range(self.p)) for row in self.entries]

    def eigenvalue_moduli_with_multiplicity(self) -> list:
        """Moduli of the full p-point spectrum: each coset value s-fold, plus
        the single zero from the balanced column sum."""
        mods = []
        for xi in self.eigenvalues:
            mods.extend([abs(xi)] * self.s)
        mods.append(0.0)
        return sorted(mods, reverse=True)


def scaling_exponents(p: int, boundary_tol: float = 1e-9) -> ScalingExponents:
    """(beta, beta1) for an odd prime p, from the explicit coset eigenvalues."""
    s = order_of_two(p)
    mods = sorted((abs(x) for x in eigenvalues_explicit(p)), reverse=True)
    lam1 = mods[0]
    lam2 = mods[1] if len(mods) > 1 else 0.0
    beta = math.log(lam1) / (s * _LOG2)
    if abs(lam2 - 1.0) <= boundary_tol:
        return ScalingExponents(beta, None, lam1, lam2, lambda2_boundary=True)
    beta1 = math.log(lam2) / (s * _LOG2) if lam2 > 1.0 else 0.0
    return ScalingExponents(beta, beta1, lam1, lam2)


def transfer_matrix(p: int, verify_up_to: int = 50) -> TransferMatrix:
    """Build M = (S_{p,i-j}(2^s)) and verify S(2^s n) = M S(n) exactly on
    n = 1..verify_up_to before returning."""
    if p == 2 or not is_prime(p):
        raise ValueError("p must be an odd prime")
    s = order_of_two(p)
    col = _svec(p, 1 << s)
    rows = tuple(tuple(col[(i - j) % p] for j in range(p)) for i in range(p))
    mat = TransferMatrix(p, s, rows, tuple(eigenvalues_explicit(p)), scaling_exponents(p))
    for n in range(1, verify_up_to + 1):
        if mat.apply(_svec(p, n)) != _svec(p, n << s):
            raise AssertionError(f"transfer recursion failed at p={p}, n={n}")
    return mat


# ---------------------------------------------------------------------------
# fractal profiles
# ---------------------------------------------------------------------------

def profile_period_factor(p: int) -> int:
    """The integer r in the profile argument log n / (r s log 2): the smallest
    r in {1, 2, 4} for which the dominant eigenvalue power xi^r is real and
    positive, so that the interpolating profile has period one."""
    xi = eigenvalues_explicit(p)[0]
    for r in (1, 2, 4):
        z = xi**r
        if abs(z.imag) <= 1e-9 * abs(z) and z.real > 0:
            return r
    raise ValueError(f"no period factor in {{1,2,4}} for p={p}")


def _class_label(p: int) -> str:
    s = order_of_two(p)
    if s == p - 1:
        return "P1"
    if 2 * s == p - 1:
        return "P21" if p % 4 == 1 else "P23"
    return "Other"


def _profile_refinement(p: int, exps: ScalingExponents) -> tuple:
    """(k, scale): apply the transfer matrix k times and divide by scale to
    evaluate the profile on the fiber of n.

    P1:  one application;     the remainder vanishes at even arguments and
                              M^2 = p M, so (M S(n))_j / (p n^beta) is exact.
    P23: four applications;   one application advances the profile argument
                              by a quarter period (r = 4), four return to the
                              fiber with scale lambda_1^4 = p^2; exact.
    P21: k applications with  (lambda_2/lambda_1)^k < 1e-12; geometric
                              damping of the bounded remainder.
    Other: no refinement (equal-modulus dominant cosets need not contract).
    """
    label = _class_label(p)
    if label == "P1":
        return 1, exps.lambda1
    if label == "P23":
        return 4, exps.lambda1**4
    if label == "P21":
        ratio = exps.lambda2 / exps.lambda1
        k = max(1, min(80, math.ceil(math.log(1e-12) / math.log(ratio))))
        return k, exps.lambda1**k
    return 0, 1.0


@dataclass(frozen=True)
class FractalProfile:
    """Samples of the log-periodic profile for one residue j.

    `raw` holds S_{p,j}(n)/n^beta at x = frac(log n / (r s log 2)).
    `values` holds the same samples with the bounded remainder iterated away
    through the transfer matrix (exact for the classes whose remainder
    vanishes at even arguments; geometrically damped otherwise), so `bounds`
    estimates inf/sup of the profile itself rather than of the transient.
    """

    p: int
    j: int
    r: int
    s: int
    beta: float
    x: np.ndarray
    values: np.ndarray
    raw: np.ndarray
    n_samples: np.ndarray
    bounds: tuple
    remainder_constant: float   # fitted C in |S - n^beta psi| <= C n^{beta1}

    def touches_zero_or_changes_sign(self, tol: float = 1e-9) -> bool:
        return bool(self.values.min() <= tol and self.values.max() >= -tol)


def profile_value(p: int, j: int, n: int, mat: TransferMatrix | None = None) -> float:
    """The profile evaluated on the fiber of n (refined, see
    `_profile_refinement`); exact up to rounding for the classes whose
    remainder vanishes at even arguments."""
    if mat is None:
        mat = transfer_matrix(p, verify_up_to=0)
    if not 0 <= j < p:
        raise ValueError("residue j must lie in [0, p)")
    if n < 1:
        raise ValueError("n must be >= 1")
    k_apps, scale = _profile_refinement(p, mat.exponents)
    refined = _svec(p, n)
    for _ in range(k_apps):
        refined = mat.apply(refined)
    return refined[j] / (scale * float(n) ** mat.exponents.beta)


def fractal_profile(
    p: int,
    j: int,
    horizon_exponent: int,
    resolution: int = 1024,
) -> FractalProfile:
    """Sample S_{p,j}(n)/n^beta on a log-equidistributed grid.

    n runs over floor(2^{(m + x0) r s}) for a lattice of x0 in [0,1), capped
    at 2^horizon_exponent.  Applying M advances log n by s log 2 exactly, so
    the refined evaluation stays on the fiber of x.
    """
    if p == 2 or not is_prime(p):
        raise ValueError("p must be an odd prime")
    if not 0 <= j < p:
        raise ValueError("residue j must lie in [0, p)")
    if horizon_exponent < 1:
        raise ValueError("horizon_exponent must be >= 1")
    mat = transfer_matrix(p, verify_up_to=0)
    exps = mat.exponents
    r = profile_period_factor(p)
    s = mat.s
    beta = exps.beta
    period_bits = r * s
    k_apps, scale = _profile_refinement(p, exps)

    n_cap = 1 << horizon_exponent
    xs, vals, raws, ns = [], [], [], []
    seen = set()
    for idx in range(resolution):
        x0 = idx / resolution
        m = 0
        while (m + x0) * period_bits <= horizon_exponent:
            n = int(2.0 ** ((m + x0) * period_bits))
            m += 1
            if n < 1 or n > n_cap or n in seen:
                continue
            seen.add(n)
            sv = _svec(p, n)
            nb = float(n) ** beta
            raw = sv[j] / nb
            refined = sv
            for _ in range(k_apps):
                refined = mat.apply(refined)
            val = refined[j] / (scale * nb)
            xs.append(math.log(n) / (period_bits * _LOG2) % 1.0)
            vals.append(val)
            raws.append(raw)
            ns.append(n)
    order = np.argsort(np.array(xs))
    x_arr = np.array(xs)[order]
    v_arr = np.array(vals)[order]
    raw_arr = np.array(raws, dtype=float)[order]
    n_arr = np.array(ns, dtype=np.int64)[order]
    # remainder constant: |S - n^beta psi| <= C n^{beta1}; with psi estimated
    # by the refined value, the residual is the remainder itself
    beta1 = exps.beta1 if exps.beta1 is not None else 0.0
    resid = np.abs(raw_arr - v_arr) * n_arr.astype(float) ** (beta - beta1)
    c_fit = float(resid.max()) if len(resid) else 0.0
    return FractalProfile(
        p=p, j=j, r=r, s=s, beta=beta,
        x=x_arr, values=v_arr, raw=raw_arr, n_samples=n_arr,
        bounds=(float(v_arr.min()), float(v_arr.max())),
        remainder_constant=c_fit,
    )


# ---------------------------------------------------------------------------
# classical inequalities and decompositions for small p
# ---------------------------------------------------------------------------

_BETA3 = math.log(3.0) / math.log(4.0)


def coquet_decompose(n: int) -> tuple:
    """Split S_{3,0}(n) into profile part and integer remainder.

    The profile value on the fiber of n is S_{3,0}(4n)/(3 n^beta) exactly
    (M^2 = 3M and the remainder vanishes at even arguments), so
    eps = 3 S(n) - S(4n) is an exact integer in {0, +-1} and S reconstructs
    bit-exactly as (S(4n) + eps)/3.  Returns (psi_value, eps).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    s_n = rarefied_sum(3, 0, n)
    s_4n = rarefied_sum(3, 0, 4 * n)
    eps = 3 * s_n - s_4n
    if eps not in (-1, 0, 1):
        raise ArithmeticError(f"remainder {eps} outside {{0,+-1}} at n={n}")
    if (s_4n + eps) % 3 != 0 or (s_4n + eps) // 3 != s_n:
        raise ArithmeticError(f"exact reconstruction failed at n={n}")
    psi = s_4n / (3.0 * float(n) ** _BETA3)
    return psi, eps


@dataclass(frozen=True)
class NewmanReport:
    n_max: int
    violations: int
    min_ratio: float
    max_ratio: float
    argmin: int
    argmax: int
    lower_bound: float
    upper_bound: float


def newman_check(n_max: int) -> NewmanReport:
    """Verify 3^{-beta}/20 < S_{3,0}(n)/n^beta < 5*3^{-beta} and S > 0 for
    1 <= n <= n_max.  S is exact (int64 cumulative sums); the comparisons run
    in float64, which is safe because the observed ratios sit an order of
    magnitude inside the bounds."""
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    lower = 3.0 ** (-_BETA3) / 20.0
    upper = 5.0 * 3.0 ** (-_BETA3)
    series = rarefied_series(3, 0, n_max)
    n = np.arange(1, n_max + 1, dtype=np.float64)
    ratio = series / n**_BETA3
    violations = int(np.count_nonzero((series <= 0) | (ratio <= lower) | (ratio >= upper)))
    i_min, i_max = int(ratio.argmin()), int(ratio.argmax())
    return NewmanReport(
        n_max=n_max,
        violations=violations,
        min_ratio=float(ratio[i_min]),
        max_ratio=float(ratio[i_max]),
        argmin=i_min + 1,
        argmax=i_max + 1,
        lower_bound=lower,
        upper_bound=upper,
    )


@dataclass(frozen=True)
class PositivityReport:
    p: int
    n_max: int
    violation_count: int
    largest_violation: int          # 0 when there is none
    count_in_last_decade: int       # violations with n in (n_max/10, n_max]


def positivity_scan(p: int, n_max: int) -> PositivityReport:
    """Count n <= n_max with S_{p,0}(n) <= 0.

    For the primes whose residue-0 sums are eventually positive the count
    stabilizes (no hits in the last decade); a persistent stream of hits is
    the signature of a profile with sign changes.
    """
    _check_p(p)
    series = rarefied_series(p, 0, n_max)
    bad = np.nonzero(series <= 0)[0]
    count = int(bad.size)
    largest = int(bad[-1] + 1) if count else 0
    in_last = int(np.count_nonzero(bad + 1 > n_max // 10)) if count else 0
    return PositivityReport(p, n_max, count, largest, in_last)


@dataclass(frozen=True)
class GrabnerReport:
    r1: int
    r2: int
    p: int
    n_max: int
    residual_first: Fraction        # exact residual at N = 1
    c_max: float                    # max |residual| / log N over N >= 2
    dominant_exponent: float
    dominant_target: float
    residuals: np.ndarray = field(repr=False)


def grabner_composite(r1: int, r2: int, n_max: int) -> GrabnerReport:
    """Composite rarefaction p = 3^{r1} 5^{r2}: the residue-0 sum at arguments
    pN splits into the 3-power and 5-power parts up to a logarithmically
    bounded residual, and its growth is dominated by the exponent of the
    prime 3, log 3 / (2 log 2)."""
    if r1 < 1 or r2 < 1:
        raise ValueError("need r1, r2 >= 1")
    if n_max < 2:
        raise ValueError("n_max must be >= 2")
    p3, p5 = 3**r1, 5**r2
    p = p3 * p5
    top = p * n_max
    s_p = rarefied_series(p, 0, top)
    s_3 = rarefied_series(p3, 0, top)
    s_5 = rarefied_series(p5, 0, top)
    N = np.arange(1, n_max + 1)
    idx = p * N - 1
    resid = s_p[idx] - s_3[idx] / p5 - s_5[idx] / p3
    c_max = float(np.max(np.abs(resid[1:]) / np.log(N[1:])))
    # dominant exponent: log-log fit over a window spanning whole periods of
    # the log-4-periodic modulation, so the oscillation does not bias the slope
    lo = max(2, n_max // 64)
    sel = np.unique(np.round(np.logspace(math.log10(lo), math.log10(n_max), 80)).astype(int))
    y = s_p[p * sel - 1].astype(float)
    keep = y > 0
    slope = float(np.polyfit(np.log(p * sel[keep].astype(float)), np.log(y[keep]), 1)[0])
    target = math.log(3.0) / (2.0 * _LOG2)
    resid_first = (
        Fraction(int(s_p[p - 1]))
        - Fraction(int(s_3[p - 1]), p5)
        - Fraction(int(s_5[p - 1]), p3)
    )
    return GrabnerReport(
        r1=r1, r2=r2, p=p, n_max=n_max,
        residual_first=resid_first,
        c_max=c_max,
        dominant_exponent=slope,
        dominant_target=target,
        residuals=resid,
    )
