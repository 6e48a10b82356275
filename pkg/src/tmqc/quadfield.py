"""Prime classification by the order of 2, and real-quadratic-field
invariants entering the rarefaction exponents.

Odd primes split by s = ord_2(p) in (Z/pZ)*:

  P1   s = p-1                     lambda_1 = p,              beta = log p / ((p-1) log 2)
  P21  s = (p-1)/2, p = 1 (mod 4)  lambda_1 = eps^h sqrt(p),  beta = (log p + 2h log eps) / ((p-1) log 2)
  P23  s = (p-1)/2, p = 3 (mod 4)  lambda_1 = sqrt(p),        beta = log p / ((p-1) log 2)

For P21 the class number h and fundamental unit eps of Q(sqrt p) enter through
the analytic identity 2 h log eps = sqrt(p) L(1, chi_p), with chi_p the
quadratic character mod p.  Units are computed on exact integer surd triples
(never on floating sqrt p: coefficients grow fast), and h is recovered from a
finite character sum for L(1, chi_p) with a near-integer sanity gate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

__all__ = [
    "PrimeClass",
    "PrimeClassRecord",
    "is_prime",
    "primes_up_to",
    "order_of_two",
    "classify_prime",
    "fundamental_unit",
    "dirichlet_l_one",
    "class_number",
    "beta_for_class",
    "prime_record",
    "scan_size_increasing",
    "SizeIncreasingScan",
    "ClassNumberDriftError",
]

_LOG2 = math.log(2.0)


class ClassNumberDriftError(ArithmeticError):
    """The analytic class-number value failed the near-integer gate."""


class PrimeClass(Enum):
    P1 = "P1"
    P21 = "P21"
    P23 = "P23"
    OTHER = "Other"


# ---------------------------------------------------------------------------
# elementary number theory
# ---------------------------------------------------------------------------

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin for n < 3.3e24."""
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d, r = n - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def primes_up_to(n: int) -> list:
    """Sieve of Eratosthenes, inclusive."""
    if n < 2:
        return []
    sieve = bytearray(b"\x01") * (n + 1)
    sieve[0:2] = b"\x00\x00"
    for p in range(2, math.isqrt(n) + 1):
        if sieve[p]:
            start = p * p
            sieve[start :: p] = b"\x00" * ((n - start) // p + 1)
    return [i for i, v in enumerate(sieve) if v]


def _factorize(n: int) -> dict:
    out: dict = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def order_of_two(p: int) -> int:
    """Multiplicative order of 2 mod an odd prime p, by factoring p-1 and
    descending from the full group order."""
    if p == 2 or not is_prime(p):
        raise ValueError("p must be an odd prime")
    s = p - 1
    for f in _factorize(p - 1):
        while s % f == 0 and pow(2, s // f, p) == 1:
            s //= f
    return s


def classify_prime(p: int) -> PrimeClass:
    """Class of an odd prime from the order of 2."""
    s = order_of_two(p)
    if s == p - 1:
        return PrimeClass.P1
    if 2 * s == p - 1:
        return PrimeClass.P21 if p % 4 == 1 else PrimeClass.P23
    return PrimeClass.OTHER


# ---------------------------------------------------------------------------
# fundamental units via exact continued fractions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FundamentalUnit:
    """eps = u + v*omega > 1 with omega = (1 + sqrt p)/2, norm +-1."""

    p: int
    u: int
    v: int
    norm: int

    def value(self) -> float:
        return self.u + self.v * (1.0 + math.sqrt(self.p)) / 2.0

    def log_value(self) -> float:
        """log eps at full precision even when the coordinates are huge:
        evaluated through integer square roots at 128 extra bits."""
        shift = 1 << 128
        sq = math.isqrt(self.p * shift * shift)
        num = 2 * self.u * shift + self.v * (shift + sq)
        return math.log(num) - math.log(2) - 128 * _LOG2

    def __str__(self) -> str:
        return f"{self.u}+{self.v}w"


def _norm_form(p: int, u: int, v: int) -> int:
    # N(u + v*omega) with omega = (1+sqrt p)/2 and p = 1 (mod 4)
    return u * u + u * v - v * v * (p - 1) // 4


def fundamental_unit(p: int) -> FundamentalUnit:
    """Smallest unit > 1 of the ring of integers of Q(sqrt p), p = 1 (mod 4).

    Runs the continued fraction of omega = (1+sqrt p)/2 on the exact surd
    state (P + sqrt(D))/Q; convergents h/k give candidates (h-k) + k*omega,
    and the first norm +-1 hit is the fundamental unit.  All arithmetic is
    on arbitrary-precision integers.
    """
    if p % 4 != 1 or not is_prime(p):
        raise ValueError("fundamental_unit expects a prime p = 1 (mod 4)")
    D = p
    sq = math.isqrt(D)
    P, Q = 1, 2
    a = (P + sq) // Q
    h_prev, k_prev = 1, 0
    h_cur, k_cur = a, 1
    for _ in range(10_000):
        u, v = h_cur - k_cur, k_cur
        n = _norm_form(p, u, v)
        if n in (1, -1) and v != 0:
            return FundamentalUnit(p, u, v, n)
        P = a * Q - P
        Q = (D - P * P) // Q
        a = (P + sq) // Q
        h_cur, h_prev = a * h_cur + h_prev, h_cur
        k_cur, k_prev = a * k_cur + k_prev, k_cur
    raise ArithmeticError(f"continued fraction for p={p} did not close")


# ---------------------------------------------------------------------------
# L-function, class number, per-class exponents
# ---------------------------------------------------------------------------

def quadratic_character(a: int, p: int) -> int:
    """chi_p(a) by Euler's criterion (0 on multiples of p)."""
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


def dirichlet_l_one(p: int) -> float:
    """L(1, chi_p) for prime p = 1 (mod 4), by the closed character sum
    -(1/sqrt p) * sum_a chi_p(a) log sin(pi a / p).

    The normalization is pinned by the h = 1 entries of the classical unit
    table (see tests); the log 2 part of log(2 sin) drops because the
    character sums to zero.
    """
    if p % 4 != 1 or not is_prime(p):
        raise ValueError("dirichlet_l_one expects a prime p = 1 (mod 4)")
    acc = 0.0
    for a in range(1, p):
        acc += quadratic_character(a, p) * math.log(math.sin(math.pi * a / p))
    return -acc / math.sqrt(p)


def class_number(p: int, tol: float = 1e-6) -> int:
    """h = sqrt(p) L(1, chi_p) / (2 log eps), rounded; the pre-rounding value
    must already be within tol of an integer or the computation is rejected."""
    eps = fundamental_unit(p)
    raw = math.sqrt(p) * dirichlet_l_one(p) / (2.0 * eps.log_value())
    h = round(raw)
    if abs(raw - h) > tol or h < 1:
        raise ClassNumberDriftError(
            f"class number for p={p} drifted from an integer: {raw!r}"
        )
    return h


@dataclass(frozen=True)
class PrimeClassRecord:
    """Classification record for one odd prime."""

    p: int
    s: int
    cls: PrimeClass
    beta: float | None
    lambda1: float | None
    lambda2: float | None
    h: int | None = None
    epsilon: FundamentalUnit | None = None
    regulator: float | None = None


def beta_for_class(rec: PrimeClassRecord) -> float:
    """The growth exponent by the closed per-class formula; P21 additionally
    checks Hua's bound L(1, chi_p) < log(p)/2 + 1."""
    p = rec.p
    if rec.cls in (PrimeClass.P1, PrimeClass.P23):
        return math.log(p) / ((p - 1) * _LOG2)
    if rec.cls is PrimeClass.P21:
        if rec.h is None or rec.epsilon is None:
            raise ValueError("P21 record must carry h and the fundamental unit")
        l_value = dirichlet_l_one(p)
        if not l_value < math.log(p) / 2.0 + 1.0:
            raise ArithmeticError(f"Hua bound violated at p={p}: L={l_value}")
        return (math.log(p) + 2.0 * rec.h * rec.epsilon.log_value()) / ((p - 1) * _LOG2)
    raise ValueError(
        f"no closed exponent formula for class {rec.cls.value}; "
        "use the transfer-matrix spectrum instead"
    )


def prime_record(p: int) -> PrimeClassRecord:
    """Full record: class, exponent and (for P21) field invariants."""
    s = order_of_two(p)
    cls = classify_prime(p)
    if cls is PrimeClass.P1:
        rec = PrimeClassRecord(p, s, cls, None, float(p), 0.0)
        return PrimeClassRecord(p, s, cls, beta_for_class(rec), float(p), 0.0)
    if cls is PrimeClass.P23:
        rec = PrimeClassRecord(p, s, cls, None, math.sqrt(p), math.sqrt(p))
        return PrimeClassRecord(p, s, cls, beta_for_class(rec), math.sqrt(p), math.sqrt(p))
    if cls is PrimeClass.P21:
        eps = fundamental_unit(p)
        h = class_number(p)
        reg = eps.log_value()
        lam1 = math.exp(h * reg) * math.sqrt(p)
        lam2 = math.exp(-h * reg) * math.sqrt(p)
        rec = PrimeClassRecord(p, s, cls, None, lam1, lam2, h, eps, reg)
        return PrimeClassRecord(p, s, cls, beta_for_class(rec), lam1, lam2, h, eps, reg)
    return PrimeClassRecord(p, s, cls, None, None, None)


@dataclass(frozen=True)
class SizeIncreasingScan:
    """Primes with growth exponent beta > 1/2, by class, below a limit."""

    limit: int
    p1: tuple
    p21: tuple
    p23: tuple
    other: tuple     # empirical, via the transfer-matrix spectrum


def scan_size_increasing(limit: int, include_other: bool = True) -> SizeIncreasingScan:
    """Scan odd primes p < limit for beta > 1/2.

    P1/P23 use the closed formula; P21 uses beta = (log p + sqrt(p) L) /
    ((p-1) log 2), which avoids the unit entirely through the class-number
    identity.  The Other classes (no closed formula) are scanned through the
    explicit eigenvalue product when requested.
    """
    if limit < 3:
        raise ValueError("limit must be >= 3")
    hits_p1, hits_p21, hits_p23, hits_other = [], [], [], []
    for p in primes_up_to(limit - 1):
        if p == 2:
            continue
        cls = classify_prime(p)
        if cls is PrimeClass.P1:
            if math.log(p) / ((p - 1) * _LOG2) > 0.5:
                hits_p1.append(p)
        elif cls is PrimeClass.P23:
            if math.log(p) / ((p - 1) * _LOG2) > 0.5:
                hits_p23.append(p)
        elif cls is PrimeClass.P21:
            beta = (math.log(p) + math.sqrt(p) * dirichlet_l_one(p)) / ((p - 1) * _LOG2)
            if beta > 0.5:
                hits_p21.append(p)
        elif include_other:
            from . import rareclass  # runtime import; rareclass depends on this module

            if rareclass.scaling_exponents(p).beta > 0.5:
                hits_other.append(p)
    return SizeIncreasingScan(
        limit, tuple(hits_p1), tuple(hits_p21), tuple(hits_p23), tuple(hits_other)
    )
