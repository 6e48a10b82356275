"""Rarefied sums, the transfer matrix and its spectrum, profiles."""

import math
from fractions import Fraction

import numpy as np
import pytest

from tmqc import rareclass
from tmqc.rareclass import (
    coquet_decompose,
    coset_eigenvalue,
    cosets_of_two,
    eigenvalues_explicit,
    fractal_profile,
    grabner_composite,
    newman_check,
    positivity_scan,
    profile_period_factor,
    rarefied_series,
    rarefied_sum,
    rarefied_sum_direct,
    rarefied_vector,
    residue_exponent,
    scaling_exponents,
    transfer_matrix,
)
from tmqc.tmcore import tm_sign

BETA3 = math.log(3) / math.log(4)


class TestRarefiedSums:
    def test_examples(self):
        assert rarefied_sum(3, 0, 1) == 1
        assert rarefied_sum(3, 0, 4) == 2
        assert rarefied_sum(7, 2, 0) == 0

    def test_recursion_matches_direct_exhaustive(self):
        for p in (3, 5, 7, 9):
            for i in range(p):
                for n in range(0, 200):
                    assert rarefied_sum(p, i, n) == rarefied_sum_direct(p, i, n)

    def test_recursion_matches_direct_random(self):
        # vectorized direct summation as the oracle at larger n
        from tmqc.tmcore import sign_array

        def direct_numpy(p, i, n):
            total = 0
            for lo in range(i, n, 1 << 22):
                hi = min(lo + (1 << 22), n)
                # progression members inside [lo, hi)
                start = lo + ((i - lo) % p)
                if start >= hi:
                    continue
                idx = np.arange(start, hi, p)
                total += int(sign_array(lo, hi)[idx - lo].sum())
            return total

        rng = np.random.default_rng(2)
        for p in (3, 5, 7, 9, 11, 13, 15):
            for n in rng.integers(1, 1 << 22, size=6):
                n = int(n)
                i = int(rng.integers(0, p))
                assert rarefied_sum(p, i, n) == direct_numpy(p, i, n)
        # spot checks high up the range
        for n in (int(2**30 - 17), int(2**30 + 5)):
            assert rarefied_sum(3, 1, n) == direct_numpy(3, 1, n)

    def test_vector_examples(self):
        assert rarefied_vector(3, 3).entries == (1, -1, -1)
        assert rarefied_vector(3, 0).entries == (0, 0, 0)
        assert sum(rarefied_vector(5, 16).entries) == 0

    def test_column_sum_identity(self):
        rng = np.random.default_rng(4)
        for p in (3, 5, 7, 11):
            for n in rng.integers(0, 1 << 20, size=20):
                vec = rarefied_vector(p, int(n))  # checked in __post_init__
                expected = sum(tm_sign(m) for m in range(int(n))) if n < 4096 else None
                if expected is not None:
                    assert sum(vec.entries) == expected

    def test_series_matches_scalar(self):
        for p in (3, 7):
            for i in (0, p - 1):
                series = rarefied_series(p, i, 500)
                for n in (1, 2, 17, 100, 499, 500):
                    assert series[n - 1] == rarefied_sum(p, i, n)

    def test_series_chunking_consistent(self):
        a = rarefied_series(5, 2, 5000, chunk=256)
        b = rarefied_series(5, 2, 5000)
        assert np.array_equal(a, b)

    def test_rejects_bad_arguments(self):
        with pytest.raises(ValueError):
            rarefied_sum(4, 0, 10)
        with pytest.raises(ValueError):
            rarefied_sum(3, 3, 10)


class TestTransferMatrix:
    def test_p3_entries(self):
        mat = transfer_matrix(3)
        assert mat.s == 2
        assert mat.column() == (2, -1, -1)
        # circulant structure
        assert mat.entries[1] == (-1, 2, -1)

    def test_recursion_example(self):
        mat = transfer_matrix(3)
        s5 = [rarefied_sum_direct(3, i, 5) for i in range(3)]
        s20 = [rarefied_sum_direct(3, i, 20) for i in range(3)]
        assert mat.apply(s5) == s20

    def test_p7_column_balances(self):
        mat = transfer_matrix(7)
        assert mat.s == 3
        assert sum(mat.column()) == 0

    def test_rejects_composite(self):
        with pytest.raises(ValueError):
            transfer_matrix(9)


class TestSpectrumOfM:
    def test_p3_single_coset(self):
        eig = eigenvalues_explicit(3)
        assert len(eig) == 1
        assert eig[0] == pytest.approx(3.0, abs=1e-12)

    def test_product_is_p(self):
        for p in (3, 5, 7, 11, 13, 17, 19, 23):
            prod = np.prod(eigenvalues_explicit(p))
            assert prod == pytest.approx(p, rel=1e-10)

    def test_explicit_matches_circulant_eigenvalue(self):
        for p in (3, 5, 7, 11, 17):
            explicit = sorted(abs(x) for x in eigenvalues_explicit(p))
            via_mu = sorted(
                abs(coset_eigenvalue(p, cs[0])) for cs in cosets_of_two(p)
            )
            assert via_mu == pytest.approx(explicit, rel=1e-9)

    def test_char_poly_moduli(self):
        for p in (3, 5, 11):
            mat = transfer_matrix(p, verify_up_to=0)
            numeric = np.sort(np.abs(np.linalg.eigvals(np.array(mat.entries, dtype=float))))
            expected = np.sort(mat.eigenvalue_moduli_with_multiplicity())
            assert np.allclose(numeric, expected, atol=1e-6)

    def test_scaling_exponents(self):
        assert scaling_exponents(3).beta == pytest.approx(math.log(3) / (2 * math.log(2)))
        assert scaling_exponents(5).beta == pytest.approx(math.log(5) / (4 * math.log(2)))
        assert scaling_exponents(7).beta == pytest.approx(math.log(7) / (6 * math.log(2)))
        assert scaling_exponents(3).beta1 == 0.0
        for p in (3, 5, 7, 17, 31):
            e = scaling_exponents(p)
            assert 0.0 < e.beta <= 1.0
            assert 1.0 < e.lambda1 <= 2.0**rareclass.order_of_two(p)

    def test_residue_exponent_depends_on_coset(self):
        # two cosets mod 17: <2> carries the small eigenvalue, 3<2> the large
        b1 = residue_exponent(17, 1)
        b3 = residue_exponent(17, 3)
        assert b3 == pytest.approx(scaling_exponents(17).beta, rel=1e-9)
        assert b1 < 0  # subdominant: |mu| = 1/(4+sqrt(17)) * sqrt(17) < 1
        # constant on cosets
        assert residue_exponent(17, 9) == pytest.approx(b1, rel=1e-12)
        assert residue_exponent(17, 5) == pytest.approx(b3, rel=1e-12)


class TestProfiles:
    def test_period_factor(self):
        assert profile_period_factor(3) == 1
        assert profile_period_factor(17) == 1
        assert profile_period_factor(7) == 4

    def test_p3_profile_within_closed_interval(self):
        prof = fractal_profile(3, 0, 16, resolution=128)
        lo = (1.0 / 3.0) ** BETA3 * 2.0 * math.sqrt(3.0) / 3.0
        hi = 55.0 / 3.0 * (1.0 / 65.0) ** BETA3
        assert prof.bounds[0] >= lo - 1e-9
        assert prof.bounds[1] <= hi + 1e-9
        # Newman window is much wider and must also hold for the raw samples
        assert prof.raw.min() > 3.0 ** (-BETA3) / 20.0
        assert prof.raw.max() < 5.0 * 3.0 ** (-BETA3)

    def test_p3_residue2_touches_zero(self):
        prof = fractal_profile(3, 2, 16, resolution=128)
        assert prof.touches_zero_or_changes_sign()

    def test_p3_residues_0_1_avoid_zero(self):
        p0 = fractal_profile(3, 0, 14, resolution=64)
        p1 = fractal_profile(3, 1, 14, resolution=64)
        assert p0.bounds[0] > 0
        assert p1.bounds[1] < 0

    def test_profile_periodicity_on_fiber(self):
        # n and n * 2^{r s} live on one fiber: the refined values agree
        # exactly (up to rounding) for the vanishing-remainder classes
        for n in (1, 5, 23, 118, 1001):
            for j in range(3):
                a = rareclass.profile_value(3, j, n)
                b = rareclass.profile_value(3, j, 4 * n)
                assert a == pytest.approx(b, abs=1e-12)
            for j in (0, 3):
                a = rareclass.profile_value(7, j, n)
                b = rareclass.profile_value(7, j, n << 12)
                assert a == pytest.approx(b, abs=1e-12)
        # damped-remainder class: agreement within the refinement tolerance
        for n in (3, 50):
            a = rareclass.profile_value(17, 0, n)
            b = rareclass.profile_value(17, 0, n << 8)
            assert a == pytest.approx(b, abs=1e-8)

    def test_p21_remainder_is_damped(self):
        # refined and raw samples differ by the bounded remainder only
        prof = fractal_profile(17, 0, 20, resolution=32)
        assert np.max(np.abs(prof.values - prof.raw) * prof.n_samples**prof.beta) < 260.0
        assert prof.remainder_constant < 260.0


class TestCoquet:
    def test_first_values(self):
        psi, eps = coquet_decompose(1)
        assert eps == 1
        assert psi == pytest.approx(2.0 / 3.0)

    def test_remainder_set_small_range(self):
        for n in range(1, 3000):
            _, eps = coquet_decompose(n)
            assert eps in (-1, 0, 1)
            # the remainder is exactly -eta_n on odd n and 0 on even n
            expected = 0 if n % 2 == 0 else -tm_sign(n)
            assert eps == expected

    def test_fiber_constancy_at_powers_of_four(self):
        base, _ = coquet_decompose(1)
        for m in (4, 16, 64, 256):
            psi, _ = coquet_decompose(m)
            assert psi == pytest.approx(base, rel=1e-12)


class TestNewman:
    def test_small_horizon(self):
        rep = newman_check(10_000)
        assert rep.violations == 0
        assert rep.min_ratio > rep.lower_bound
        assert rep.max_ratio < rep.upper_bound
        assert rep.min_ratio > 0.4  # far inside the classical window


class TestPositivity:
    def test_p3_and_p5_clean(self):
        assert positivity_scan(3, 10_000).violation_count == 0
        assert positivity_scan(5, 10_000).violation_count == 0

    def test_p7_violates(self):
        rep = positivity_scan(7, 10_000)
        assert rep.violation_count > 100
        assert rep.largest_violation > 500


class TestGrabner:
    def test_exact_first_residual(self):
        rep = grabner_composite(1, 1, 500)
        # direct sums: S_{15,0}(15)=1, S_{3,0}(15)=5, S_{5,0}(15)=3
        assert rarefied_sum_direct(15, 0, 15) == 1
        assert rarefied_sum_direct(3, 0, 15) == 5
        assert rarefied_sum_direct(5, 0, 15) == 3
        assert rep.residual_first == Fraction(1) - Fraction(5, 5) - Fraction(3, 3)

    def test_residual_log_bounded(self):
        rep = grabner_composite(1, 1, 2000)
        assert rep.c_max < 5.0
        assert np.all(np.abs(rep.residuals[1:]) <= rep.c_max * np.log(np.arange(2, 2001)))
