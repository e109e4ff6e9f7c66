import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from satotate.harmonics import (character_table, character_to_fourier, fourier_to_character,
                                gauss_legendre, st_integral, st_measure_character,
                                st_measure_interval, su2_character)
from satotate.kernel import even_window, truncation_tail_bound, validate_params


def exp_sum(k, theta):
    return sum(np.exp(1j * (k - 2 * j) * theta) for j in range(k + 1)).real


class TestCharacters:
    def test_low_degree(self):
        th = np.linspace(0, np.pi, 101)
        assert np.all(su2_character(0, th) == 1.0)
        assert np.allclose(su2_character(1, th), 2 * np.cos(th), atol=1e-14)

    @pytest.mark.parametrize("k", [0, 1, 2, 7, 30])
    def test_endpoints(self, k):
        assert su2_character(k, 0.0) == pytest.approx(k + 1, abs=1e-12)
        assert su2_character(k, math.pi) == pytest.approx((-1) ** k * (k + 1), abs=1e-12)
        assert su2_character(k, 1e-9) == pytest.approx(k + 1, abs=1e-9)

    @pytest.mark.parametrize("k", range(0, 25))
    def test_matches_exponential_sum(self, k):
        th = np.concatenate([np.linspace(0, np.pi, 997), [1e-7, np.pi - 1e-7, 3e-6]])
        assert np.max(np.abs(su2_character(k, th) - exp_sum(k, th))) <= 1e-12 * max(1, k)

    def test_table_matches_closed_form(self):
        th = np.linspace(0.01, np.pi - 0.01, 50)
        T = character_table(40, th)
        for k in (0, 5, 40):
            assert np.allclose(T[k], su2_character(k, th), atol=1e-10)

    def test_recurrence(self):
        th = np.linspace(0, np.pi, 2001)
        chi1 = su2_character(1, th)
        for k in range(1, 31):
            lhs = chi1 * su2_character(k, th)
            rhs = su2_character(k + 1, th) + su2_character(k - 1, th)
            assert np.max(np.abs(lhs - rhs)) <= 1e-10


class TestBasisChange:
    def test_constant(self):
        d = fourier_to_character([1.0, 0, 0, 0, 0]).d
        assert np.array_equal(d, [1.0, 0.0, 0.0])

    def test_cosine(self):
        d = fourier_to_character([0.0, 1.0, 0, 0, 0]).d
        assert np.array_equal(d, [0.0, 1.0, 0.0])

    def test_partial_sums_agree(self):
        rng = np.random.default_rng(7)
        c = rng.normal(size=21)
        c[-2:] = 0.0  # finite Fourier sum: the character sum through M-2 is exact
        exp = fourier_to_character(c)
        th = np.linspace(0, np.pi, 1001)
        fourier = c[0] + sum(2 * c[k] * np.cos(k * th) for k in range(1, len(c)))
        assert np.max(np.abs(exp.evaluate(th) - fourier)) <= 1e-10

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.floats(-10, 10), min_size=3, max_size=60))
    def test_round_trip(self, c):
        c = np.array(c + [0.0, 0.0])
        d = fourier_to_character(c).d
        back = character_to_fourier(d)
        assert np.allclose(back, c[:-2], atol=1e-12 * max(1.0, np.abs(c).sum()))

    def test_window_expansion_within_tail(self):
        p = validate_params(1 / 6, 1 / 3, 0.05, 2)
        M = 150
        w = even_window(p, M)
        exp = fourier_to_character(w.c, truncation_tail_bound(p, M))
        th = np.linspace(0, np.pi, 10_000)
        assert np.max(np.abs(exp.evaluate(th) - w.exact(th))) <= exp.tail


class TestMeasure:
    def test_full(self):
        assert st_measure_interval(0, math.pi) == pytest.approx(1.0, abs=1e-15)

    def test_half(self):
        assert st_measure_interval(0, math.pi / 2) == pytest.approx(0.5, abs=1e-15)

    def test_middle_third(self):
        expected = 1 / 3 + math.sqrt(3) / (2 * math.pi)
        quad, _ = integrate.quad(lambda t: 2 / math.pi * math.sin(t) ** 2, math.pi / 3,
                                 2 * math.pi / 3, epsabs=1e-14)
        assert quad == pytest.approx(expected, abs=1e-13)
        assert st_measure_interval(math.pi / 3, 2 * math.pi / 3) == pytest.approx(expected, abs=1e-14)

    def test_reversed_rejected(self):
        with pytest.raises(ValueError):
            st_measure_interval(1.0, 0.5)

    @settings(max_examples=100, deadline=None)
    @given(st.floats(0, math.pi), st.floats(0, math.pi), st.floats(0, math.pi))
    def test_additive_and_bounded(self, a, b, c):
        a, b, c = sorted((a, b, c))
        ab, bc, ac = st_measure_interval(a, b), st_measure_interval(b, c), st_measure_interval(a, c)
        assert 0 <= ab <= 1 + 1e-15
        assert ab + bc == pytest.approx(ac, abs=1e-14)

    def test_character_measures(self):
        assert st_measure_character(0) == 1.0
        assert st_measure_character(1) == 0.0
        for k in range(0, 21):
            q = st_integral(lambda t: su2_character(k, t))
            assert q == pytest.approx(st_measure_character(k), abs=1e-9)

    def test_quadrature_converged(self):
        # doubling panels changes nothing at the tested tolerance
        f = lambda t: su2_character(20, t) * su2_character(20, t)  # noqa: E731
        assert abs(st_integral(f, 2048) - st_integral(f, 4096)) < 1e-12

    def test_gauss_legendre_polynomial(self):
        assert gauss_legendre(lambda t: t**5, 0.0, 2.0, panels=3) == pytest.approx(64 / 6)


def test_orthonormality():
    kmax = 20
    for j in range(kmax + 1):
        for k in range(j, kmax + 1):
            q = st_integral(lambda t: su2_character(j, t) * su2_character(k, t))
            assert q == pytest.approx(1.0 if j == k else 0.0, abs=1e-9)
