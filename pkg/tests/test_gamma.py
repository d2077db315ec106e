from fractions import Fraction as F
from math import gcd, prod

import pytest
from hypothesis import assume, given, strategies as st

from gkz_gevrey.gamma import (
    GammaSeriesSpec,
    axis_direction,
    axis_series,
    build_gamma_series,
    build_vtilde_series,
    exponents_along_Y,
    exponents_generic,
    gamma_coeff,
    gamma_ray_coefficients,
    generic_direction,
    generic_series,
    minimal_negative_support,
    negative_support_scan,
    pochhammer,
    resonance_data,
)
from gkz_gevrey.weyl import apply, hypergeometric_ops


def desc(z, n):
    # oracle: literal product, kept apart from the package helpers
    return prod((z - j for j in range(n)), start=F(1))


def test_pochhammer_examples():
    assert pochhammer((F(7, 3), 9), (0, 0)) == 1
    assert pochhammer((5, 0), (2, 0)) == 20
    assert pochhammer((F(1, 4), 7), (3, 0)) == F(21, 64)


def test_gamma_coeff_examples():
    assert gamma_coeff((F(1, 3), F(2)), (0, 0)) == 1
    assert gamma_coeff((F(1, 4), 0), (-3, 2)) == F(21, 128)
    assert gamma_coeff((4, 0), (-6, 4)) == 0


def test_exponent_examples():
    b = F(3, 5)
    assert exponents_generic(1, 2, b) == [(0, b / 2), (1, (b - 1) / 2)]
    assert exponents_generic(2, 3, 0) == [(0, 0), (1, F(-2, 3)), (2, F(-4, 3))]
    assert exponents_along_Y(2, 3, F(1, 2)) == [(F(1, 4), 0), (F(-5, 4), 1)]
    assert exponents_along_Y(1, 2, b) == [(b, 0)]


def test_build_small_series():
    s = build_gamma_series(GammaSeriesSpec((F(1, 4), 0), (-3, 2), 1))
    assert s.terms == {(F(1, 4), F(0)): F(1), (F(-11, 4), F(2)): F(21, 128)}


def test_polynomial_axis_series_for_resonant_beta():
    s = build_gamma_series(GammaSeriesSpec((4, 0), (-3, 2), 50))
    assert len(s) == 2 and set(s.terms) == {(F(4), F(0)), (F(1), F(2))}


def test_resonance_data_examples():
    rd = resonance_data(2, 3, 8)
    assert (rd.q, rd.m0, rd.mprime, rd.vtilde) == (0, 4, 2, (F(-2), F(4)))
    assert resonance_data(2, 3, F(1, 2)) is None
    assert resonance_data(2, 3, 1) is None


@given(st.integers(0, 40))
def test_resonance_matches_semigroup(beta):
    in_semigroup = any((beta - 3 * j) >= 0 and (beta - 3 * j) % 2 == 0 for j in range(beta // 3 + 1))
    assert (resonance_data(2, 3, beta) is not None) == in_semigroup


def test_negative_support_examples():
    assert minimal_negative_support((F(1, 4), 0), (-3, 2))
    assert minimal_negative_support((4, 0), (-3, 2))
    scan = negative_support_scan((-2, 4), (-3, 2))
    assert not scan.minimal
    # (-2,4) - (-3,2) = (1,2) already has empty negative support
    assert scan.witness_m == -1


def test_vtilde_series_properties():
    P, E = hypergeometric_ops(2, 3, 8)
    vt = build_vtilde_series(resonance_data(2, 3, 8), 2, 3, 8, 40)
    assert vt.coeff((-2, 4)) == 1
    assert apply(E, vt).is_zero()
    Pv = apply(P, vt)
    assert len(Pv) == 1
    (e, c), = Pv.terms.items()
    # P(x1^-2 x2^4) contributes only through d2^2: -(4*3) x1^-2 x2^2
    assert e == (F(-2), F(2)) and c == -12


@given(st.integers(1, 5), st.integers(2, 9), st.fractions(-20, 20, max_denominator=9), st.integers(0, 25))
def test_ray_coefficients_match_literal_gamma(a, b, beta, m):
    assume(a < b and gcd(a, b) == 1)
    v = exponents_along_Y(a, b, beta)[0]
    u = axis_direction(a, b)
    want_num = desc(v[0], b * m)
    want_den = desc(v[1] + a * m, a * m)
    assert gamma_ray_coefficients(v, u, m)[m] == want_num / want_den


@pytest.mark.parametrize("a,b,beta", [(2, 3, F(1, 2)), (1, 2, F(5)), (3, 5, F(-7, 5)), (2, 3, 8)])
def test_families_are_annihilated(a, b, beta):
    P, E = hypergeometric_ops(a, b, beta)
    for k in range(a):
        f = axis_series(a, b, beta, k, 30)
        assert apply(P, f).is_zero() and apply(E, f).is_zero()
    for j in range(b):
        f = generic_series(a, b, beta, j, 30)
        assert apply(P, f).is_zero() and apply(E, f).is_zero()


def test_residue_classes_are_disjoint():
    a, b, beta = 3, 5, F(1, 2)
    supports = [set(axis_series(a, b, beta, k, 20).terms) for k in range(a)]
    for i in range(a):
        for j in range(i + 1, a):
            assert not supports[i] & supports[j]
    assert generic_direction(a, b) == (5, -3)
