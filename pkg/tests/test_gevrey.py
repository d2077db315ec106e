import math
from fractions import Fraction as F

import pytest

from gkz_gevrey.errors import NonIntegerX2Exponent, TooFewTerms
from gkz_gevrey.gamma import axis_series, build_vtilde_series, resonance_data
from gkz_gevrey.gevrey import (
    CONVERGENT,
    GEVREY,
    POLYNOMIAL,
    estimate_from_points,
    estimate_gevrey_index,
    quotient_labels,
    ratio_sequence,
    rho_log_terms,
    rho_s,
    slope_scan,
)
from gkz_gevrey.series import SparseSeries, TruncationSpec


def x2_series(coeffs):
    terms = {(0, n): c for n, c in enumerate(coeffs)}
    return SparseSeries(terms, TruncationSpec.ray((0, 0), (0, 1), len(coeffs) - 1))


def test_rho_s_examples():
    f = SparseSeries({(0, 2): F(5), (1, 4): F(-3)})
    assert rho_s(f, 1).terms == {e: float(c) for e, c in f.terms.items()}
    assert rho_s(f, 2).coeff((0, 2)) == pytest.approx(2.5)
    assert rho_s(f, F(3, 2)).coeff((1, 4)) == pytest.approx(-3 / math.sqrt(24))


def test_rho_s_composes():
    f = SparseSeries({(0, n): F(n + 1) for n in range(10)})
    g = rho_s(rho_s(f, F(3, 2)), F(5, 4))
    h = rho_s(f, F(7, 4))
    for e in f.terms:
        assert g.coeff(e) == pytest.approx(h.coeff(e), rel=1e-12)


def test_rho_s_refuses_fractional_x2():
    with pytest.raises(NonIntegerX2Exponent):
        rho_s(SparseSeries({(0, F(1, 2)): F(1)}), 2)


def test_ratio_sequence_geometric():
    assert ratio_sequence(x2_series([F(2) ** m for m in range(30)])) == [2.0] * 29
    with pytest.raises(TooFewTerms):
        ratio_sequence(x2_series([F(1), F(0), F(2)]))


def test_factorial_reciprocal_is_convergent():
    rep = estimate_gevrey_index(x2_series([F(1, math.factorial(n)) for n in range(120)]))
    assert rep.classification == CONVERGENT


def test_factorial_power_is_recovered():
    # c_n = (n!)^(1/2) * 3^n: Gevrey of order 3/2 exactly
    logs = [(n, 0.5 * math.lgamma(n + 1) + n * math.log(3)) for n in range(200)]
    rep = estimate_from_points([(n, F(math.exp(min(y, 700)))) for n, y in logs if y < 700], lambda n: n)
    assert rep.estimated_index == pytest.approx(1.5, abs=0.01)


@pytest.mark.parametrize("a,b,beta", [(2, 3, F(1, 2)), (1, 2, F(1, 3)), (3, 5, F(1, 2))])
def test_axis_index_is_b_over_a(a, b, beta):
    for k in range(a):
        rep = estimate_gevrey_index(axis_series(a, b, beta, k, 300))
        assert rep.classification == GEVREY
        assert abs(rep.estimated_index - b / a) <= 0.05


def test_polynomial_for_resonant_beta():
    assert estimate_gevrey_index(axis_series(2, 3, 8, 0, 300)).classification == POLYNOMIAL


def test_vtilde_has_slope_index():
    vt = build_vtilde_series(resonance_data(2, 3, 8), 2, 3, 8, 300)
    assert estimate_gevrey_index(vt).estimated_index == pytest.approx(1.5, abs=0.05)


def test_slope_examples():
    grid = [F(1), F(5, 4), F(3, 2), F(7, 4), F(2)]
    rep = slope_scan(2, 3, F(1, 2), grid)
    assert rep.dim_at_s == [0, 0, 2, 2, 2] and rep.detected_gap == F(3, 2)
    rep = slope_scan(1, 2, F(1, 3), [F(1), F(3, 2), F(2), F(5, 2)])
    assert rep.dim_at_s == [0, 0, 1, 1] and rep.detected_gap == F(2)
    rep = slope_scan(2, 3, 8, grid)
    assert rep.dim_at_s == [0, 0, 2, 2, 2]
    assert "phi_vtilde^0" in rep.indices
    assert quotient_labels(2, 3, 8) == ["phi_vtilde^0", "phi_v^1"]


def test_slope_dims_monotone():
    grid = [F(1) + F(i, 8) for i in range(13)]
    dims = slope_scan(3, 5, F(1, 2), grid).dim_at_s
    assert dims == sorted(dims)


def test_rho_shadow_of_divergence():
    # below the index the rescaled terms blow up, at the index on a small disc they decay
    f = axis_series(2, 3, F(1, 2), 0, 300)
    rep = estimate_gevrey_index(f)
    fitted = rep.growth
    # logD from two fitted points far apart
    (_, n1, _, y1), (_, n2, _, y2) = fitted[0], fitted[-1]
    s = F(3, 2)
    slope = (y2 - y1 - 0.5 * (math.lgamma(n2 + 1) - math.lgamma(n1 + 1))) / (n2 - n1)
    x2 = 0.5 * math.exp(-slope)
    at = rho_log_terms(f, s, 1.0, x2)
    assert at[-1] < at[len(at) // 2]
    below = rho_log_terms(f, F(5, 4), 1.0, x2)
    assert below[-1] > below[len(below) // 2]
