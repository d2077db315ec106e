"""Acceptance criteria, one test per criterion.

Criterion 9 is implemented as stated and fails: the thresholds are only
crossed from m of about 148 on (generic ratios behave like 4/(27m), axis
ratios like 27m/4).  It is left failing on purpose.
"""

import cmath
import math
import random
import time
from fractions import Fraction as F

from gkz_gevrey.ext_oracle import (
    MAX_FIT_RESIDUAL,
    ORIGIN,
    TARGET_O,
    TARGET_Q,
    compare_oracle_vs_theory,
    jet_kernel_dim,
    monodromy_eigenvalues,
    predicted_ext_table,
    solution_complex_maps,
)
from gkz_gevrey.gamma import (
    axis_direction,
    axis_series,
    build_vtilde_series,
    gamma_coeff,
    generic_series,
    resonance_data,
)
from gkz_gevrey.gevrey import (
    GEVREY,
    estimate_from_points,
    estimate_gevrey_index,
    ratio_sequence,
    slope_scan,
)
from gkz_gevrey.problem import DEFAULT_S
from gkz_gevrey.series import TruncationSpec, agree
from gkz_gevrey.solvers import (
    BasePoint,
    ResidueClassSeries,
    explicit_h,
    extract_lambda,
    solve_P_class,
    solve_P_recurrence,
    spike,
    spike_lambda_exact,
    to_t1_expansion,
)
from gkz_gevrey.weyl import DiffOperator, apply, compose, euler_at_point, hypergeometric_ops


def test_criterion_1_annihilation():
    t0 = time.perf_counter()
    for beta in (F(1, 2), F(8)):
        P, E = hypergeometric_ops(2, 3, beta)
        family = [axis_series(2, 3, beta, k, 50) for k in range(2)]
        family += [generic_series(2, 3, beta, j, 50) for j in range(3)]
        for f in family:
            assert apply(P, f).is_zero()
            assert apply(E, f).is_zero()
    assert time.perf_counter() - t0 < 10


def test_criterion_2_commutation():
    rng = random.Random(20261018)
    done = 0
    while done < 20:
        a, b = sorted(rng.sample(range(1, 8), 2))
        if math.gcd(a, b) != 1:
            continue
        beta = F(rng.randint(-50, 50), rng.randint(1, 12))
        P, E = hypergeometric_ops(a, b, beta)
        assert compose(P, E) == compose(E + DiffOperator.scalar(a * b), P)
        done += 1


def test_criterion_3_gevrey_index():
    t0 = time.perf_counter()
    for (a, b), beta in [((1, 2), F(1, 3)), ((2, 3), F(1, 2)), ((3, 5), F(1, 2))]:
        assert resonance_data(a, b, beta) is None
        for k in range(a):
            rep = estimate_gevrey_index(axis_series(a, b, beta, k, 300))
            assert rep.classification == GEVREY
            assert abs(rep.estimated_index - b / a) <= 0.05, (a, b, k, rep.estimated_index)
        grid = list(DEFAULT_S)
        nearest = min(grid, key=lambda s: (abs(s - F(b, a)), s))
        assert slope_scan(a, b, beta, grid, M=300).detected_gap == nearest
    assert time.perf_counter() - t0 < 30


def test_criterion_4_resonant_case():
    a, b, beta = 2, 3, F(8)
    P, E = hypergeometric_ops(a, b, beta)
    phi = axis_series(a, b, beta, 0, 50)
    assert len(phi) == 2
    rd = resonance_data(a, b, beta)
    assert (rd.q, rd.m0, rd.mprime, rd.vtilde) == (0, 4, 2, (F(-2), F(4)))
    vt = build_vtilde_series(rd, a, b, beta, 50)
    assert len(apply(P, vt)) == 1
    assert apply(E, vt).is_zero()


def _random_class(rng, k, a, b, beta, M):
    g = (beta - b * k) / a - b
    n = rng.randint(1, M)
    coeffs = [F(rng.randint(-9, 9), rng.randint(1, 9)) if rng.random() < 0.5 else F(0) for _ in range(n)]
    return ResidueClassSeries(k, g, coeffs)


def test_criterion_5_recurrence_round_trip():
    rng = random.Random(5)
    cases = [(2, 3, F(1, 2)), (1, 2, F(1, 3)), (3, 5, F(-7, 5)), (2, 5, F(3, 7))]
    M = 60
    for trial in range(20):
        a, b, beta = cases[trial % len(cases)]
        eps = F(rng.choice([1, -2, 3]), rng.choice([1, 2, 5]))
        P, E = hypergeometric_ops(a, b, beta)
        Ep = euler_at_point(a, b, beta, eps)
        f = {k: _random_class(rng, k, a, b, beta, M) for k in range(a)}
        h = solve_P_recurrence(f, a, b, beta, BasePoint(eps), M=M)
        for k in range(a):
            hs = h[k].to_series(a, b)
            assert agree(apply(P, hs), f[k].to_series(a, b, M - 1))
            assert apply(E, hs).is_zero()
            # E_p in the local coordinate t1 = x1 - eps, on a box the ray fully covers
            jet = to_t1_expansion(hs, BasePoint(eps), TruncationSpec.box(12, 30), factor_out=h[k].gamma_k)
            assert apply(Ep, jet).is_zero()
    # unit seed reproduces Gamma coefficients
    for a, b, beta in cases:
        u = axis_direction(a, b)
        for k in range(a):
            g = (beta - b * k) / a
            hom = solve_P_class(ResidueClassSeries(k, g - b), a, b, 10, seed=1)
            assert list(hom.coeffs) == [gamma_coeff((g, k), (m * u[0], m * u[1])) for m in range(11)]
    # closed form against the iterated recurrence
    for a, b, beta in cases:
        for k in range(a):
            fk = _random_class(random.Random(k), k, a, b, beta, 9)
            it = solve_P_class(fk, a, b, 9)
            for m in range(9):
                assert explicit_h(fk, a, b, m) == it.coeffs[m + 1]


def test_criterion_6_lambda_extraction():
    for a, b, beta in [(2, 3, F(1, 2)), (1, 2, F(1, 3)), (3, 5, F(1, 2))]:
        u = axis_direction(a, b)
        for k in range(a):
            for r0 in (0, 1, 3, 7):
                lam = extract_lambda(spike(k, a, b, beta, r0), k, a, b, beta, 1, 40)
                exact = spike_lambda_exact(k, a, b, beta, r0)
                assert abs(lam.value - float(exact)) <= 1e-10 * abs(float(exact))
            f = spike(k, a, b, beta, 0)
            lam = extract_lambda(f, k, a, b, beta, 1, 200)
            h = solve_P_class(f, a, b, 200)
            phi = [gamma_coeff((h.gamma_k, k), (m * u[0], m * u[1])) for m in range(201)]
            diff = [(m, h.coeffs[m] - lam.exact_partial * phi[m]) for m in range(201)]
            rep = estimate_from_points(diff, lambda m: k + a * m)
            assert rep.estimated_index <= 1 + 0.1, (a, b, k, rep.label)
            assert rep.fit_residual <= MAX_FIT_RESIDUAL


def test_criterion_7_dimension_oracle():
    t0 = time.perf_counter()
    grid = list(DEFAULT_S) + [math.inf]
    for a, b, beta in [(2, 3, F(1, 2)), (2, 3, F(8)), (1, 2, F(5))]:
        d24 = jet_kernel_dim(solution_complex_maps(a, b, beta, 1, (24, 24)))
        d48 = jet_kernel_dim(solution_complex_maps(a, b, beta, 1, (48, 48)))
        assert d24 == d48 == a
        for point in (ORIGIN, 1):
            for target in (TARGET_Q, TARGET_O):
                for s in grid:
                    table = compare_oracle_vs_theory(a, b, beta, point, s, target=target)
                    assert table.status == "MATCH", table.to_json()
        for s in grid:
            assert predicted_ext_table(a, b, beta, ORIGIN, s, TARGET_Q).predicted == {0: 0, 1: 0, 2: 0}
    assert time.perf_counter() - t0 < 60


def test_criterion_8_monodromy():
    for a, b, beta in [(2, 3, F(1, 2)), (2, 3, F(8)), (3, 5, F(-7, 3)), (1, 2, F(5)), (4, 7, F(13))]:
        eig = monodromy_eigenvalues(a, b, beta).eigenvalues
        for k, z in enumerate(eig):
            want = cmath.exp(2j * math.pi * float((beta - b * k) / a))
            assert abs(z - want) <= 1e-12
        if beta.denominator == 1:
            assert sum(1 for z in eig if abs(z - 1) <= 1e-12) == 1


def test_criterion_9_ratio_test():
    M = 100
    for beta in (F(1, 2), F(-7, 5)):
        for j in range(3):
            r = ratio_sequence(generic_series(2, 3, beta, j, M))
            assert r[-1] < 1e-3, ("generic", beta, j, r[-1])
        for k in range(2):
            r = ratio_sequence(axis_series(2, 3, beta, k, M))
            assert r[-1] > 1e3, ("axis", beta, k, r[-1])
