"""Gamma-series solutions of the system for A = (a b).

Two families are built here:

* the generic family ``v^j = (j, (beta - j a)/b)``, ``j < b``, with lattice
  direction ``u = (b, -a)``; these converge off the axis ``x2 = 0``;
* the axis family ``v^k = ((beta - k b)/a, k)``, ``k < a``, with direction
  ``u = (-b, a)``; these are formal along ``x2 = 0`` and diverge with
  Gevrey index ``b/a`` unless they terminate.

When beta lies in ``aN + bN`` exactly one axis series is a polynomial and the
shifted series built from :func:`resonance_data` takes its place.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .series import SparseSeries, TruncationSpec, exponent, falling, frac, is_natural
from .weyl import check_matrix

AXIS = "axis"
GENERIC = "generic"


def pochhammer(z, alpha) -> Fraction:
    """Descending Pochhammer symbol of a pair: prod_i prod_{j<alpha_i} (z_i - j)."""
    out = Fraction(1)
    for zi, ai in zip(z, alpha):
        if ai > 0:
            out *= falling(frac(zi), int(ai))
    return out


def gamma_coeff(v, u) -> Fraction:
    """Gamma[v; u] = (v)_{u-} / (v+u)_{u+}, and 0 when the denominator vanishes."""
    v = exponent(*v)
    u_minus = tuple(max(-t, 0) for t in u)
    u_plus = tuple(max(t, 0) for t in u)
    den = pochhammer((v[0] + u[0], v[1] + u[1]), u_plus)
    if den == 0:
        return Fraction(0)
    return pochhammer(v, u_minus) / den


@dataclass(frozen=True)
class GammaSeriesSpec:
    v: tuple
    u: tuple
    M: int

    def check(self, a: int, b: int, beta) -> None:
        if a * self.v[0] + b * self.v[1] != frac(beta):
            raise ValueError(f"A v != beta for v={self.v}")
        if a * self.u[0] + b * self.u[1] != 0:
            raise ValueError(f"u={self.u} is not in ker(A)")


@dataclass(frozen=True)
class ResonanceData:
    q: int
    m0: int
    mprime: int
    vtilde: tuple


def exponents_generic(a: int, b: int, beta) -> list:
    check_matrix(a, b)
    beta = frac(beta)
    return [exponent(j, (beta - j * a) / b) for j in range(b)]


def exponents_along_Y(a: int, b: int, beta) -> list:
    check_matrix(a, b)
    beta = frac(beta)
    return [exponent((beta - k * b) / a, k) for k in range(a)]


def axis_direction(a: int, b: int) -> tuple:
    return (-b, a)


def generic_direction(a: int, b: int) -> tuple:
    return (b, -a)


def _step_ratio(v, u, m: int):
    """Gamma[v;(m+1)u] / Gamma[v;mu] as (numerator, denominator) products."""
    num = Fraction(1)
    den = Fraction(1)
    for vi, ui in zip(v, u):
        if ui < 0:
            num *= falling(vi + m * ui, -ui)
        elif ui > 0:
            den *= falling(vi + (m + 1) * ui, ui)
    return num, den


def gamma_ray_coefficients(v, u, M: int) -> list:
    """[Gamma[v; m u] for m = 0..M], generated by the one-step ratio.

    Once a coefficient vanishes every later one does too, since the
    descending products only gain factors as m grows.
    """
    v = exponent(*v)
    coeffs = [Fraction(1)]
    c = Fraction(1)
    for m in range(M):
        if c != 0:
            num, den = _step_ratio(v, u, m)
            c = Fraction(0) if den == 0 else c * num / den
        coeffs.append(c)
    return coeffs


def build_gamma_series(spec: GammaSeriesSpec) -> SparseSeries:
    v = exponent(*spec.v)
    u = spec.u
    coeffs = gamma_ray_coefficients(v, u, spec.M)
    terms = {(v[0] + m * u[0], v[1] + m * u[1]): c for m, c in enumerate(coeffs)}
    return SparseSeries(terms, TruncationSpec.ray(v, u, spec.M))


def axis_series(a: int, b: int, beta, k: int, M: int) -> SparseSeries:
    v = exponents_along_Y(a, b, beta)[k]
    return build_gamma_series(GammaSeriesSpec(v, axis_direction(a, b), M))


def generic_series(a: int, b: int, beta, j: int, M: int) -> SparseSeries:
    v = exponents_generic(a, b, beta)[j]
    return build_gamma_series(GammaSeriesSpec(v, generic_direction(a, b), M))


def resonance_data(a: int, b: int, beta):
    """ResonanceData when beta is in aN + bN, otherwise None."""
    check_matrix(a, b)
    beta = frac(beta)
    for q in range(a):
        m0 = (beta - q * b) / a
        if is_natural(m0):
            m0 = int(m0)
            mprime = m0 // b + 1  # least m' with b m' >= m0 + 1
            vtilde = exponent(m0 - b * mprime, q + a * mprime)
            return ResonanceData(q, m0, mprime, vtilde)
    return None


def is_polynomial_class(a: int, b: int, beta, k: int) -> bool:
    """phi_{v^k} terminates iff (beta - b k)/a is a natural number."""
    return is_natural((frac(beta) - b * k) / a)


def negative_support(w) -> frozenset:
    return frozenset(i for i, t in enumerate(w) if t.denominator == 1 and t < 0)


@dataclass(frozen=True)
class NegativeSupportScan:
    minimal: bool
    witness_m: int | None
    bound_hit: bool


def negative_support_scan(v, u, search_bound: int | None = None) -> NegativeSupportScan:
    """Scan lattice translates v + m u for a strictly smaller negative support."""
    v = exponent(*v)
    if search_bound is None:
        search_bound = 10 * max(abs(u[0]), abs(u[1]))
    ns = negative_support(v)
    if ns:
        for dist in range(1, search_bound + 1):
            for m in (-dist, dist):
                w = (v[0] + m * u[0], v[1] + m * u[1])
                if negative_support(w) < ns:
                    return NegativeSupportScan(False, m, False)
    # an empty negative support is trivially minimal, no scan needed
    return NegativeSupportScan(True, None, bool(ns))


def minimal_negative_support(v, u, search_bound: int | None = None) -> bool:
    return negative_support_scan(v, u, search_bound).minimal


def build_vtilde_series(rd: ResonanceData, a: int, b: int, beta, M: int) -> SparseSeries:
    """phi over the re-based exponent vtilde: sum_{m=0..M} Gamma[vtilde; m u] x^(vtilde + m u).

    The terms are counted from vtilde itself, so the leading coefficient is 1.
    """
    check_matrix(a, b)
    if a * rd.vtilde[0] + b * rd.vtilde[1] != frac(beta):
        raise ValueError("resonance data does not match beta")
    return build_gamma_series(GammaSeriesSpec(rd.vtilde, axis_direction(a, b), M))


def ray_coefficients(f: SparseSeries, v, u, M: int) -> list:
    """Coefficients of f along v + m u, m = 0..M."""
    v = exponent(*v)
    return [f.coeff((v[0] + m * u[0], v[1] + m * u[1])) for m in range(M + 1)]
