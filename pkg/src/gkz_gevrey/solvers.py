"""Constructive solves behind the dimension theorems.

At the origin the Euler operator acts diagonally on monomials, so it is
inverted term by term away from the weight-beta stratum, and ``P`` is solved
on that stratum by finite linear algebra.  At a point ``p = (eps, 0)`` the
local Euler operator is triangular in the ``t1`` direction.  Along a residue
class ``k`` the equation ``P(h) = f`` with ``E(h) = 0`` reduces to a
first-order recurrence in the ray index, and the obstruction to a Gevrey
solution of low order is the scalar ``lambda_k``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import (
    IncompatibleTruncation,
    NonGevreyInput,
    NonNaturalExponent,
    NotInTargetStratum,
    ResonantClass,
    ResonantTerm,
)
from .gamma import axis_direction, gamma_ray_coefficients, pochhammer, resonance_data
from .linalg import solve
from .series import SparseSeries, TruncationSpec, exponent, falling, frac, is_natural
from .weyl import check_matrix


@dataclass(frozen=True)
class BasePoint:
    epsilon: Fraction

    def __post_init__(self):
        eps = frac(self.epsilon)
        if eps == 0:
            raise ValueError("a base point on Y needs epsilon != 0")
        object.__setattr__(self, "epsilon", eps)


@dataclass(frozen=True)
class ResidueClassSeries:
    """Coefficients ``coeffs[m]`` of ``x1^(gamma_k - b m) x2^(k + a m)``."""

    k: int
    gamma_k: Fraction
    coeffs: tuple = ()

    def __post_init__(self):
        if self.k < 0:
            raise ValueError("residue class index must be natural")
        object.__setattr__(self, "gamma_k", frac(self.gamma_k))
        object.__setattr__(self, "coeffs", tuple(frac(c) for c in self.coeffs))

    def coeff(self, m: int) -> Fraction:
        # past the stored data the input is taken to vanish
        return self.coeffs[m] if m < len(self.coeffs) else Fraction(0)

    def exponent(self, m: int, a: int, b: int) -> tuple:
        return exponent(self.gamma_k - b * m, self.k + a * m)

    def to_series(self, a: int, b: int, M: int | None = None) -> SparseSeries:
        """Ray-truncated series known through index M (default: the stored data)."""
        M = len(self.coeffs) - 1 if M is None else M
        terms = {self.exponent(m, a, b): c for m, c in enumerate(self.coeffs[: M + 1])}
        v = self.exponent(0, a, b)
        return SparseSeries(terms, TruncationSpec.ray(v, axis_direction(a, b), M))


def residue_classes_of(f: SparseSeries, a: int, b: int, beta, M: int) -> dict:
    """Split a series solving ``(E + ab) f = 0`` into its ``a`` residue classes.

    Class ``k`` collects the coefficients of ``x1^((beta-bk)/a - b(m+1)) x2^(k+am)``.
    """
    beta = frac(beta)
    out = {}
    for k in range(a):
        g = (beta - b * k) / a - b
        coeffs = [f.coeff((g - b * m, k + a * m)) for m in range(M + 1)]
        out[k] = ResidueClassSeries(k, g, coeffs)
    return out


@dataclass
class LambdaResult:
    k: int
    value: float
    partial_sum_terms: int
    tail_bound: float
    # the partial sum as an exact rational; equal to lambda when tail_bound is 0
    exact_partial: Fraction = field(default=Fraction(0), repr=False)

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "lambda": self.value,
            "partial_sum_terms": self.partial_sum_terms,
            "tail_bound": self.tail_bound,
            "exact_partial": str(self.exact_partial),
        }


def _natural_exponents(f: SparseSeries) -> None:
    for e in f.terms:
        if not (is_natural(e[0]) and is_natural(e[1])):
            raise NonNaturalExponent(f"exponent {e} is not a natural pair")


def decompose_VW(f: SparseSeries, a: int, b: int, beta) -> tuple:
    """Split f into the part off the weight-beta stratum and the part on it."""
    check_matrix(a, b)
    _natural_exponents(f)
    beta = frac(beta)
    v_terms, w_terms = {}, {}
    for e, c in f.terms.items():
        (w_terms if a * e[0] + b * e[1] == beta else v_terms)[e] = c
    return SparseSeries(v_terms, f.trunc), SparseSeries(w_terms, f.trunc)


def invert_E_origin(g: SparseSeries, a: int, b: int, beta) -> SparseSeries:
    check_matrix(a, b)
    _natural_exponents(g)
    beta = frac(beta)
    out = {}
    for e, c in g.terms.items():
        w = a * e[0] + b * e[1] - beta
        if w == 0:
            raise ResonantTerm(f"term x^{e} has weight beta; E is not invertible there")
        out[e] = c / w
    return SparseSeries(out, g.trunc)


def weight_stratum(a: int, b: int, c) -> list:
    """Natural pairs alpha with a*alpha1 + b*alpha2 = c, ordered by alpha1."""
    c = frac(c)
    if c.denominator != 1 or c < 0:
        return []
    c = int(c)
    return [(i, (c - a * i) // b) for i in range(c // a + 1) if (c - a * i) % b == 0]


def surject_P_on_W(h2: SparseSeries, a: int, b: int, beta) -> SparseSeries:
    """g on the weight-beta stratum with P(g) = h2 (h2 on the weight beta-ab stratum)."""
    check_matrix(a, b)
    beta = frac(beta)
    target = beta - a * b
    for e, c in h2.terms.items():
        if not (is_natural(e[0]) and is_natural(e[1])) or a * e[0] + b * e[1] != target:
            raise NotInTargetStratum(f"term at {e} is not on the weight {target} stratum")
    rows_idx = {alpha: i for i, alpha in enumerate(weight_stratum(a, b, target))}
    cols = weight_stratum(a, b, beta)
    rows = [dict() for _ in rows_idx]
    for j, (p1, p2) in enumerate(cols):
        if p1 >= b:
            rows[rows_idx[(p1 - b, p2)]][j] = Fraction(math.perm(p1, b))
        if p2 >= a:
            r = rows[rows_idx[(p1, p2 - a)]]
            r[j] = r.get(j, 0) - math.perm(p2, a)
    rhs = [h2.coeff(alpha) for alpha in rows_idx]
    x = solve(rows, rhs, len(cols))
    if x is None:
        raise ArithmeticError("P is not onto the weight stratum; this contradicts the theory")
    return SparseSeries({exponent(*cols[j]): c for j, c in x.items()}, TruncationSpec.exact())


def to_t1_expansion(f: SparseSeries, p: BasePoint, box: TruncationSpec, factor_out=0) -> SparseSeries:
    """Rewrite f in (t1, x2) with x1 = t1 + eps, truncated to ``box``.

    Each x1-exponent ``e1`` must differ from ``factor_out`` by an integer; the
    common factor ``eps^factor_out`` is dropped so the result stays rational.
    The default ``factor_out = 0`` covers natural exponents.
    """
    if box.kind != "box":
        raise ValueError("target truncation must be a box")
    _check_expandable(f, box)
    eps = p.epsilon
    g0 = frac(factor_out)
    out: dict = {}
    for (e1, e2), c in f.terms.items():
        if not is_natural(e2):
            raise NonNaturalExponent(f"x2-exponent {e2} is not natural")
        if e2 > box.n2:
            continue
        shift = e1 - g0
        if shift.denominator != 1:
            raise NonNaturalExponent(f"x1-exponent {e1} is not {g0} plus an integer")
        scale = c * eps ** int(shift)
        # (t1 + eps)^e1 = eps^e1 * sum_i binom(e1, i) (t1/eps)^i
        for i in range(box.n1 + 1):
            bin_i = falling(e1, i) / math.factorial(i)
            if bin_i == 0:
                break
            key = (Fraction(i), e2)
            out[key] = out.get(key, 0) + scale * bin_i / eps**i
    return SparseSeries(out, box)


def _check_expandable(f: SparseSeries, box: TruncationSpec) -> None:
    t = f.trunc
    if t.kind == "exact":
        return
    if t.kind == "ray" and t.u[1] > 0:
        if all(r.first_unknown(t.u)[1] > box.n2 for r in t.rays):
            return
    raise IncompatibleTruncation("unknown x2-coefficients would leak into the t1-expansion box")


def solve_Ep_local(g: SparseSeries, p: BasePoint, a: int, b: int, beta, box: TruncationSpec,
                   seeds: dict | None = None) -> SparseSeries:
    """h with E_p(h) = g on the box, via the triangular t1-recurrence.

    ``seeds`` maps j to h_{0,j}; the default gauge is 0.  The output is known on
    ``box(N1 + 1, N2)``.
    """
    check_matrix(a, b)
    if box.kind != "box":
        raise ValueError("solve_Ep_local works on box truncations")
    _natural_exponents(g)
    beta = frac(beta)
    eps = p.epsilon
    seeds = seeds or {}
    out = {}
    for j in range(box.n2 + 1):
        h = frac(seeds.get(j, 0))
        if h != 0:
            out[(0, j)] = h
        for i in range(box.n1 + 1):
            h = (g.coeff((i, j)) - (a * i + b * j - beta) * h) / (a * eps * (i + 1))
            if h != 0:
                out[(i + 1, j)] = h
    return SparseSeries(out, TruncationSpec.box(box.n1 + 1, box.n2))


def _p_step_den(k: int, a: int, m: int) -> int:
    # (k + a(m+1))_a, a product of positive integers
    return math.perm(k + a * (m + 1), a)


def solve_P_class(f: ResidueClassSeries, a: int, b: int, M: int, seed=0) -> ResidueClassSeries:
    """One residue class of P(h) = f with E(h) = 0, h_0 = ``seed``, indices 0..M."""
    g = f.gamma_k + b
    h = [frac(seed)]
    for m in range(M):
        num = falling(g - b * m, b) * h[m] - f.coeff(m)
        h.append(num / _p_step_den(f.k, a, m))
    return ResidueClassSeries(f.k, g, h)


def solve_P_recurrence(f: dict, a: int, b: int, beta, p: BasePoint | None = None, M: int = 60,
                       seeds: dict | None = None) -> dict:
    """Class-by-class solve of P(h) = f, E(h) = 0 (seeds default to 0).

    ``f`` maps k to the class series of the right-hand side, whose base
    exponent must be ``(beta - bk)/a - b``.  The recurrence does not involve
    ``p``; the solution is a series in powers of ``x1 = t1 + eps``.
    """
    check_matrix(a, b)
    beta = frac(beta)
    seeds = seeds or {}
    out = {}
    for k in range(a):
        fk = f.get(k) or ResidueClassSeries(k, (beta - b * k) / a - b)
        if fk.k != k or fk.gamma_k != (beta - b * k) / a - b:
            raise ValueError(f"class {k} input is not supported on the weight beta - ab lattice")
        out[k] = solve_P_class(fk, a, b, M, seeds.get(k, 0))
    return out


def explicit_h(f: ResidueClassSeries, a: int, b: int, m: int) -> Fraction:
    """Closed form of h_{k+a(m+1)} for the zero seed (non-resonant classes)."""
    g = f.gamma_k + b
    k = f.k
    total = Fraction(0)
    for r in range(m + 1):
        total += math.factorial(k + a * r) * f.coeff(r) / falling(g, b * (r + 1))
    return -falling(g, b * (m + 1)) / math.factorial(k + a * (m + 1)) * total


def _lambda_checks(a: int, b: int, s) -> None:
    if s == math.inf or a * frac(s) >= b:
        raise NonGevreyInput(f"lambda needs a*s < b, got s={s}")


def _tail(terms: list, exhausted: bool) -> float:
    if exhausted:
        return 0.0
    nz = [t for t in terms if t != 0]
    if len(nz) < 2:
        return 0.0 if not nz else math.inf
    ratio = abs(nz[-1] / nz[-2])
    if ratio >= 1:
        return math.inf
    return float(abs(nz[-1]) * ratio / (1 - ratio))


def extract_lambda(f: ResidueClassSeries, k: int, a: int, b: int, beta, s, r_max: int) -> LambdaResult:
    """lambda_k = -sum_r (k+ar)! f_r / (k! ((beta-bk)/a)_{b(r+1)}), summed to r_max.

    The tail bound is zero when the input has no data past ``r_max`` and
    otherwise a geometric bound from the last two terms.
    """
    check_matrix(a, b)
    _lambda_checks(a, b, s)
    beta = frac(beta)
    g = (beta - b * k) / a
    if is_natural(g):
        raise ResonantClass(f"class {k} is resonant; use extract_lambda_resonant")
    terms = []
    poch = Fraction(1)  # (g)_{b(r+1)} once step r is done
    fact = Fraction(1)  # (k + a r)! / k!
    for r in range(r_max + 1):
        poch *= falling(g - b * r, b)
        assert poch != 0
        if r:
            fact *= math.perm(k + a * r, a)
        terms.append(fact * f.coeff(r) / poch)
    exact = -sum(terms, Fraction(0))
    exhausted = len(f.coeffs) <= r_max + 1
    return LambdaResult(k, float(exact), r_max + 1, _tail(terms, exhausted), exact)


def extract_lambda_resonant(f: ResidueClassSeries, a: int, b: int, beta, s, r_max: int) -> LambdaResult:
    """Obstruction for the resonant class q, measured against the modified series.

    With ``h`` gauged to zero up to ``m0 // b`` the solution from index ``m'``
    on is ``lambda * phi_vtilde`` plus a Gevrey-s remainder, where ``phi_vtilde``
    has coefficient 1 at index ``m'``.
    """
    check_matrix(a, b)
    _lambda_checks(a, b, s)
    rd = resonance_data(a, b, beta)
    if rd is None:
        raise ValueError("beta is not resonant")
    q, m0, mp = rd.q, rd.m0, rd.mprime
    c = gamma_ray_coefficients(rd.vtilde, axis_direction(a, b), max(r_max - mp, 0))
    terms = [-f.coeff(mp - 1) / _p_step_den(q, a, mp - 1)]
    for m in range(mp, r_max + 1):
        terms.append(-f.coeff(m) / (falling(Fraction(m0 - b * m), b) * c[m - mp]))
    exact = sum(terms, Fraction(0))
    exhausted = len(f.coeffs) <= r_max + 1
    return LambdaResult(q, float(exact), len(terms), _tail(terms[1:], exhausted), exact)


def spike(k: int, a: int, b: int, beta, r0: int, value=1) -> ResidueClassSeries:
    """Class-k right-hand side with the single coefficient f_{k+a r0} = value."""
    g = (frac(beta) - b * k) / a - b
    coeffs = [Fraction(0)] * (r0 + 1)
    coeffs[r0] = frac(value)
    return ResidueClassSeries(k, g, coeffs)


def spike_lambda_exact(k: int, a: int, b: int, beta, r0: int) -> Fraction:
    g = (frac(beta) - b * k) / a
    return -Fraction(math.factorial(k + a * r0), math.factorial(k)) / pochhammer((g,), (b * (r0 + 1),))
