"""Operators of the second Weyl algebra, stored in normal order.

A :class:`DiffOperator` is a finite sum of monomials ``c * x^xexp * d^dexp``
with every ``x`` to the left of every ``d``.  Composition re-normalises
eagerly, so two operators are equal exactly when their monomial maps are.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, gcd
from typing import Mapping

from .errors import BadMatrix, ParseError
from .series import SparseSeries, falling, frac


@dataclass(frozen=True)
class DiffOperator:
    # {(xexp, dexp): coeff} with xexp, dexp natural pairs
    monomials: Mapping = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for (x, d), c in self.monomials.items():
            c = frac(c)
            if c != 0:
                clean[(tuple(int(t) for t in x), tuple(int(t) for t in d))] = c
        object.__setattr__(self, "monomials", clean)

    @classmethod
    def scalar(cls, c) -> "DiffOperator":
        return cls({((0, 0), (0, 0)): c})

    @classmethod
    def term(cls, c, xexp=(0, 0), dexp=(0, 0)) -> "DiffOperator":
        return cls({(tuple(xexp), tuple(dexp)): c})

    def __add__(self, other) -> "DiffOperator":
        if not isinstance(other, DiffOperator):
            other = DiffOperator.scalar(other)
        acc = dict(self.monomials)
        for k, c in other.monomials.items():
            acc[k] = acc.get(k, 0) + c
        return DiffOperator(acc)

    __radd__ = __add__

    def __neg__(self) -> "DiffOperator":
        return DiffOperator({k: -c for k, c in self.monomials.items()})

    def __sub__(self, other) -> "DiffOperator":
        if not isinstance(other, DiffOperator):
            other = DiffOperator.scalar(other)
        return self + (-other)

    def __mul__(self, other) -> "DiffOperator":
        if isinstance(other, DiffOperator):
            return compose(self, other)
        c = frac(other)
        return DiffOperator({k: c * v for k, v in self.monomials.items()})

    def __rmul__(self, other) -> "DiffOperator":
        c = frac(other)
        return DiffOperator({k: c * v for k, v in self.monomials.items()})

    def is_zero(self) -> bool:
        return not self.monomials

    def shifts(self) -> list:
        return [(x, d) for (x, d) in self.monomials]

    def __str__(self) -> str:
        return render(self)


def check_matrix(a: int, b: int) -> None:
    if not (isinstance(a, int) and isinstance(b, int)):
        raise BadMatrix("a and b must be integers")
    if a <= 0 or b <= a:
        raise BadMatrix(f"need 0 < a < b, got A=({a} {b})")
    if gcd(a, b) != 1:
        raise BadMatrix(f"gcd({a}, {b}) = {gcd(a, b)} != 1")


def hypergeometric_ops(a: int, b: int, beta) -> tuple:
    """The toric operator ``d1^b - d2^a`` and the Euler operator ``E_A(beta)``."""
    check_matrix(a, b)
    P = DiffOperator({((0, 0), (b, 0)): 1, ((0, 0), (0, a)): -1})
    return P, euler(a, b, beta)


def euler(a: int, b: int, beta) -> DiffOperator:
    return DiffOperator({((1, 0), (1, 0)): a, ((0, 1), (0, 1)): b, ((0, 0), (0, 0)): -frac(beta)})


def euler_at_point(a: int, b: int, beta, epsilon) -> DiffOperator:
    """E_A(beta) written in the local coordinates (t1, x2), x1 = t1 + epsilon."""
    eps = frac(epsilon)
    return euler(a, b, beta) + DiffOperator.term(a * eps, (0, 0), (1, 0))


def apply(D: DiffOperator, f: SparseSeries) -> SparseSeries:
    """Exact image D(f); the result only reports fully determined coefficients.

    Exponents may be rational: d1 acts on x1^g as g * x1^(g-1).
    """
    out: dict = {}
    for (x, d), c in D.monomials.items():
        for (e1, e2), v in f.terms.items():
            k = c * v * falling(e1, d[0]) * falling(e2, d[1])
            if k == 0:
                continue
            key = (e1 - d[0] + x[0], e2 - d[1] + x[1])
            out[key] = out.get(key, 0) + k
    return SparseSeries(out, f.trunc.shifted(D.shifts()))


def _monomial_product(x1, d1, x2, d2) -> dict:
    """Normal-ordered expansion of (x^x1 d^d1)(x^x2 d^d2) as {(xexp, dexp): int}."""
    per_coord = []
    for i in range(2):
        opts = []
        for k in range(min(d1[i], x2[i]) + 1):
            # d^p x^q = sum_k C(p,k) q!/(q-k)! x^(q-k) d^(p-k)
            c = comb(d1[i], k) * math.perm(x2[i], k)
            opts.append((x1[i] + x2[i] - k, d1[i] - k + d2[i], c))
        per_coord.append(opts)
    res: dict = {}
    for xa, da, ca in per_coord[0]:
        for xb, db, cb in per_coord[1]:
            key = ((xa, xb), (da, db))
            res[key] = res.get(key, 0) + ca * cb
    return res


def compose(D1: DiffOperator, D2: DiffOperator) -> DiffOperator:
    """Normal-ordered product D1 o D2."""
    acc: dict = {}
    for (x1, d1), c1 in D1.monomials.items():
        for (x2, d2), c2 in D2.monomials.items():
            for key, c in _monomial_product(x1, d1, x2, d2).items():
                acc[key] = acc.get(key, 0) + c1 * c2 * c
    return DiffOperator(acc)


@dataclass(frozen=True)
class WeightVector:
    """Weights of (d1, d2); x_i carries weight -w_i."""

    w: tuple

    def weight(self, xexp, dexp) -> Fraction:
        w1, w2 = (frac(t) for t in self.w)
        return (dexp[0] - xexp[0]) * w1 + (dexp[1] - xexp[1]) * w2


def initial_form(D: DiffOperator, w: WeightVector) -> DiffOperator:
    if D.is_zero():
        return D
    weights = {k: w.weight(*k) for k in D.monomials}
    top = max(weights.values())
    return DiffOperator({k: c for k, c in D.monomials.items() if weights[k] == top})


def _render_monomial(x, d, c: Fraction, first: bool) -> str:
    factors = []
    for name, e in (("x1", x[0]), ("x2", x[1]), ("d1", d[0]), ("d2", d[1])):
        if e == 1:
            factors.append(name)
        elif e > 1:
            factors.append(f"{name}^{e}")
    mag = abs(c)
    sign = "-" if c < 0 else "+"
    if factors:
        body = "*".join(factors) if mag == 1 else f"{mag}*" + "*".join(factors)
    else:
        body = str(mag)
    if first:
        return ("-" if c < 0 else "") + body
    return f" {sign} {body}"


def render(D: DiffOperator) -> str:
    """Text form such as ``2*x1*d1 + 3*x2*d2 - 1/2``."""
    if D.is_zero():
        return "0"
    order = sorted(
        D.monomials.items(),
        key=lambda kv: (-(sum(kv[0][1])), -(sum(kv[0][0])), [-t for t in kv[0][0] + kv[0][1]]),
    )
    return "".join(_render_monomial(x, d, c, i == 0) for i, ((x, d), c) in enumerate(order))


_TERM_RE = re.compile(r"\s*([+-])?\s*([^+-]+)")
_FACTOR_RE = re.compile(r"^(x1|x2|d1|d2)(?:\^(\d+))?$")


def parse_operator(text: str) -> DiffOperator:
    """Inverse of :func:`render` (normal-ordered monomials only)."""
    s = text.strip()
    if s == "0":
        return DiffOperator()
    pos = 0
    acc = DiffOperator()
    first = True
    while pos < len(s):
        m = _TERM_RE.match(s, pos)
        if not m or m.end() == pos:
            raise ParseError(f"cannot parse operator near {s[pos:]!r}", column=pos + 1)
        sign, body = m.group(1), m.group(2).strip()
        if sign is None and not first:
            raise ParseError("missing operator between terms", column=pos + 1)
        coeff = Fraction(-1 if sign == "-" else 1)
        x = [0, 0]
        d = [0, 0]
        for factor in body.split("*"):
            factor = factor.strip()
            fm = _FACTOR_RE.match(factor)
            if fm:
                e = int(fm.group(2) or 1)
                name = fm.group(1)
                slot = x if name[0] == "x" else d
                slot[int(name[1]) - 1] += e
                continue
            try:
                coeff *= Fraction(factor)
            except ValueError:
                raise ParseError(f"bad factor {factor!r}", column=pos + 1) from None
        acc = acc + DiffOperator.term(coeff, tuple(x), tuple(d))
        pos = m.end()
        first = False
    return acc
