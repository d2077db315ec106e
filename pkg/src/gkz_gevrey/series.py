"""Exact sparse bivariate series with rational exponents.

A :class:`SparseSeries` is a finite map from exponent pairs ``(e1, e2)`` to
:class:`fractions.Fraction` coefficients together with a
:class:`TruncationSpec` that records which coefficients are *known*.
Everything outside the truncation's unknown set is a known coefficient
(possibly zero); a missing key inside the known region means zero.

Three truncation kinds are used:

``box``
    natural exponents with ``e1 <= n1`` and ``e2 <= n2`` are known, larger
    natural exponents are unknown, everything else is known to vanish.
``ray``
    a finite union of rays ``{base + m*u : m > M}`` is unknown; the
    direction ``u`` is shared by all rays of one series.
``exact``
    nothing is unknown (finite polynomial / Laurent polynomial data).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import IncompatibleTruncation

Exponent = tuple  # (Fraction, Fraction)


def frac(x) -> Fraction:
    """Coerce ``x`` to an exact Fraction; floats are refused."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"expected an exact rational, got {type(x).__name__}")


def exponent(e1, e2) -> Exponent:
    return (frac(e1), frac(e2))


def is_natural(q: Fraction) -> bool:
    return q.denominator == 1 and q >= 0


def falling(z: Fraction, n: int) -> Fraction:
    """Descending product z (z-1) ... (z-n+1); the empty product is 1."""
    out = Fraction(1)
    for j in range(n):
        out *= z - j
        if out == 0:
            return out
    return out


@dataclass(frozen=True)
class Ray:
    """Unknown set ``{base + m*u : m > M}`` (``u`` lives on the spec)."""

    base: Exponent
    M: int

    def first_unknown(self, u) -> Exponent:
        return (self.base[0] + (self.M + 1) * u[0], self.base[1] + (self.M + 1) * u[1])


def _ray_offset(d: Exponent, u) -> int | None:
    """Integer t with d == t*u, or None."""
    if u[0] != 0:
        t = d[0] / u[0]
    else:
        t = d[1] / u[1]
    if t.denominator != 1 or d[0] != t * u[0] or d[1] != t * u[1]:
        return None
    return int(t)


def _merge_rays(rays: Iterable[Ray], u) -> tuple:
    kept: list[Ray] = []
    for ray in rays:
        f = ray.first_unknown(u)
        for i, other in enumerate(kept):
            g = other.first_unknown(u)
            t = _ray_offset((f[0] - g[0], f[1] - g[1]), u)
            if t is None:
                continue
            if t < 0:
                kept[i] = ray
            break
        else:
            kept.append(ray)
    kept.sort(key=lambda r: (r.base[1], r.base[0], r.M))
    return tuple(kept)


@dataclass(frozen=True)
class TruncationSpec:
    kind: str
    n1: int | None = None
    n2: int | None = None
    u: tuple | None = None
    rays: tuple = ()

    @classmethod
    def box(cls, n1: int, n2: int) -> "TruncationSpec":
        return cls("box", n1=int(n1), n2=int(n2))

    @classmethod
    def ray(cls, v, u, M: int) -> "TruncationSpec":
        u = (int(u[0]), int(u[1]))
        if u == (0, 0):
            raise ValueError("ray direction must be nonzero")
        return cls("ray", u=u, rays=(Ray(exponent(*v), int(M)),))

    @classmethod
    def exact(cls) -> "TruncationSpec":
        return cls("exact")

    def contains(self, e: Exponent) -> bool:
        """True iff the coefficient at ``e`` is known."""
        if self.kind == "exact":
            return True
        if self.kind == "box":
            if is_natural(e[0]) and is_natural(e[1]):
                return e[0] <= self.n1 and e[1] <= self.n2
            return True
        for ray in self.rays:
            t = _ray_offset((e[0] - ray.base[0], e[1] - ray.base[1]), self.u)
            if t is not None and t > ray.M:
                return False
        return True

    def intersect(self, other: "TruncationSpec") -> "TruncationSpec":
        if self.kind == "exact":
            return other
        if other.kind == "exact":
            return self
        if self.kind != other.kind:
            raise IncompatibleTruncation(f"cannot combine {self.kind} and {other.kind} truncations")
        if self.kind == "box":
            return TruncationSpec.box(min(self.n1, other.n1), min(self.n2, other.n2))
        if self.u != other.u:
            raise IncompatibleTruncation(f"ray directions differ: {self.u} vs {other.u}")
        return TruncationSpec("ray", u=self.u, rays=_merge_rays(self.rays + other.rays, self.u))

    def shifted(self, shifts: Sequence[tuple]) -> "TruncationSpec":
        """Known region of ``D(f)`` where D has monomial shifts ``xexp - dexp``.

        ``shifts`` is a sequence of ``(xexp, dexp)`` natural pairs.
        """
        if self.kind == "exact" or not shifts:
            return self
        if self.kind == "box":
            n1 = min(self.n1 + x[0] - d[0] for x, d in shifts)
            n2 = min(self.n2 + x[1] - d[1] for x, d in shifts)
            return TruncationSpec.box(n1, n2)
        rays = []
        for ray in self.rays:
            for x, d in shifts:
                base = (ray.base[0] + x[0] - d[0], ray.base[1] + x[1] - d[1])
                rays.append(Ray(base, ray.M))
        return TruncationSpec("ray", u=self.u, rays=_merge_rays(rays, self.u))

    def to_json(self) -> dict:
        if self.kind == "exact":
            return {"kind": "exact"}
        if self.kind == "box":
            return {"kind": "box", "N1": self.n1, "N2": self.n2}
        return {
            "kind": "ray",
            "u": list(self.u),
            "rays": [{"v": [str(r.base[0]), str(r.base[1])], "M": r.M} for r in self.rays],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "TruncationSpec":
        kind = data["kind"]
        if kind == "exact":
            return cls.exact()
        if kind == "box":
            return cls.box(data["N1"], data["N2"])
        if kind == "ray":
            u = tuple(int(x) for x in data["u"])
            rays = tuple(Ray(exponent(*r["v"]), int(r["M"])) for r in data["rays"])
            return cls("ray", u=u, rays=_merge_rays(rays, u))
        raise ValueError(f"unknown truncation kind {kind!r}")


def _sort_key(e: Exponent):
    return (e[1], e[0])


@dataclass(frozen=True)
class SparseSeries:
    terms: Mapping = field(default_factory=dict)
    trunc: TruncationSpec = field(default_factory=TruncationSpec.exact)

    def __post_init__(self):
        clean = {}
        for e, c in self.terms.items():
            c = frac(c)
            if c == 0:
                continue
            e = exponent(*e)
            if not self.trunc.contains(e):
                continue
            clean[e] = c
        object.__setattr__(self, "terms", clean)

    @classmethod
    def monomial(cls, e1, e2, c=1, trunc: TruncationSpec | None = None) -> "SparseSeries":
        return cls({exponent(e1, e2): frac(c)}, trunc or TruncationSpec.exact())

    @classmethod
    def zero(cls, trunc: TruncationSpec | None = None) -> "SparseSeries":
        return cls({}, trunc or TruncationSpec.exact())

    def coeff(self, e) -> Fraction:
        return self.terms.get(exponent(*e), Fraction(0))

    def within(self, e) -> bool:
        return self.trunc.contains(exponent(*e))

    def is_zero(self) -> bool:
        """True iff every known coefficient vanishes."""
        return not self.terms

    def __len__(self) -> int:
        return len(self.terms)

    def sorted_terms(self) -> list:
        return sorted(self.terms.items(), key=lambda kv: _sort_key(kv[0]))

    def __add__(self, other: "SparseSeries") -> "SparseSeries":
        return linear_combine([(1, self), (1, other)])

    def __sub__(self, other: "SparseSeries") -> "SparseSeries":
        return linear_combine([(1, self), (-1, other)])

    def __neg__(self) -> "SparseSeries":
        return SparseSeries({e: -c for e, c in self.terms.items()}, self.trunc)

    def scale(self, c) -> "SparseSeries":
        c = frac(c)
        return SparseSeries({e: c * v for e, v in self.terms.items()}, self.trunc)

    def retruncate(self, trunc: TruncationSpec) -> "SparseSeries":
        """Restrict to a (smaller) known region."""
        return SparseSeries(self.terms, self.trunc.intersect(trunc))

    def to_float(self) -> "FloatSeries":
        return FloatSeries({e: float(c) for e, c in self.terms.items()}, self.trunc)

    def to_json(self) -> dict:
        return {
            "terms": [{"e1": str(e[0]), "e2": str(e[1]), "c": str(c)} for e, c in self.sorted_terms()],
            "trunc": self.trunc.to_json(),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    @classmethod
    def from_json(cls, data: Mapping) -> "SparseSeries":
        terms = {exponent(t["e1"], t["e2"]): frac(t["c"]) for t in data["terms"]}
        return cls(terms, TruncationSpec.from_json(data["trunc"]))

    @classmethod
    def loads(cls, text: str) -> "SparseSeries":
        return cls.from_json(json.loads(text))


@dataclass(frozen=True)
class FloatSeries:
    terms: Mapping = field(default_factory=dict)
    trunc: TruncationSpec = field(default_factory=TruncationSpec.exact)

    def __post_init__(self):
        for c in self.terms.values():
            if not math.isfinite(c):
                raise ValueError("FloatSeries coefficients must be finite")

    def coeff(self, e) -> float:
        return self.terms.get(exponent(*e), 0.0)


def linear_combine(pairs: Iterable[tuple]) -> SparseSeries:
    """Coefficient-wise sum of ``c * f`` over ``(c, f)`` pairs.

    The result is known only where every input is known.
    """
    pairs = list(pairs)
    trunc = TruncationSpec.exact()
    for _, f in pairs:
        trunc = trunc.intersect(f.trunc)
    acc: dict = {}
    for c, f in pairs:
        c = frac(c)
        if c == 0:
            continue
        for e, v in f.terms.items():
            acc[e] = acc.get(e, 0) + c * v
    return SparseSeries(acc, trunc)


def coeff_at(f: SparseSeries, e) -> Fraction:
    return f.coeff(e)


def within_truncation(f: SparseSeries, e) -> bool:
    return f.within(e)


def agree(f: SparseSeries, g: SparseSeries) -> bool:
    """Equality of coefficients on the common known region."""
    return linear_combine([(1, f), (-1, g)]).is_zero()
