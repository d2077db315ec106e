"""Line-oriented problem files.

    # comments and blank lines are ignored
    A = 2 3
    beta = 1/2
    point = 1          # epsilon of p = (eps, 0), or "origin"
    s = 1, 5/4, 3/2, inf
    M = 100
    box = 24 24

Numbers are integers or fractions; decimals are refused so that the exact
pipeline stays exact.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, inf

from .errors import ConstraintError, ParseError

DEFAULT_M = 100
DEFAULT_BOX = (24, 24)
DEFAULT_EPSILON = Fraction(1)
DEFAULT_S = (Fraction(1), Fraction(9, 8), Fraction(5, 4), Fraction(11, 8),
             Fraction(3, 2), Fraction(7, 4), Fraction(2))

_RATIONAL = re.compile(r"[+-]?\d+(?:/\d+)?$")
_INT = re.compile(r"[+-]?\d+$")
KEYS = ("A", "beta", "point", "s", "M", "box")


@dataclass(frozen=True)
class ProblemSpec:
    a: int
    b: int
    beta: Fraction
    point: Fraction | None = DEFAULT_EPSILON  # None is the origin
    s_values: tuple = DEFAULT_S
    M: int = DEFAULT_M
    box: tuple = DEFAULT_BOX

    def to_json(self) -> dict:
        return {
            "A": [self.a, self.b],
            "beta": str(self.beta),
            "point": "origin" if self.point is None else str(self.point),
            "s": ["inf" if s == inf else str(s) for s in self.s_values],
            "M": self.M,
            "box": list(self.box),
        }


def _tokens(value: str, offset: int) -> list:
    """(token, 1-based column) pairs of a whitespace/comma separated value."""
    return [(m.group(), offset + m.start() + 1) for m in re.finditer(r"[^\s,]+", value)]


def _rational(tok: str, line: int, col: int) -> Fraction:
    if not _RATIONAL.match(tok):
        raise ParseError(f"{tok!r} is not an integer or fraction (decimals are not accepted)", line, col)
    if "/" in tok and int(tok.split("/")[1]) == 0:
        raise ParseError("zero denominator", line, col)
    return Fraction(tok)


def _integer(tok: str, line: int, col: int) -> int:
    if not _INT.match(tok):
        raise ParseError(f"{tok!r} is not an integer", line, col)
    return int(tok)


def _count(toks, n, key, line):
    if len(toks) != n:
        col = toks[n][1] if len(toks) > n else None
        raise ParseError(f"{key} takes {n} value(s), got {len(toks)}", line, col)


def check_A(a: int, b: int) -> None:
    if a <= 0 or b <= a:
        raise ConstraintError("ordering", f"need 0 < a < b, got A = {a} {b}")
    if gcd(a, b) != 1:
        raise ConstraintError("gcd", f"gcd({a}, {b}) = {gcd(a, b)}, need 1")


def parse_problem(text: str) -> ProblemSpec:
    seen: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        if "=" not in line:
            raise ParseError("expected 'key = value'", lineno, len(line) - len(line.lstrip()) + 1)
        key_part, value = line.split("=", 1)
        key = key_part.strip()
        key_col = len(key_part) - len(key_part.lstrip()) + 1
        if key not in KEYS:
            raise ParseError(f"unknown key {key!r}", lineno, key_col)
        if key in seen:
            raise ParseError(f"duplicate key {key!r}", lineno, key_col)
        toks = _tokens(value, len(key_part) + 1)
        if not toks:
            raise ParseError(f"missing value for {key}", lineno, len(line) + 1)
        if key == "A":
            _count(toks, 2, key, lineno)
            a, b = (_integer(t, lineno, c) for t, c in toks)
            check_A(a, b)
            seen[key] = (a, b)
        elif key == "beta":
            _count(toks, 1, key, lineno)
            seen[key] = _rational(toks[0][0], lineno, toks[0][1])
        elif key == "point":
            _count(toks, 1, key, lineno)
            tok, col = toks[0]
            if tok == "origin":
                seen[key] = None
            else:
                eps = _rational(tok, lineno, col)
                if eps == 0:
                    raise ConstraintError("nonzero-epsilon", "a point of Y minus the origin needs epsilon != 0; use 'origin'")
                seen[key] = eps
        elif key == "s":
            vals = []
            for tok, col in toks:
                if tok in ("inf", "oo"):
                    vals.append(inf)
                    continue
                s = _rational(tok, lineno, col)
                if s < 1:
                    raise ConstraintError("s-range", f"Gevrey order {s} is below 1")
                vals.append(s)
            if vals != sorted(vals) or len(set(vals)) != len(vals):
                raise ConstraintError("s-ascending", "s values must be strictly increasing")
            seen[key] = tuple(vals)
        elif key == "M":
            _count(toks, 1, key, lineno)
            M = _integer(toks[0][0], lineno, toks[0][1])
            if M < 1:
                raise ConstraintError("positive-M", f"M = {M}, need M >= 1")
            seen[key] = M
        elif key == "box":
            _count(toks, 2, key, lineno)
            n1, n2 = (_integer(t, lineno, c) for t, c in toks)
            if n1 < 1 or n2 < 1:
                raise ConstraintError("box", f"box sizes must be positive, got {n1} {n2}")
            seen[key] = (n1, n2)
    for required in ("A", "beta"):
        if required not in seen:
            raise ParseError(f"missing required key {required!r}")
    a, b = seen["A"]
    return ProblemSpec(
        a, b, seen["beta"],
        point=seen.get("point", DEFAULT_EPSILON),
        s_values=seen.get("s", DEFAULT_S),
        M=seen.get("M", DEFAULT_M),
        box=seen.get("box", DEFAULT_BOX),
    )


def render_problem(spec: ProblemSpec) -> str:
    s = ", ".join("inf" if v == inf else str(v) for v in spec.s_values)
    point = "origin" if spec.point is None else str(spec.point)
    return (
        f"A = {spec.a} {spec.b}\n"
        f"beta = {spec.beta}\n"
        f"point = {point}\n"
        f"s = {s}\n"
        f"M = {spec.M}\n"
        f"box = {spec.box[0]} {spec.box[1]}\n"
    )
