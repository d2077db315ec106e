"""Sparse Gaussian elimination over the rationals.

Rows are ``{column: Fraction}`` dicts.  Elimination follows a caller-chosen
column order and picks, for each column, the shortest row containing it;
with a good order the triangular structure of the jet systems survives and
fill-in stays small.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence


@dataclass
class Echelon:
    ncols: int
    pivots: list  # [(column, normalised row)] in elimination order
    free: list
    leftover: list  # nonzero rows that found no pivot (only rhs entries remain)

    @property
    def rank(self) -> int:
        return len(self.pivots)


def echelon(rows: Iterable[dict], ncols: int, col_order: Sequence[int] | None = None) -> Echelon:
    active: dict = {}
    where: dict = {}
    for i, row in enumerate(rows):
        row = {c: Fraction(v) for c, v in row.items() if v != 0}
        if not row:
            continue
        active[i] = row
        for c in row:
            where.setdefault(c, set()).add(i)
    order = list(range(ncols)) if col_order is None else list(col_order)
    pivots = []
    free = []
    for col in order:
        cands = where.get(col)
        if not cands:
            free.append(col)
            continue
        piv_i = min(cands, key=lambda i: (len(active[i]), i))
        prow = active.pop(piv_i)
        for c in prow:
            where[c].discard(piv_i)
        inv = 1 / prow[col]
        prow = {c: v * inv for c, v in prow.items()}
        for i in list(where.get(col, ())):
            row = active[i]
            factor = row[col]
            for c, v in prow.items():
                nv = row.get(c, 0) - factor * v
                if nv == 0:
                    if c in row:
                        del row[c]
                        where[c].discard(i)
                else:
                    if c not in row:
                        where.setdefault(c, set()).add(i)
                    row[c] = nv
            if not row:
                del active[i]
        pivots.append((col, prow))
    leftover = [row for row in active.values() if row]
    return Echelon(ncols, pivots, free, leftover)


def rank(rows: Iterable[dict], ncols: int, col_order=None) -> int:
    return echelon(rows, ncols, col_order).rank


def nullspace(rows: Iterable[dict], ncols: int, col_order=None) -> list:
    """A basis of {x : row . x = 0 for every row}, as sparse dicts."""
    ech = echelon(rows, ncols, col_order)
    basis = []
    for f in ech.free:
        x = {f: Fraction(1)}
        for col, prow in reversed(ech.pivots):
            s = sum(v * x[c] for c, v in prow.items() if c != col and c in x)
            if s != 0:
                x[col] = -s
        basis.append(x)
    return basis


def solve(rows: Sequence[dict], rhs: Sequence, ncols: int, col_order=None):
    """One solution of rows . x = rhs (free variables set to 0), or None."""
    aug = []
    for row, r in zip(rows, rhs):
        row = dict(row)
        if r != 0:
            row[ncols] = Fraction(r)
        aug.append(row)
    order = list(range(ncols)) if col_order is None else list(col_order)
    ech = echelon(aug, ncols + 1, order)
    if ech.leftover:
        return None
    x: dict = {}
    for col, prow in reversed(ech.pivots):
        s = prow.get(ncols, Fraction(0))
        s -= sum(v * x[c] for c, v in prow.items() if c != col and c != ncols and c in x)
        if s != 0:
            x[col] = s
    return x


def matvec(rows: Sequence[dict], x: dict) -> list:
    return [sum(v * x[c] for c, v in row.items() if c in x) for row in rows]
