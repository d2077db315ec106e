"""Gevrey-order diagnostics along Y = (x2 = 0).

Coefficients of the divergent series grow like ``C D^n n^kappa (n!)^(s-1)``
in the x2-degree ``n``.  The estimator regresses ``log|c_n|`` on
``logGamma(n+1)``, ``n``, ``log n`` and a constant over a trailing window;
the first slope plus one is the Gevrey index estimate.  Everything runs in the log domain because the
coefficients overflow doubles long before the fit window ends.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import NonIntegerX2Exponent, TooFewTerms
from .gamma import axis_series, build_vtilde_series, resonance_data
from .series import FloatSeries, SparseSeries, frac
from .weyl import check_matrix

DEFAULT_TOL = 0.05
DEFAULT_WINDOW = 0.6
MIN_FIT_POINTS = 16
INF = math.inf

CONVERGENT = "CONVERGENT"
GEVREY = "GEVREY"
POLYNOMIAL = "POLYNOMIAL"


def log_abs(c) -> float:
    """log|c| for a nonzero Fraction of any size, or a float."""
    if isinstance(c, Fraction):
        return math.log(abs(c.numerator)) - math.log(c.denominator)
    return math.log(abs(c))


def _x2_degree(e2) -> int:
    e2 = frac(e2) if not isinstance(e2, Fraction) else e2
    if e2.denominator != 1 or e2 < 0:
        raise NonIntegerX2Exponent(f"x2-exponent {e2} is not a natural number")
    return int(e2)


def rho_s(f, s) -> FloatSeries:
    """Divide the x2^i coefficient by (i!)^(s-1), in floating point."""
    if s == INF:
        raise ValueError("rho_s is defined for finite s only")
    s = float(s)
    out = {}
    for e, c in f.terms.items():
        i = _x2_degree(e[1])
        if c == 0:
            continue
        cf = float(c)
        if math.isfinite(cf) and abs(cf) > 1e-300:
            out[e] = cf if s == 1.0 else cf * math.exp(-(s - 1.0) * math.lgamma(i + 1))
            continue
        # huge or tiny rationals: go through logs
        val = log_abs(c) - (s - 1.0) * math.lgamma(i + 1)
        if val > 709.0:
            raise OverflowError(f"rho_s coefficient at {e} exceeds double range")
        mag = math.exp(val)
        out[e] = -mag if c < 0 else mag
    return FloatSeries(out, f.trunc)


@dataclass(frozen=True)
class RayMeta:
    v: tuple
    u: tuple
    M: int

    def exponent(self, m: int) -> tuple:
        return (self.v[0] + m * self.u[0], self.v[1] + m * self.u[1])


def ray_meta(f: SparseSeries) -> RayMeta:
    """Recover (v, u, M) from a single-ray truncation."""
    t = f.trunc
    if t.kind != "ray" or len(t.rays) != 1:
        raise ValueError("series does not carry single-ray metadata")
    r = t.rays[0]
    return RayMeta(r.base, t.u, r.M)


def ray_points(f: SparseSeries, ray: RayMeta | None = None) -> list:
    """[(m, coefficient)] along the ray for m = 0..M."""
    ray = ray or ray_meta(f)
    return [(m, f.coeff(ray.exponent(m))) for m in range(ray.M + 1)]


def ratio_sequence(f: SparseSeries, ray: RayMeta | None = None) -> list:
    """|c_{m+1} / c_m| over consecutive nonzero ray coefficients."""
    nz = [c for _, c in ray_points(f, ray) if c != 0]
    if len(nz) < 3:
        raise TooFewTerms(f"need at least 3 nonzero ray coefficients, have {len(nz)}")
    return [float(abs(nz[i + 1] / nz[i])) for i in range(len(nz) - 1)]


@dataclass
class GevreyReport:
    estimated_index: float
    fit_residual: float
    coefficient_count: int
    s_theoretical: Fraction | None
    classification: str
    # (m, x2-degree, log|c|, fitted log|c|) rows for plotting
    growth: list = field(default_factory=list, repr=False)

    @property
    def label(self) -> str:
        if self.classification == GEVREY:
            return f"GEVREY({self.estimated_index:.4f})"
        return self.classification

    def to_json(self) -> dict:
        return {
            "estimated_index": round(self.estimated_index, 12),
            "fit_residual": round(self.fit_residual, 12),
            "coefficient_count": self.coefficient_count,
            "s_theoretical": None if self.s_theoretical is None else str(self.s_theoretical),
            "classification": self.label,
        }


def _is_terminated(points: list) -> bool:
    nz = [m for m, c in points if c != 0]
    if not nz:
        return True
    trailing = points[-1][0] - nz[-1]
    return trailing >= max(1, len(points) // 4)


def fit_growth(ns, logs) -> tuple:
    """Least squares log|c| ~ alpha*logGamma(n+1) + n*logD + kappa*log(n) + logC.

    The power-law term absorbs the n^kappa prefactor that ratios of Gamma
    functions always carry; without it alpha is biased by O(1/n).
    Returns (alpha, logD, logC, rms residual, fitted values).
    """
    X = np.column_stack([
        [math.lgamma(n + 1) for n in ns],
        ns,
        [math.log(max(n, 1)) for n in ns],
        np.ones(len(ns)),
    ])
    y = np.asarray(logs, dtype=float)
    coef, *_ = np.linalg.lstsq(X, y, rcond=None)
    fitted = X @ coef
    rms = float(np.sqrt(np.mean((y - fitted) ** 2)))
    return float(coef[0]), float(coef[1]), float(coef[3]), rms, fitted


def estimate_from_points(points, degree_of, tol=DEFAULT_TOL, window=DEFAULT_WINDOW,
                         s_theoretical=None) -> GevreyReport:
    """Core estimator over [(m, coefficient)] with x2-degree ``degree_of(m)``."""
    nz = [(m, c) for m, c in points if c != 0]
    if _is_terminated(points):
        return GevreyReport(1.0, 0.0, len(nz), s_theoretical, POLYNOMIAL)
    start = int(math.floor((1.0 - window) * len(nz)))
    win = nz[start:]
    if len(win) < MIN_FIT_POINTS:
        raise TooFewTerms(f"{len(win)} nonzero coefficients in the fit window, need {MIN_FIT_POINTS}")
    ns = [degree_of(m) for m, _ in win]
    logs = [log_abs(c) for _, c in win]
    alpha, _, _, rms, fitted = fit_growth(ns, logs)
    s_est = 1.0 + alpha
    cls = CONVERGENT if s_est <= 1.0 + tol else GEVREY
    growth = [(m, n, y, float(fy)) for (m, _), n, y, fy in zip(win, ns, logs, fitted)]
    return GevreyReport(s_est, rms, len(win), s_theoretical, cls, growth)


def estimate_gevrey_index(f: SparseSeries, ray: RayMeta | None = None, fit_window=None,
                          tol: float = DEFAULT_TOL, s_theoretical=None) -> GevreyReport:
    """Estimate the Gevrey index of a ray series along x2 = 0.

    ``fit_window`` is either a fraction (trailing share of the nonzero
    coefficients) or a ``range`` of ray indices.
    """
    ray = ray or ray_meta(f)
    points = ray_points(f, ray)

    def degree_of(m):
        return _x2_degree(ray.exponent(m)[1])

    for m, c in points:
        if c != 0:
            degree_of(m)
    if isinstance(fit_window, range):
        # terminated data is judged on the whole ray, fitting on the window
        if _is_terminated(points):
            return estimate_from_points(points, degree_of, tol, 1.0, s_theoretical)
        sub = [(m, c) for m, c in points if m in fit_window]
        return estimate_from_points(sub, degree_of, tol, 1.0, s_theoretical)
    window = DEFAULT_WINDOW if fit_window is None else float(fit_window)
    return estimate_from_points(points, degree_of, tol, window, s_theoretical)


def rho_log_terms(f: SparseSeries, s, x1_abs: float, x2_abs: float, ray: RayMeta | None = None) -> list:
    """log|term| of rho_s(f) evaluated at |x1|, |x2| along the ray (nonzero terms)."""
    ray = ray or ray_meta(f)
    out = []
    for m, c in ray_points(f, ray):
        if c == 0:
            continue
        e1, e2 = ray.exponent(m)
        n = _x2_degree(e2)
        out.append(log_abs(c) - (float(s) - 1.0) * math.lgamma(n + 1)
                   + float(e1) * math.log(x1_abs) + n * math.log(x2_abs))
    return out


@dataclass
class SlopeReport:
    s_grid: list
    dim_at_s: list
    detected_gap: object
    indices: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "s_grid": [_s_str(s) for s in self.s_grid],
            "dim_at_s": list(self.dim_at_s),
            "detected_gap": None if self.detected_gap is None else _s_str(self.detected_gap),
            "indices": {k: round(v, 12) for k, v in sorted(self.indices.items())},
        }


def _s_str(s) -> str:
    return "inf" if s == INF else str(s)


def quotient_labels(a: int, b: int, beta) -> list:
    rd = resonance_data(a, b, beta)
    return [f"phi_vtilde^{k}" if rd is not None and k == rd.q else f"phi_v^{k}" for k in range(a)]


def quotient_member(a: int, b: int, beta, label: str, M: int) -> SparseSeries:
    """The ray series named by a label from :func:`quotient_labels`."""
    name, k = label.split("^")
    if name == "phi_vtilde":
        return build_vtilde_series(resonance_data(a, b, beta), a, b, beta, M)
    return axis_series(a, b, beta, int(k), M)


def quotient_basis(a: int, b: int, beta, M: int) -> dict:
    """Label -> ray series whose classes span the quotient by convergent series.

    The terminating axis series is replaced by the modified series.
    """
    return {label: quotient_member(a, b, beta, label, M) for label in quotient_labels(a, b, beta)}


def slope_scan(a: int, b: int, beta, s_grid, M: int = 300, tol: float = DEFAULT_TOL) -> SlopeReport:
    check_matrix(a, b)
    grid = list(s_grid)
    if any(s < 1 for s in grid) or grid != sorted(grid):
        raise ValueError("s_grid must be ascending with values >= 1")
    indices = {}
    for label, f in quotient_basis(a, b, beta, M).items():
        rep = estimate_gevrey_index(f, tol=tol, s_theoretical=Fraction(b, a))
        indices[label] = rep.estimated_index if rep.classification == GEVREY else None
    dims = []
    for s in grid:
        dims.append(sum(1 for v in indices.values() if v is not None and v <= s + tol))
    gap = None
    for i in range(1, len(grid)):
        if dims[i - 1] == 0 and dims[i] == a:
            gap = grid[i]
            break
    return SlopeReport(grid, dims, gap, {k: v for k, v in indices.items() if v is not None})
