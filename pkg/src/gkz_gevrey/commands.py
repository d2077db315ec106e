"""Command dispatch and report serialisation for the ``gkz`` tool."""

from __future__ import annotations

import csv
import io
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from . import ext_oracle
from .errors import GKZError
from .gamma import (
    axis_series,
    build_vtilde_series,
    exponents_along_Y,
    exponents_generic,
    generic_series,
    resonance_data,
)
from .gevrey import INF, estimate_gevrey_index, quotient_labels, quotient_member, slope_scan
from .problem import ProblemSpec
from .series import SparseSeries, TruncationSpec, agree
from .solvers import (
    BasePoint,
    extract_lambda,
    extract_lambda_resonant,
    invert_E_origin,
    solve_Ep_local,
    solve_P_recurrence,
    spike,
)
from .weyl import apply, compose, euler_at_point, hypergeometric_ops, render

COMMANDS = ("basis", "gevrey", "slope", "recurrence", "ext", "monodromy", "verify")
CSV_HEADER = ("series", "m", "n", "logabs", "fit")


class CommandError(GKZError):
    def __init__(self, command: str, cause: Exception):
        self.command = command
        self.cause = cause
        super().__init__(f"{command}: {type(cause).__name__}: {cause}")


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""

    def to_json(self) -> dict:
        return {"name": self.name, "passed": self.passed, "detail": self.detail}


@dataclass
class Report:
    command: str | None = None
    problem: dict | None = None
    result: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)
    growth: list = field(default_factory=list)  # (series, m, n, logabs, fit)

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def is_empty(self) -> bool:
        return self.command is None and not self.result and not self.checks and not self.growth

    def to_json(self) -> dict:
        if self.is_empty():
            return {}
        return {
            "command": self.command,
            "problem": self.problem,
            "result": self.result,
            "checks": [c.to_json() for c in self.checks],
            "ok": self.ok,
        }


def worker_count() -> int:
    """Parallelism cap from GKZ_THREADS (default 1)."""
    raw = os.environ.get("GKZ_THREADS", "").strip()
    if not raw:
        return 1
    n = int(raw)
    if n < 1:
        raise ValueError("GKZ_THREADS must be a positive integer")
    return n


def _pmap(fn, items: list) -> list:
    n = min(worker_count(), len(items))
    if n <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


def _point(spec: ProblemSpec):
    return ext_oracle.ORIGIN if spec.point is None else BasePoint(spec.point)


def _annihilated(P, E, f: SparseSeries) -> bool:
    return apply(P, f).is_zero() and apply(E, f).is_zero()


def _series_entry(label: str, v, u, f: SparseSeries) -> dict:
    return {"label": label, "v": [str(v[0]), str(v[1])], "u": list(u),
            "nonzero_terms": len(f), "series": f.to_json()}


def cmd_basis(spec: ProblemSpec, report: Report) -> None:
    a, b, beta, M = spec.a, spec.b, spec.beta, spec.M
    P, E = hypergeometric_ops(a, b, beta)
    axis, generic = [], []
    for k, v in enumerate(exponents_along_Y(a, b, beta)):
        f = axis_series(a, b, beta, k, M)
        axis.append(_series_entry(f"phi_v^{k}", v, (-b, a), f))
        report.checks.append(Check(f"annihilation phi_v^{k}", _annihilated(P, E, f)))
    for j, v in enumerate(exponents_generic(a, b, beta)):
        f = generic_series(a, b, beta, j, M)
        generic.append(_series_entry(f"phi_w^{j}", v, (b, -a), f))
        report.checks.append(Check(f"annihilation phi_w^{j}", _annihilated(P, E, f)))
    report.result = {"operators": {"P": render(P), "E": render(E)}, "axis": axis, "generic": generic}
    rd = resonance_data(a, b, beta)
    if rd is not None:
        f = build_vtilde_series(rd, a, b, beta, M)
        Pf = apply(P, f)
        report.result["resonance"] = {
            "q": rd.q, "m0": rd.m0, "mprime": rd.mprime,
            "vtilde": [str(rd.vtilde[0]), str(rd.vtilde[1])],
            "P_phi_vtilde": Pf.to_json(),
        }
        report.checks.append(Check(f"E(phi_vtilde^{rd.q}) = 0", apply(E, f).is_zero()))
        report.checks.append(Check(f"P(phi_vtilde^{rd.q}) is one monomial", len(Pf) == 1,
                                   f"{len(Pf)} terms"))


def _gevrey_job(args) -> tuple:
    a, b, beta, M, label = args
    f = quotient_member(a, b, beta, label, M)
    return label, estimate_gevrey_index(f, s_theoretical=Fraction(b, a))


def cmd_gevrey(spec: ProblemSpec, report: Report) -> None:
    labels = quotient_labels(spec.a, spec.b, spec.beta)
    jobs = [(spec.a, spec.b, spec.beta, spec.M, lab) for lab in labels]
    out = {}
    for label, rep in _pmap(_gevrey_job, jobs):
        out[label] = rep.to_json()
        report.growth.extend((label, m, n, y, fy) for m, n, y, fy in rep.growth)
    report.result = {"series": out}


def cmd_slope(spec: ProblemSpec, report: Report) -> None:
    s_grid = [s for s in spec.s_values if s != INF]
    rep = slope_scan(spec.a, spec.b, spec.beta, s_grid, M=spec.M)
    report.result = rep.to_json()
    target = Fraction(spec.b, spec.a)
    nearest = min(s_grid, key=lambda s: (abs(s - target), s)) if s_grid else None
    report.checks.append(Check("gap at grid point nearest b/a", rep.detected_gap == nearest,
                               f"detected {rep.detected_gap}, expected {nearest}"))


def cmd_recurrence(spec: ProblemSpec, report: Report) -> None:
    a, b, beta, M = spec.a, spec.b, spec.beta, spec.M
    P, E = hypergeometric_ops(a, b, beta)
    rd = resonance_data(a, b, beta)
    f = {k: spike(k, a, b, beta, 0) for k in range(a)}
    h = solve_P_recurrence(f, a, b, beta, _point_or_none(spec), M=M)
    classes = []
    for k in range(a):
        hs = h[k].to_series(a, b)
        ok_p = agree(apply(P, hs), f[k].to_series(a, b, M - 1))
        ok_e = apply(E, hs).is_zero()
        report.checks.append(Check(f"class {k}: P(h) = f", ok_p))
        report.checks.append(Check(f"class {k}: E(h) = 0", ok_e))
        if rd is not None and k == rd.q:
            lam = extract_lambda_resonant(f[k], a, b, beta, 1, M)
        else:
            lam = extract_lambda(f[k], k, a, b, beta, 1, M)
        classes.append({"k": k, "input": "spike at m=0", "lambda": lam.to_json(),
                        "h_head": [str(c) for c in h[k].coeffs[:8]]})
    report.result = {"classes": classes, "M": M}


def _point_or_none(spec: ProblemSpec):
    return None if spec.point is None else BasePoint(spec.point)


def _ext_job(args) -> dict:
    a, b, beta, point, s, box, target = args
    t = ext_oracle.compare_oracle_vs_theory(a, b, beta, point, s, box, target)
    return {**t.to_json(), "notes": list(t.notes)}


def cmd_ext(spec: ProblemSpec, report: Report) -> None:
    point = _point(spec)
    jobs = [(spec.a, spec.b, spec.beta, point, s, spec.box, target)
            for target in (ext_oracle.TARGET_Q, ext_oracle.TARGET_O) for s in spec.s_values]
    tables = _pmap(_ext_job, jobs)
    for t in tables:
        report.checks.append(Check(f"ext {t['target']} at {t['point']}, s={t['s']}",
                                   t["status"] == "MATCH",
                                   f"predicted {_triple(t['predicted'])}, measured {_triple(t['measured'])}"))
    report.result = {"tables": tables}


def _triple(d: dict) -> str:
    return "(" + ",".join(str(d.get(i, "?")) for i in "012") + ")"


def cmd_monodromy(spec: ProblemSpec, report: Report) -> None:
    spectrum = ext_oracle.monodromy_eigenvalues(spec.a, spec.b, spec.beta)
    report.result = spectrum.to_json()
    worst = max(abs(abs(z) - 1) for z in spectrum.eigenvalues)
    report.checks.append(Check("unit modulus", worst <= 1e-12, f"max deviation {worst:.3g}"))


def cmd_verify(spec: ProblemSpec, report: Report) -> None:
    """Annihilation, commutation, round trips and the oracle tables."""
    a, b, beta = spec.a, spec.b, spec.beta
    sub = Report()
    cmd_basis(spec, sub)
    report.checks.extend(sub.checks)
    P, E = hypergeometric_ops(a, b, beta)
    report.checks.append(Check("P E = (E + ab) P", compose(P, E) == compose(E + a * b, P)))
    # round trip at the origin on the part of a polynomial off the weight-beta stratum
    g = {(i, j): Fraction(i + 2 * j + 1, j + 1) for i in range(6) for j in range(6)
         if a * i + b * j != beta}
    g = SparseSeries(g, TruncationSpec.box(5, 5))
    report.checks.append(Check("E(invert_E_origin(g)) = g",
                               agree(apply(E, invert_E_origin(g, a, b, beta)), g)))
    eps = spec.point if spec.point is not None else Fraction(1)
    box = TruncationSpec.box(*spec.box)
    gp = SparseSeries({(i, j): Fraction(1, i + j + 1) for i in range(4) for j in range(4)}, box)
    h = solve_Ep_local(gp, BasePoint(eps), a, b, beta, box)
    report.checks.append(Check("E_p(solve_Ep_local(g)) = g",
                               agree(apply(euler_at_point(a, b, beta, eps), h), gp)))
    sub = Report()
    cmd_recurrence(spec, sub)
    report.checks.extend(sub.checks)
    sub = Report()
    cmd_ext(spec, sub)
    report.checks.extend(sub.checks)
    sub = Report()
    cmd_monodromy(spec, sub)
    report.checks.extend(sub.checks)
    report.result = {"passed": sum(c.passed for c in report.checks), "total": len(report.checks),
                     "failures": [c.name for c in report.checks if not c.passed]}


_DISPATCH = {
    "basis": cmd_basis,
    "gevrey": cmd_gevrey,
    "slope": cmd_slope,
    "recurrence": cmd_recurrence,
    "ext": cmd_ext,
    "monodromy": cmd_monodromy,
    "verify": cmd_verify,
}


def run_command(spec: ProblemSpec, command: str) -> Report:
    if command not in _DISPATCH:
        raise ValueError(f"unknown command {command!r}; choose from {', '.join(COMMANDS)}")
    report = Report(command=command, problem=spec.to_json())
    try:
        _DISPATCH[command](spec, report)
    except GKZError as exc:
        raise CommandError(command, exc) from exc
    return report


def _fmt_float(x: float) -> str:
    return repr(round(x, 12))


def emit_report(report: Report, fmt: str = "json") -> bytes:
    if fmt == "json":
        data = report.to_json()
        if not data:
            return b"{}\n"
        return (json.dumps(data, indent=2, sort_keys=True) + "\n").encode()
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for label, m, n, y, fy in report.growth:
            w.writerow([label, m, n, _fmt_float(y), _fmt_float(fy)])
        return buf.getvalue().encode()
    if fmt == "text":
        return _text(report).encode()
    raise ValueError(f"unknown format {fmt!r}")


def _text(report: Report) -> str:
    if report.is_empty():
        return "no results\n"
    lines = [f"gkz {report.command}"]
    if report.problem:
        p = report.problem
        lines.append(f"  A = ({p['A'][0]} {p['A'][1]}), beta = {p['beta']}, point = {p['point']}")
    lines.extend(_summary_lines(report))
    if report.checks:
        lines.append(f"checks: {sum(c.passed for c in report.checks)}/{len(report.checks)} passed")
        for c in report.checks:
            tail = f"  ({c.detail})" if c.detail else ""
            lines.append(f"  {'PASS' if c.passed else 'FAIL'} {c.name}{tail}")
    return "\n".join(lines) + "\n"


def _summary_lines(report: Report) -> list:
    r = report.result
    cmd = report.command
    out = []
    if cmd == "basis":
        for e in r["axis"] + r["generic"]:
            out.append(f"  {e['label']}: v = ({e['v'][0]}, {e['v'][1]}), {e['nonzero_terms']} nonzero terms")
        if "resonance" in r:
            rs = r["resonance"]
            out.append(f"  resonant: q = {rs['q']}, m0 = {rs['m0']}, m' = {rs['mprime']}, "
                       f"vtilde = ({rs['vtilde'][0]}, {rs['vtilde'][1]})")
    elif cmd == "gevrey":
        for label, g in r["series"].items():
            out.append(f"  {label}: {g['classification']}  index {g['estimated_index']:.4f}"
                       f"  (b/a = {g['s_theoretical']}, residual {g['fit_residual']:.2e})")
    elif cmd == "slope":
        for s, d in zip(r["s_grid"], r["dim_at_s"]):
            out.append(f"  s = {s}: {d}")
        out.append(f"  gap at {r['detected_gap']}")
    elif cmd == "recurrence":
        for c in r["classes"]:
            lam = c["lambda"]
            out.append(f"  class {c['k']}: lambda = {lam['lambda']:.12g} (tail bound {lam['tail_bound']:.3g})")
    elif cmd == "ext":
        for t in r["tables"]:
            pred = ",".join(str(t["predicted"][i]) for i in "012")
            meas = ",".join(str(t["measured"][i]) for i in "012")
            out.append(f"  {t['target']} s={t['s']:>5}: predicted ({pred}) measured ({meas}) {t['status']}")
    elif cmd == "monodromy":
        for re_, im in r["eigenvalues"]:
            out.append(f"  {re_:+.12f} {im:+.12f}i")
    elif cmd == "verify":
        out.append(f"  {r['passed']}/{r['total']} checks passed")
    return out
