"""Execution of validated scenarios: one artifact set per task, written atomically."""
from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .expr import ExprDomainError
from .families import (
    FamilyError,
    FamilyParams,
    FitError,
    FitResult,
    GeodesicTrace,
    family_manifest,
    fit_exponent,
    fit_family_Z,
    fit_quadratic,
    launch_family,
    winding_number,
)
from .flow import trace_geodesic
from .integrator import IntegrationError, IntegratorConfig
from .metric import Direction, Metric, MetricError, discriminant, project_to_discriminant
from .plotting import Polyline, PortraitSpec, render_svg, split_by_label
from .report import (
    MANIFEST_COLUMNS,
    REPORT_COLUMNS,
    TRACE_COLUMNS,
    atomic_write_bytes,
    atomic_write_text,
    csv_text,
    report_row,
)
from .scenario import Scenario, TaskSpec
from .singular import PointClassification, SingularError, classify

__all__ = [
    "NUMERIC_ERRORS",
    "MEMBER_COLUMNS",
    "TaskResult",
    "RunReport",
    "discriminant_polylines",
    "discriminant_samples",
    "auto_fit",
    "execute",
]

NUMERIC_ERRORS = (
    IntegrationError, SingularError, MetricError, FamilyError, FitError, ExprDomainError,
    ArithmeticError, np.linalg.LinAlgError,
)
MEMBER_COLUMNS = ("member_id", "x", "y", "p", "Delta", "F", "causal")

EXIT_OK, EXIT_SCENARIO, EXIT_NUMERIC = 0, 2, 3


@dataclass
class TaskResult:
    name: str
    kind: str
    ok: bool
    files: list[str] = field(default_factory=list)
    message: str = ""
    curves: list[tuple] = field(default_factory=list)
    points: list[tuple[float, float]] = field(default_factory=list)


@dataclass
class RunReport:
    out_dir: Path
    results: list[TaskResult]

    @property
    def exit_code(self) -> int:
        return EXIT_OK if all(r.ok for r in self.results) else EXIT_NUMERIC


# discriminant geometry -----------------------------------------------------


def _delta_grid(m: Metric, region, n: int):
    x0, x1, y0, y1 = region
    xs = np.linspace(x0, x1, n)
    ys = np.linspace(y0, y1, n)
    Z = np.empty((n, n))
    for i, y in enumerate(ys):
        for k, x in enumerate(xs):
            Z[i, k] = discriminant(m, (x, y))[0]
    return xs, ys, Z


def discriminant_polylines(m: Metric, region, n: int = 161) -> list[np.ndarray]:
    """Zero contour of Delta on an ``n x n`` grid over the region (lines of ``(x, y)``)."""
    import contourpy

    xs, ys, Z = _delta_grid(m, region, n)
    if not np.all(np.isfinite(Z)):
        raise MetricError("discriminant is not finite on the whole region")
    gen = contourpy.contour_generator(xs, ys, Z, line_type=contourpy.LineType.Separate)
    return [np.asarray(seg) for seg in gen.lines(0.0) if len(seg) >= 2]


def discriminant_samples(m: Metric, region, k: int, n: int = 161) -> np.ndarray:
    """``k`` points on Delta = 0 spread by arclength over all contour pieces, Newton-refined."""
    lines = discriminant_polylines(m, region, n)
    if not lines:
        raise MetricError("no discriminant curve in the region")
    lens = [np.concatenate([[0.0], np.cumsum(np.hypot(*np.diff(seg, axis=0).T))]) for seg in lines]
    total = sum(float(s[-1]) for s in lens)
    if total == 0.0:
        raise MetricError("degenerate discriminant curve")
    targets = (np.arange(k) + 0.5) * total / k
    pts = []
    offset = 0.0
    for seg, s in zip(lines, lens):
        for t in targets[(targets >= offset) & (targets <= offset + s[-1])]:
            u = t - offset
            pts.append([np.interp(u, s, seg[:, 0]), np.interp(u, s, seg[:, 1])])
        offset += float(s[-1])
    return np.array([project_to_discriminant(m, p) for p in pts])


# fits ----------------------------------------------------------------------


def auto_fit(g: GeodesicTrace) -> FitResult | None:
    """The class-appropriate asymptotic fit of one family member, or None."""
    if g.role == "simple_root":
        return None
    try:
        if g.origin_class == "Z":
            return fit_family_Z(g)
        if g.origin_class in ("C1", "C2", "C3"):
            return fit_exponent(g, window=(1e-3, 1e-1))
        if g.origin_class in ("Ds", "Dn"):
            return fit_quadratic(g)
        if g.origin_class == "Df":
            w = winding_number(g.x, g.p, 0.1)
            return FitResult("winding", {"turns": w}, {"turns": 0.0}, (0.0, 0.1), 0.0, len(g))
    except FitError:
        return None
    return None


# tasks ---------------------------------------------------------------------


def _config(scn: Scenario, rtol: float | None, **kw) -> IntegratorConfig:
    t = scn.tolerances
    return IntegratorConfig(rtol=rtol if rtol is not None else t.rtol, atol=t.atol, **kw)


def _disc_curves(m: Metric, region, n: int) -> list[Polyline]:
    return [Polyline(seg[:, 0], seg[:, 1], "discriminant", f"discriminant-{i}")
            for i, seg in enumerate(discriminant_polylines(m, region, n))]


def _draw(scn: Scenario, curves, points, style: str, title: str, grid: int) -> bytes:
    lines: list[Polyline] = []
    for i, (x, y, labels, whole) in enumerate(curves):
        if style == "plain":
            lines.append(Polyline(x, y, "timelike", f"trace-{i}-plain"))
        elif whole is not None:
            lines.append(Polyline(x, y, whole, f"trace-{i}-{whole}"))
        else:
            for k, pl in enumerate(split_by_label(x, y, labels)):
                pl.gid = f"trace-{i}-{pl.style}-{k}"
                lines.append(pl)
    spec = PortraitSpec(scn.region, title=title, points=tuple(points))
    return render_svg(spec, lines, _disc_curves(scn.metric, scn.region, grid))


def _task_classify(scn: Scenario, t: TaskSpec, out: Path, **_) -> TaskResult:
    pts = discriminant_samples(scn.metric, scn.region, t.params["samples"], t.params["grid"])
    rows = []
    for q in pts:
        try:
            rows.append(report_row(classify(scn.metric, q)))
        except (SingularError, MetricError) as e:
            rows.append({"x": float(q[0]), "y": float(q[1]), "K1": "", "class": "error", "roots": str(e),
                         "eps1": "", "eps2": ""})
    atomic_write_text(out / t.params["file"], csv_text(REPORT_COLUMNS, rows))
    return TaskResult(t.name, t.kind, True, [t.params["file"]], f"{len(rows)} points")


def _family_params(scn: Scenario, t: TaskSpec, rtol) -> FamilyParams:
    p = t.params
    kw = {"delta": p.get("delta", scn.tolerances.delta), "tol_iso": scn.tolerances.iso,
          "config": _config(scn, rtol), "simple_roots": p["simple_roots"]}
    for k in ("leaves", "phases", "kappas", "extent", "sides"):
        if k in p:
            kw[k] = p[k]
    return FamilyParams(**kw)


def _task_family(scn: Scenario, t: TaskSpec, out: Path, rtol=None, **_) -> TaskResult:
    p = t.params
    q = project_to_discriminant(scn.metric, p["at"])
    pc: PointClassification = classify(scn.metric, q)
    fam = launch_family(scn.metric, q, _family_params(scn, t, rtol), pc)
    fits = {g.member_id: f for g in fam if p["fit"] == "auto" and (f := auto_fit(g)) is not None}
    man = family_manifest(fam, fits)
    members = []
    for g in fam:
        for k in range(len(g)):
            members.append((g.member_id, g.x[k], g.y[k], g.p[k], g.delta[k], g.F[k], g.causal[k]))
    files = [p["manifest"], p["members"]]
    curves = [(g.x, g.y, g.causal, g.label()) for g in fam]
    payload = {p["manifest"]: csv_text(MANIFEST_COLUMNS, man).encode(),
               p["members"]: csv_text(MEMBER_COLUMNS, members).encode()}
    if p["svg"]:
        payload[p["svg"]] = _draw(scn, curves, [tuple(q)], p["style"], p["title"] or f"{pc.tag} at {tuple(q)}", 161)
        files.append(p["svg"])
    for name, data in payload.items():
        atomic_write_bytes(out / name, data)
    return TaskResult(t.name, t.kind, True, files, f"class {pc.tag}, {len(fam)} members", curves, [tuple(q)])


def _task_trace(scn: Scenario, t: TaskSpec, out: Path, rtol=None, **_) -> TaskResult:
    p = t.params
    d = Direction.at_infinity() if math.isinf(p["direction"]) else Direction.affine(p["direction"])
    cfg = _config(scn, rtol, t_max=p["t_max"], bounds=scn.region)
    tr = trace_geodesic(scn.metric, p["start"], d, p["sense"], cfg, kind=p["field"], tol_iso=scn.tolerances.iso)
    text = csv_text(TRACE_COLUMNS, tr.rows())
    curves = [(tr.x, tr.y, list(tr.causal), None)]
    atomic_write_text(out / p["file"], text)
    files = [p["file"]]
    if p["svg"]:
        atomic_write_bytes(out / p["svg"], _draw(scn, curves, [], "causal", p["title"], 161))
        files.append(p["svg"])
    return TaskResult(t.name, t.kind, True, files, f"{len(tr.t)} samples, status {tr.status}", curves)


def _task_portrait(scn: Scenario, t: TaskSpec, out: Path, done: dict[str, TaskResult], **_) -> TaskResult:
    p = t.params
    curves, points = [], []
    for name in p["include"]:
        r = done.get(name)
        if r is None or not r.ok:
            raise FamilyError(f"included task {name!r} did not produce curves")
        curves.extend(r.curves)
        points.extend(r.points)
    data = _draw(scn, curves, points, p["style"], p["title"] or scn.title, p["grid"])
    atomic_write_bytes(out / p["file"], data)
    return TaskResult(t.name, t.kind, True, [p["file"]], f"{len(curves)} curves")


def _task_verify(scn: Scenario, t: TaskSpec, out: Path, seed: int = 0, **_) -> TaskResult:
    from .verify import run_suite

    checks = run_suite(t.params["suite"], seed=seed)
    text = "".join(c.line() + "\n" for c in checks)
    atomic_write_text(out / t.params["file"], text)
    ok = all(c.passed for c in checks)
    return TaskResult(t.name, t.kind, ok, [t.params["file"]],
                      f"{sum(c.passed for c in checks)}/{len(checks)} checks passed")


_RUNNERS = {
    "classify-curve": _task_classify,
    "family": _task_family,
    "trace": _task_trace,
    "portrait": _task_portrait,
    "verify": _task_verify,
}


def execute(scn: Scenario, out_root, *, seed: int = 0, rtol: float | None = None, log=sys.stderr) -> RunReport:
    """Run every task in order. A numeric failure is reported and later tasks still run."""
    out = Path(out_root) / scn.output_dir
    done: dict[str, TaskResult] = {}
    results = []
    for t in scn.tasks:
        try:
            r = _RUNNERS[t.kind](scn, t, out, rtol=rtol, seed=seed, done=done)
        except NUMERIC_ERRORS as e:
            r = TaskResult(t.name, t.kind, False, message=f"{type(e).__name__}: {e}")
        done[t.name] = r
        results.append(r)
        if log is not None:
            state = "ok" if r.ok else "FAILED"
            print(f"[{t.name}] {t.kind} {state}: {r.message}", file=log)
    return RunReport(out, results)
