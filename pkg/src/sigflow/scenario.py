"""Scenario files: a flat INI description of a metric, a region and a task list.

Layout::

    [scenario]
    name = z_origin              ; optional, defaults to the file stem
    title = ...

    [metric]
    a = -y                       ; three coefficient expressions, or
    b = 0
    c = 1
    ; omega = -1                 ; the normal form: omega expression + eps value
    ; eps = -1

    [region]
    x = -1.5, 1.5
    y = -0.2, 1.2

    [tolerances]                 ; all optional
    rtol = 1e-11
    atol = 1e-14
    iso = 1e-9
    delta = 1e-3

    [output]
    dir = z_origin               ; relative to --out / $SIGFLOW_OUT / cwd

    [task.NAME]                  ; one section per task, run in file order
    kind = classify-curve | family | trace | portrait | verify
    ...

Everything is parsed and checked before any task runs, so a malformed file
leaves no artifacts behind.
"""
from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field
from pathlib import Path

from .expr import ExprError
from .metric import Metric

__all__ = [
    "ScenarioError",
    "Tolerances",
    "TaskSpec",
    "Scenario",
    "TASK_KEYS",
    "parse_scenario",
    "load_scenario",
    "load_metric_file",
    "parse_point",
    "parse_floats",
]


class ScenarioError(ValueError):
    """A malformed scenario; ``where`` names the section and key."""

    def __init__(self, msg: str, where: str = ""):
        self.where = where
        super().__init__(f"{where}: {msg}" if where else msg)


TASK_KEYS: dict[str, set[str]] = {
    "classify-curve": {"samples", "file", "grid"},
    "family": {"at", "leaves", "phases", "kappas", "extent", "delta", "sides", "fit", "simple_roots",
               "manifest", "members", "svg", "style", "title"},
    "trace": {"start", "direction", "sense", "field", "t_max", "file", "svg", "title"},
    "portrait": {"include", "style", "file", "title", "grid"},
    "verify": {"suite", "file"},
}
STYLES = ("causal", "plain")
FIELDS = ("lifted", "isotropic")


@dataclass(frozen=True)
class Tolerances:
    rtol: float = 1e-11
    atol: float = 1e-14
    iso: float = 1e-9
    delta: float = 1e-3


@dataclass
class TaskSpec:
    name: str
    kind: str
    params: dict = field(default_factory=dict)


@dataclass
class Scenario:
    name: str
    metric: Metric
    region: tuple[float, float, float, float]
    tasks: list[TaskSpec]
    tolerances: Tolerances = Tolerances()
    output_dir: str = ""
    title: str = ""
    source: str = ""


# value parsers -------------------------------------------------------------


def _float(text: str, where: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise ScenarioError(f"expected a number, got {text!r}", where) from None
    if math.isnan(v):
        raise ScenarioError("NaN is not allowed", where)
    return v


def parse_floats(text: str, where: str = "") -> tuple[float, ...]:
    parts = [t.strip() for t in text.split(",") if t.strip()]
    if not parts:
        raise ScenarioError("expected a comma-separated list of numbers", where)
    return tuple(_float(t, where) for t in parts)


def parse_point(text: str, where: str = "") -> tuple[float, float]:
    v = parse_floats(text, where)
    if len(v) != 2:
        raise ScenarioError(f"expected 'x, y', got {text!r}", where)
    return v


def _int(text: str, where: str, lo: int = 1) -> int:
    try:
        v = int(text)
    except ValueError:
        raise ScenarioError(f"expected an integer, got {text!r}", where) from None
    if v < lo:
        raise ScenarioError(f"must be at least {lo}", where)
    return v


def _bool(text: str, where: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "yes", "true", "on"):
        return True
    if t in ("0", "no", "false", "off"):
        return False
    raise ScenarioError(f"expected yes/no, got {text!r}", where)


def _choice(text: str, options, where: str) -> str:
    t = text.strip()
    if t not in options:
        raise ScenarioError(f"expected one of {', '.join(options)}, got {t!r}", where)
    return t


def _filename(text: str, where: str) -> str:
    t = text.strip()
    if not t or "/" in t or "\\" in t or t.startswith("."):
        raise ScenarioError(f"file names must be plain names inside the output directory, got {t!r}", where)
    return t


# sections ------------------------------------------------------------------


def _metric_from_section(sec, where: str = "[metric]") -> Metric:
    keys = set(sec.keys())
    try:
        if {"omega", "eps"} <= keys:
            extra = keys - {"omega", "eps", "name"}
            if extra:
                raise ScenarioError(f"unexpected keys {sorted(extra)} next to omega/eps", where)
            eps = _float(sec["eps"], f"{where} eps")
            return Metric.normal_form(sec["omega"], eps)
        if {"a", "b", "c"} <= keys:
            extra = keys - {"a", "b", "c", "name"}
            if extra:
                raise ScenarioError(f"unexpected keys {sorted(extra)}", where)
            return Metric(sec["a"], sec["b"], sec["c"], name=sec.get("name"))
    except ExprError as e:
        raise ScenarioError(f"bad expression: {e}", where) from None
    raise ScenarioError("give either a, b, c or omega, eps", where)


def _region(sec) -> tuple[float, float, float, float]:
    if "x" not in sec or "y" not in sec:
        raise ScenarioError("needs x = lo, hi and y = lo, hi", "[region]")
    xs = parse_floats(sec["x"], "[region] x")
    ys = parse_floats(sec["y"], "[region] y")
    if len(xs) != 2 or len(ys) != 2:
        raise ScenarioError("bounds must be pairs", "[region]")
    if not (xs[0] < xs[1] and ys[0] < ys[1]) or not all(map(math.isfinite, xs + ys)):
        raise ScenarioError("region is degenerate", "[region]")
    return (xs[0], xs[1], ys[0], ys[1])


def _tolerances(sec) -> Tolerances:
    if sec is None:
        return Tolerances()
    kw = {}
    for k in sec.keys():
        if k not in ("rtol", "atol", "iso", "delta"):
            raise ScenarioError(f"unknown key {k!r}", "[tolerances]")
        v = _float(sec[k], f"[tolerances] {k}")
        if v <= 0:
            raise ScenarioError("must be positive", f"[tolerances] {k}")
        kw[k] = v
    return Tolerances(**kw)


def _task(name: str, sec, earlier: dict[str, str]) -> TaskSpec:
    where = f"[task.{name}]"
    if "kind" not in sec:
        raise ScenarioError("missing kind", where)
    kind = _choice(sec["kind"], tuple(TASK_KEYS), f"{where} kind")
    extra = set(sec.keys()) - TASK_KEYS[kind] - {"kind"}
    if extra:
        raise ScenarioError(f"unknown keys {sorted(extra)} for kind {kind}", where)
    p: dict = {}
    w = lambda k: f"{where} {k}"  # noqa: E731
    if kind == "classify-curve":
        p["samples"] = _int(sec.get("samples", "21"), w("samples"))
        p["grid"] = _int(sec.get("grid", "401"), w("grid"), 8)
        p["file"] = _filename(sec.get("file", f"{name}.csv"), w("file"))
    elif kind == "family":
        if "at" not in sec:
            raise ScenarioError("missing at = x, y", where)
        p["at"] = parse_point(sec["at"], w("at"))
        if "leaves" in sec:
            p["leaves"] = parse_floats(sec["leaves"], w("leaves"))
        if "phases" in sec:
            ph = parse_floats(sec["phases"], w("phases"))
            if len(ph) == 1 and float(ph[0]).is_integer() and ph[0] >= 1:
                n = int(ph[0])
                ph = tuple(2.0 * math.pi * k / n for k in range(n))
            p["phases"] = ph
        if "kappas" in sec:
            p["kappas"] = parse_floats(sec["kappas"], w("kappas"))
        if "sides" in sec:
            sides = tuple(int(s) for s in parse_floats(sec["sides"], w("sides")))
            if any(s not in (-1, 1) for s in sides):
                raise ScenarioError("sides are 1 and/or -1", w("sides"))
            p["sides"] = sides
        for k in ("extent", "delta"):
            if k in sec:
                v = _float(sec[k], w(k))
                if v <= 0:
                    raise ScenarioError("must be positive", w(k))
                p[k] = v
        p["fit"] = _choice(sec.get("fit", "auto"), ("auto", "none"), w("fit"))
        p["simple_roots"] = _bool(sec.get("simple_roots", "yes"), w("simple_roots"))
        p["manifest"] = _filename(sec.get("manifest", f"{name}_manifest.csv"), w("manifest"))
        p["members"] = _filename(sec.get("members", f"{name}_members.csv"), w("members"))
        p["svg"] = _filename(sec["svg"], w("svg")) if "svg" in sec else None
        p["style"] = _choice(sec.get("style", "causal"), STYLES, w("style"))
        p["title"] = sec.get("title", "")
    elif kind == "trace":
        if "start" not in sec or "direction" not in sec:
            raise ScenarioError("needs start = x, y and direction = p (or inf)", where)
        p["start"] = parse_point(sec["start"], w("start"))
        d = sec["direction"].strip().lower()
        p["direction"] = math.inf if d in ("inf", "infinity") else _float(d, w("direction"))
        s = _int(sec.get("sense", "1"), w("sense"), lo=-1)
        if s not in (-1, 1):
            raise ScenarioError("sense is 1 or -1", w("sense"))
        p["sense"] = s
        p["field"] = _choice(sec.get("field", "lifted"), FIELDS, w("field"))
        p["t_max"] = _float(sec.get("t_max", "1000"), w("t_max"))
        p["file"] = _filename(sec.get("file", f"{name}.csv"), w("file"))
        p["svg"] = _filename(sec["svg"], w("svg")) if "svg" in sec else None
        p["title"] = sec.get("title", "")
    elif kind == "portrait":
        inc = [t.strip() for t in sec.get("include", "").split(",") if t.strip()]
        for t in inc:
            if t not in earlier:
                raise ScenarioError(f"include names an unknown or later task {t!r}", w("include"))
            if earlier[t] not in ("family", "trace"):
                raise ScenarioError(f"task {t!r} has no curves to draw", w("include"))
        p["include"] = inc
        p["style"] = _choice(sec.get("style", "causal"), STYLES, w("style"))
        p["file"] = _filename(sec.get("file", f"{name}.svg"), w("file"))
        p["title"] = sec.get("title", "")
        p["grid"] = _int(sec.get("grid", "401"), w("grid"), 8)
    elif kind == "verify":
        from .verify import SUITES

        suite = sec.get("suite", "quick").strip()
        if suite not in SUITES and suite not in ("all", "quick"):
            raise ScenarioError(f"unknown suite {suite!r}", w("suite"))
        p["suite"] = suite
        p["file"] = _filename(sec.get("file", f"{name}.txt"), w("file"))
    return TaskSpec(name, kind, p)


def _parser() -> configparser.ConfigParser:
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=(";",),
                                   comment_prefixes=("#", ";"), strict=True)
    return cp


def parse_scenario(text: str, default_name: str = "scenario", source: str = "") -> Scenario:
    cp = _parser()
    try:
        cp.read_string(text, source=source or "<scenario>")
    except configparser.Error as e:
        raise ScenarioError(str(e).replace("\n", " ")) from None
    known = {"scenario", "metric", "region", "tolerances", "output"}
    for s in cp.sections():
        if s not in known and not s.startswith("task."):
            raise ScenarioError(f"unknown section [{s}]")
    if "metric" not in cp:
        raise ScenarioError("missing [metric]")
    if "region" not in cp:
        raise ScenarioError("missing [region]")
    meta = cp["scenario"] if "scenario" in cp else {}
    extra = set(meta.keys()) - {"name", "title"}
    if extra:
        raise ScenarioError(f"unknown keys {sorted(extra)}", "[scenario]")
    name = meta.get("name", default_name).strip() or default_name
    metric = _metric_from_section(cp["metric"])
    region = _region(cp["region"])
    tol = _tolerances(cp["tolerances"] if "tolerances" in cp else None)
    out_dir = ""
    if "output" in cp:
        extra = set(cp["output"].keys()) - {"dir"}
        if extra:
            raise ScenarioError(f"unknown keys {sorted(extra)}", "[output]")
        out_dir = cp["output"].get("dir", "").strip()
        if out_dir and (Path(out_dir).is_absolute() or ".." in Path(out_dir).parts):
            raise ScenarioError("dir must be a relative path inside the output root", "[output] dir")
    tasks: list[TaskSpec] = []
    earlier: dict[str, str] = {}
    for s in cp.sections():
        if not s.startswith("task."):
            continue
        tname = s[len("task."):]
        if not tname:
            raise ScenarioError("empty task name", f"[{s}]")
        t = _task(tname, cp[s], earlier)
        earlier[tname] = t.kind
        tasks.append(t)
    if not tasks:
        raise ScenarioError("no [task.NAME] sections")
    files: dict[str, str] = {}
    for t in tasks:
        for k in ("file", "manifest", "members", "svg"):
            f = t.params.get(k)
            if f:
                if f in files:
                    raise ScenarioError(f"file {f!r} is written by both {files[f]} and {t.name}")
                files[f] = t.name
    return Scenario(name, metric, region, tasks, tol, out_dir or name, meta.get("title", ""), source)


def load_scenario(path) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ScenarioError(f"cannot read scenario: {e.strerror}", str(path)) from None
    return parse_scenario(text, default_name=path.stem, source=str(path))


def load_metric_file(path) -> Metric:
    """A file holding a ``[metric]`` section (a scenario file works too)."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ScenarioError(f"cannot read metric file: {e.strerror}", str(path)) from None
    cp = _parser()
    try:
        cp.read_string(text, source=str(path))
    except configparser.Error as e:
        raise ScenarioError(str(e).replace("\n", " ")) from None
    if "metric" not in cp:
        raise ScenarioError("missing [metric]", str(path))
    return _metric_from_section(cp["metric"])
