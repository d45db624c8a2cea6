import math
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from sigflow.flow import LiftedState, integrate_lifted
from sigflow.integrator import IntegratorConfig
from sigflow.metric import ISOTROPIC, SPACELIKE, TIMELIKE, Metric
from sigflow.plotting import Polyline, PortraitSpec, render_svg, split_by_label
from sigflow.report import REPORT_COLUMNS, TRACE_COLUMNS, atomic_write_text, csv_text, emit_csv
from sigflow.singular import classify

E1 = Metric("-y", "0", "1")
SVG = "{http://www.w3.org/2000/svg}"


def test_cells_round_trip():
    text = csv_text(("a", "b", "c", "d", "e"), [(0.1, math.inf, -math.inf, math.nan, True), (np.float64(1 / 3), None, "Z", 7, False)])
    lines = text.splitlines()
    assert lines[1] == "0.1,inf,-inf,nan,1"
    assert lines[2] == "0.3333333333333333,,Z,7,0"
    assert float(lines[2].split(",")[0]) == 1 / 3


def test_trace_csv_has_one_row_per_sample(tmp_path):
    cfg = IntegratorConfig(rtol=1e-10, atol=1e-12, t_max=0.99, sample_dt=0.01)
    tr = integrate_lifted(E1, LiftedState(0.0, 1.0, 0.0), cfg)
    assert len(tr) == 100
    n = emit_csv(tmp_path / "t.csv", tr)
    lines = (tmp_path / "t.csv").read_text().splitlines()
    assert n == 100 and len(lines) == 101
    assert lines[0] == ",".join(TRACE_COLUMNS)


def test_report_rows(tmp_path):
    pcs = [classify(E1, (x, 0.0)) for x in (-1.0, 0.0, 0.5)]
    assert emit_csv(tmp_path / "r.csv", pcs) == 3
    lines = (tmp_path / "r.csv").read_text().splitlines()
    assert lines[0] == ",".join(REPORT_COLUMNS) and len(lines) == 4
    for line in lines[1:]:
        cells = line.split(",")
        assert float(cells[2]) == 0.25 and cells[3] == "Z"


def test_atomic_write_leaves_no_temporaries(tmp_path):
    atomic_write_text(tmp_path / "sub" / "f.txt", "one")
    atomic_write_text(tmp_path / "sub" / "f.txt", "two")
    assert [p.name for p in (tmp_path / "sub").iterdir()] == ["f.txt"]
    assert (tmp_path / "sub" / "f.txt").read_text() == "two"


def test_split_by_label():
    x = np.arange(6.0)
    parts = split_by_label(x, x, [TIMELIKE, TIMELIKE, ISOTROPIC, SPACELIKE, SPACELIKE, SPACELIKE], "c")
    assert [p.style for p in parts] == [TIMELIKE, ISOTROPIC, SPACELIKE]
    assert [list(p.x) for p in parts] == [[0, 1, 2], [2, 3], [3, 4, 5]]
    assert [p.gid for p in parts] == ["c-0", "c-1", "c-2"]
    assert split_by_label(np.array([]), np.array([]), []) == []


def test_render_is_deterministic():
    spec = PortraitSpec(region=(-1, 1, -1, 1), title="t", points=[(0.0, 0.0)])
    t = np.linspace(-1, 1, 50)
    curves = [Polyline(t, t**2, TIMELIKE, "a"), Polyline(t, -t, SPACELIKE, "b")]
    assert render_svg(spec, curves) == render_svg(spec, curves)


def test_discriminant_only_svg_is_valid():
    t = np.linspace(-1, 1, 20)
    svg = render_svg(PortraitSpec(region=(-1, 1, -1, 1)), [], [Polyline(t, 0 * t, "discriminant", "discriminant-0")])
    root = ET.fromstring(svg)
    assert root.tag == SVG + "svg"
    g = next(e for e in root.iter(SVG + "g") if e.get("id") == "discriminant-0")
    style = g.find(SVG + "path").get("style")
    assert "stroke-dasharray" in style and "#595959" in style


def test_render_needs_something():
    with pytest.raises(ValueError):
        render_svg(PortraitSpec(region=(0, 1, 0, 1)), [])
