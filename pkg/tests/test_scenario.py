import math
from pathlib import Path

import pytest

from sigflow.scenario import ScenarioError, load_metric_file, load_scenario, parse_point, parse_scenario

BASE = """
[metric]
a = -y
b = 0
c = 1

[region]
x = -1, 1
y = -0.2, 1

[task.curve]
kind = classify-curve
samples = 7
"""

BUNDLED = sorted((Path(__file__).resolve().parents[1] / "src" / "sigflow" / "scenarios").glob("*.ini"))


def test_minimal_scenario_defaults():
    scn = parse_scenario(BASE, default_name="e1")
    assert scn.name == "e1" and scn.output_dir == "e1"
    assert scn.region == (-1.0, 1.0, -0.2, 1.0)
    assert scn.tolerances.rtol == 1e-11 and scn.tolerances.iso == 1e-9
    (t,) = scn.tasks
    assert t.kind == "classify-curve" and t.params == {"samples": 7, "grid": 401, "file": "curve.csv"}


def test_normal_form_metric_and_tasks():
    scn = parse_scenario("""
[scenario]
name = nf
title = saddle
[metric]
omega = -1
eps = -1    ; inline comment
[region]
x = -0.5, 0.5
y = -0.3, 0.3
[tolerances]
rtol = 1e-10
[output]
dir = sub/dir
[task.fam]
kind = family
at = 0, 0
phases = 4
sides = 1
svg = fam.svg
[task.tr]
kind = trace
start = 0.1, -0.2
direction = inf
sense = -1
[task.pic]
kind = portrait
include = fam, tr
""")
    assert scn.metric.normal_form[1] == -1.0
    assert scn.tolerances.rtol == 1e-10 and scn.output_dir == "sub/dir"
    fam, tr, pic = scn.tasks
    assert fam.params["phases"] == pytest.approx((0.0, math.pi / 2, math.pi, 3 * math.pi / 2))
    assert fam.params["sides"] == (1,)
    assert tr.params["direction"] == math.inf and tr.params["sense"] == -1
    assert pic.params["include"] == ["fam", "tr"]


@pytest.mark.parametrize(
    "patch, where",
    [
        (("a = -y", "a = -y +"), "[metric]"),
        (("a = -y", "a = -w"), "[metric]"),
        (("x = -1, 1", "x = 1, -1"), "[region]"),
        (("x = -1, 1", "x = -1"), "[region]"),
        (("samples = 7", "samples = 0"), "samples"),
        (("samples = 7", "sample = 7"), "unknown keys"),
        (("kind = classify-curve", "kind = draw"), "kind"),
        (("[task.curve]", "[task.curve]\nfile = ../x.csv"), "file"),
        (("[task.curve]", "[scenario]\ncolour = red\n[task.curve]"), "[scenario]"),
        (("[region]", "[extra]\nk = 1\n[region]"), "unknown section"),
    ],
)
def test_rejections(patch, where):
    with pytest.raises(ScenarioError) as info:
        parse_scenario(BASE.replace(*patch))
    assert where in str(info.value)


def test_missing_sections_and_tasks():
    with pytest.raises(ScenarioError, match="metric"):
        parse_scenario("[region]\nx = 0, 1\ny = 0, 1\n[task.t]\nkind = verify\n")
    with pytest.raises(ScenarioError, match="no \\[task"):
        parse_scenario(BASE.split("[task.curve]")[0])


def test_duplicate_output_file():
    text = BASE + "\n[task.again]\nkind = classify-curve\nfile = curve.csv\n"
    with pytest.raises(ScenarioError, match="curve.csv"):
        parse_scenario(text)


def test_portrait_include_must_be_earlier():
    text = BASE + "\n[task.pic]\nkind = portrait\ninclude = later\n"
    with pytest.raises(ScenarioError, match="later"):
        parse_scenario(text)
    text = BASE + "\n[task.pic]\nkind = portrait\ninclude = curve\n"
    with pytest.raises(ScenarioError, match="no curves"):
        parse_scenario(text)


def test_output_dir_must_stay_inside():
    for d in ("/abs", "../up"):
        with pytest.raises(ScenarioError, match="dir"):
            parse_scenario(BASE + f"\n[output]\ndir = {d}\n")


def test_parse_point():
    assert parse_point("0.5, -1") == (0.5, -1.0)
    for bad in ("1", "a, b", "1, 2, 3", "nan, 1"):
        with pytest.raises(ScenarioError):
            parse_point(bad)


def test_load_missing_file(tmp_path):
    with pytest.raises(ScenarioError, match="cannot read"):
        load_scenario(tmp_path / "none.ini")


def test_load_metric_file(tmp_path):
    f = tmp_path / "m.ini"
    f.write_text("[metric]\na = x\nb = 0\nc = 1 + x\n")
    m = load_metric_file(f)
    assert m.jet(0.5, 0.0).c == 1.5


@pytest.mark.parametrize("path", BUNDLED, ids=lambda p: p.stem)
def test_bundled_scenarios_parse(path):
    scn = load_scenario(path)
    assert scn.name == path.stem
    assert any(t.kind == "portrait" for t in scn.tasks)
