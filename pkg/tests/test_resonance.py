import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sigflow.resonance import EXACT, REAL_PART, center_resonances, resonance_scan, spectrum_resonances


def test_saddle_half_trace_resonance():
    rep = resonance_scan((1.2807764064044151, -0.7807764064044151), 6)
    rel = rep.find((2, 2, 0), "1")
    assert rel is not None and rel.kind == EXACT and rel.order == 4


def test_constructed_node_resonance():
    rep = resonance_scan((0.4, 0.2), 4)
    assert rep.find((0, 2, 0), "eps1") is not None


def test_focus_real_part_resonance():
    e = 0.25 + 0.9682458365518543j
    rep = resonance_scan((e, e.conjugate()), 4)
    rel = rep.find((2, 2, 0), "1")
    assert rel is not None
    assert rep.of_order(4, REAL_PART)


def test_trivial_relations_are_not_reported():
    rep = resonance_scan((0.37, -0.11), 1)
    assert not rep


def test_scan_bound():
    with pytest.raises(ValueError):
        resonance_scan((0.3, 0.2), 0)
    rep = resonance_scan((0.4, 0.2), 6)
    assert max(r.order for r in rep.relations) <= 6


def test_center_and_spectrum_variants():
    rep = center_resonances(2.0, -1.0, 3)
    assert rep.find((1, 2), "0") is not None
    rep = spectrum_resonances((1.0, 2.0, 1.0), 2)
    assert rep.find((2, 0, 0), "lambda2") is not None


@settings(max_examples=100, deadline=None)
@given(st.tuples(st.integers(1, 3), st.integers(0, 3), st.integers(0, 3)), st.floats(-1.0, 1.0),
       st.sampled_from(["eps2", "1"]))
def test_planted_relation_is_found(s, e2, target):
    if sum(s) < 2:
        s = (s[0], s[1], s[2] + 1)
    t = e2 if target == "eps2" else 1.0
    e1 = (t - s[1] * e2 - s[2]) / s[0]
    rep = resonance_scan((e1, e2), sum(s), 1e-9)
    assert rep.find(s, target) is not None


@settings(max_examples=100, deadline=None)
@given(st.floats(-2, 2), st.floats(-2, 2))
def test_reported_relations_hold(e1, e2):
    rep = resonance_scan((e1, e2), 5, 1e-9)
    tg = {"eps1": e1, "eps2": e2, "1": 1.0}
    for r in rep.relations:
        assert abs(r.s[0] * e1 + r.s[1] * e2 + r.s[2] - tg[r.target]) <= 1e-9
