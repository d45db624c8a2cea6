import math

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from sigflow.metric import (
    ISOTROPIC,
    SPACELIKE,
    TIMELIKE,
    DiscriminantError,
    Direction,
    F_value,
    Metric,
    brioschi_K1,
    causal_type,
    discriminant,
    find_discriminant_point,
    isotropic_directions,
    on_discriminant,
    project_to_discriminant,
    trace_discriminant,
)

E1 = Metric("-y", "0", "1")
E2 = Metric("-(y + x^2)", "0", "1")
EUCLID = Metric("1", "0", "1")
C3 = Metric("x", "0", "1 + x")


def test_discriminant_values():
    assert discriminant(E1, (2, 3)) == (-3.0, (0.0, -1.0))
    assert discriminant(E2, (1, 1))[0] == -2.0
    for q in [(0, 0), (2.5, -1), (-3, 7)]:
        assert discriminant(EUCLID, q)[0] == 1.0


def test_F_values():
    assert F_value(E1, (0, 1), 0.0) == -1.0
    assert F_value(E1, (0, 1), 1.0) == 0.0
    assert F_value(E1, (1, 0.25), 0.5) == 0.0
    assert F_value(E1, (0, 1), Direction.at_infinity()) == 1.0


def test_causal_types():
    assert causal_type(E1, (0, 1), 2.0) == TIMELIKE
    assert causal_type(E1, (0, 1), 0.0) == SPACELIKE
    assert causal_type(E1, (0, 1), 1.0) == ISOTROPIC


def _affine(roots):
    return sorted((round(d.p, 12), k) for d, k in roots)


def test_isotropic_directions():
    assert _affine(isotropic_directions(E1, (0, 1))) == [(-1.0, 1), (1.0, 1)]
    assert _affine(isotropic_directions(E1, (0, 0))) == [(0.0, 2)]
    assert isotropic_directions(E1, (0, -1)) == []


def test_isotropic_direction_at_infinity():
    m = Metric("1", "0", "y")
    roots = isotropic_directions(m, (0, 0))
    assert [(d.infinite, k) for d, k in roots] == [(True, 2)]


def test_brioschi_examples():
    assert brioschi_K1(E1, (0, 0)) == pytest.approx(0.25, abs=1e-15)
    for q in [(0.3, -2.0), (-1.0, 0.7), (4.0, 1e-3)]:
        assert brioschi_K1(E1, q) == pytest.approx(0.25, abs=1e-12)
    for q in [(0, 0), (1.0, -2.0)]:
        assert brioschi_K1(EUCLID, q) == 0.0


def test_brioschi_matches_gaussian_curvature_off_discriminant():
    # K1 = Delta^2 K with K from sympy for a Riemannian polynomial metric
    x, y = sp.symbols("x y")
    E, F, G = 1 + x**2, x * y / 3, 2 + y**2
    det = E * G - F**2
    K = _sympy_gauss(E, F, G, x, y)
    m = Metric("1 + x^2", "x*y/3", "2 + y^2")
    for q in [(0.2, 0.4), (-0.7, 1.1), (1.3, -0.5)]:
        want = float((det**2 * K).subs({x: q[0], y: q[1]}))
        assert brioschi_K1(m, q) == pytest.approx(want, rel=1e-10, abs=1e-12)


def _sympy_gauss(E, F, G, u, v):
    """Gaussian curvature by the Brioschi formula."""
    d = sp.diff
    A = sp.Matrix([
        [-d(E, v, 2) / 2 + d(F, u, v) - d(G, u, 2) / 2, d(E, u) / 2, d(F, u) - d(E, v) / 2],
        [d(F, v) - d(G, u) / 2, E, F],
        [d(G, v) / 2, F, G],
    ])
    B = sp.Matrix([[0, d(E, v) / 2, d(G, u) / 2], [d(E, v) / 2, E, F], [d(G, u) / 2, F, G]])
    return (A.det() - B.det()) / (E * G - F**2) ** 2


def test_trace_discriminant_E1():
    pts = trace_discriminant(E1, (0, 1e-3), 0.5, 0.01)
    assert len(pts) == 51
    assert np.max(np.abs(pts[:, 1])) <= 1e-10
    assert np.allclose(np.diff(pts[:, 0]), 0.01, atol=1e-12)


def test_trace_discriminant_parabola():
    pts = trace_discriminant(E2, (0, 1e-3), 0.8, 0.01, both_ways=True)
    assert np.max(np.abs(pts[:, 1] + pts[:, 0] ** 2)) <= 1e-8
    assert pts[0, 0] < -0.3 and pts[-1, 0] > 0.3


def test_trace_discriminant_vertical_line():
    pts = trace_discriminant(C3, (1e-3, 0), 0.4, 0.01, both_ways=True)
    assert np.max(np.abs(pts[:, 0])) <= 1e-10
    assert np.ptp(pts[:, 1]) == pytest.approx(0.8, abs=1e-9)


def test_project_and_membership():
    q = project_to_discriminant(E2, (0.3, 0.1))
    assert on_discriminant(E2, q)
    assert not on_discriminant(E2, (0.3, 0.1))
    with pytest.raises(DiscriminantError):
        project_to_discriminant(EUCLID, (0, 0))


def test_find_discriminant_point():
    q = find_discriminant_point(E2, (-1, 1, -1, 1))
    assert abs(q[1] + q[0] ** 2) <= 1e-12
    with pytest.raises(DiscriminantError):
        find_discriminant_point(EUCLID, (-1, 1, -1, 1))


def test_normal_form_coefficients():
    m = Metric.normal_form("-(1 + x)", -1.0)
    j = m.jet(0.5, 0.2)
    om = -(1.5)
    assert j.a == pytest.approx(om * (0.2 + 0.25))
    assert j.b == 0.0 and j.c == pytest.approx(-om)
    assert m.normal_form[1] == -1.0


def test_direction_helpers():
    assert Direction.at_infinity().infinite
    d = Direction.from_homogeneous(2.0, 1.0)
    assert d.p == 0.5
    assert Direction.from_homogeneous(0.0, 3.0).infinite
    assert Direction.affine(1.0).distance(Direction.affine(-1.0)) == pytest.approx(math.pi / 2)
    assert Direction.affine(1e9).distance(Direction.at_infinity()) < 1e-8


# properties ----------------------------------------------------------------

coef = st.floats(-2.0, 2.0, allow_nan=False)


@settings(max_examples=100, deadline=None)
@given(coef, coef, st.floats(0.2, 2.0), st.floats(-3, 3), st.floats(-1, 1), st.floats(-1, 1))
def test_F_is_quadratic_form(a0, b0, c0, p, x, y):
    m = Metric(f"{a0!r} + x", f"{b0!r}", f"{c0!r} + y^2")
    j = m.jet(x, y)
    assert F_value(m, (x, y), p) == pytest.approx(j.a + 2 * j.b * p + j.c * p * p, rel=1e-12, abs=1e-12)
    # isotropic directions annihilate F
    for d, _ in isotropic_directions(m, (x, y)):
        val = F_value(m, (x, y), d)
        size = abs(j.a) + abs(j.b) * (1 if d.infinite else abs(d.p)) + abs(j.c) * (1 if d.infinite else d.p**2)
        assert abs(val) <= 1e-9 * max(size, 1.0)


@settings(max_examples=60, deadline=None)
@given(st.floats(0.1, 3.0), st.floats(-2, 2), st.floats(-2, 2))
def test_discriminant_scales_quadratically(k, x, y):
    m = Metric("x*y - 1", "x + 0.5", "2 + y^2")
    d = discriminant(m, (x, y))[0]
    assert discriminant(m.scaled(k), (x, y))[0] == pytest.approx(k * k * d, rel=1e-12, abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.floats(-2, 2), st.floats(-2, 2), st.floats(0.1, 3.0))
def test_K1_scales_cubically(x, y, k):
    m = Metric("x*y - y", "0.3*x", "1 + x^2")
    assert brioschi_K1(m.scaled(k), (x, y)) == pytest.approx(k**3 * brioschi_K1(m, (x, y)), rel=1e-9, abs=1e-12)
