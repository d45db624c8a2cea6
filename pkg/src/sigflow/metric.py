"""Binary quadratic metrics ``a dx^2 + 2b dx dy + c dy^2`` and their pointwise invariants."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .expr import Expr, X, Y, as_expr, const

__all__ = [
    "Direction",
    "Jet",
    "Metric",
    "MetricError",
    "DiscriminantError",
    "discriminant",
    "F_value",
    "causal_type",
    "isotropic_directions",
    "brioschi_K1",
    "trace_discriminant",
    "project_to_discriminant",
    "find_discriminant_point",
    "on_discriminant",
    "coefficient_scale",
    "TIMELIKE",
    "SPACELIKE",
    "ISOTROPIC",
]

TIMELIKE = "timelike"
SPACELIKE = "spacelike"
ISOTROPIC = "isotropic"

# |Delta| <= DISC_BAND * scale^2 counts as on the discriminant
DISC_BAND = 1e-9
TOL_ISO = 1e-9


class MetricError(ValueError):
    pass


class DiscriminantError(MetricError):
    """The discriminant curve is not regular where it was needed."""


@dataclass(frozen=True)
class Direction:
    """An element of RP^1: slope ``p = dy/dx``, or the vertical direction."""

    p: float = 0.0
    infinite: bool = False

    @classmethod
    def affine(cls, p: float) -> "Direction":
        return cls(float(p) + 0.0, False)

    @classmethod
    def at_infinity(cls) -> "Direction":
        return cls(0.0, True)

    @classmethod
    def from_homogeneous(cls, dx: float, dy: float) -> "Direction":
        if abs(dx) >= abs(dy):
            return cls(dy / dx, False)
        q = dx / dy
        return cls.at_infinity() if q == 0.0 else cls(1.0 / q, False)

    @property
    def angle(self) -> float:
        """Angle of the line in ``[0, pi)``."""
        if self.infinite:
            return math.pi / 2
        return math.atan(self.p) % math.pi

    @property
    def q(self) -> float:
        """Coordinate in the inverted chart, ``q = 1/p``."""
        if self.infinite:
            return 0.0
        return math.inf if self.p == 0.0 else 1.0 / self.p

    def distance(self, other: "Direction") -> float:
        d = abs(self.angle - other.angle) % math.pi
        return min(d, math.pi - d)

    def __str__(self) -> str:
        return "inf" if self.infinite else f"{self.p:.12g}"


@dataclass(frozen=True)
class Jet:
    """Coefficient values at a point with first (and optionally second) partials."""

    a: float
    b: float
    c: float
    a_x: float
    a_y: float
    b_x: float
    b_y: float
    c_x: float
    c_y: float
    second: dict | None = None

    def d2(self, name: str) -> float:
        if self.second is None:
            raise MetricError("second-order jet was not requested")
        return self.second[name]

    @property
    def delta(self) -> float:
        return self.a * self.c - self.b * self.b

    @property
    def delta_x(self) -> float:
        return self.a_x * self.c + self.a * self.c_x - 2.0 * self.b * self.b_x

    @property
    def delta_y(self) -> float:
        return self.a_y * self.c + self.a * self.c_y - 2.0 * self.b * self.b_y

    def F(self, p: float) -> float:
        return (self.c * p + 2.0 * self.b) * p + self.a

    def F_x(self, p: float) -> float:
        return (self.c_x * p + 2.0 * self.b_x) * p + self.a_x

    def F_y(self, p: float) -> float:
        return (self.c_y * p + 2.0 * self.b_y) * p + self.a_y

    def F_p(self, p: float) -> float:
        return 2.0 * (self.c * p + self.b)

    @property
    def scale(self) -> float:
        return max(
            1.0,
            abs(self.a), abs(self.b), abs(self.c),
            abs(self.a_x), abs(self.a_y), abs(self.b_x),
            abs(self.b_y), abs(self.c_x), abs(self.c_y),
        )


_SECOND = ("xx", "xy", "yy")


class Metric:
    """Metric coefficients as expressions, with exact partial derivatives cached.

    ``normal_form`` is set for metrics built by :meth:`normal_form`; it holds
    ``(omega, eps)`` of ``omega*(r dx^2 - dy^2)``, ``r = y - eps*x^2``.
    """

    def __init__(self, a, b, c, *, name: str | None = None, normal_form=None):
        self.a = as_expr(a)
        self.b = as_expr(b)
        self.c = as_expr(c)
        self.name = name
        self.normal_form = normal_form
        coeffs = {"a": self.a, "b": self.b, "c": self.c}
        d: dict[tuple[str, str], Expr] = {}
        for k, e in coeffs.items():
            d[k, ""] = e
            ex, ey = e.diff("x"), e.diff("y")
            d[k, "x"], d[k, "y"] = ex, ey
            d[k, "xx"] = ex.diff("x")
            d[k, "xy"] = ex.diff("y")
            d[k, "yy"] = ey.diff("y")
        self._d = d

    @classmethod
    def from_strings(cls, a: str, b: str, c: str, **kw) -> "Metric":
        return cls(a, b, c, **kw)

    @classmethod
    def normal_form(cls, omega, eps: float, **kw) -> "Metric":
        """``ds^2 = omega*(r dx^2 - dy^2)`` with ``r = y - eps*x^2`` and a flat remainder of zero."""
        om = as_expr(omega)
        r = Y - const(eps) * X**2
        kw.setdefault("name", f"normal form omega={om}, eps={eps!r}")
        return cls(om * r, const(0.0), -om, normal_form=(om, float(eps)), **kw)

    def partial(self, coef: str, which: str = "") -> Expr:
        return self._d[coef, which]

    def scaled(self, k: float) -> "Metric":
        return Metric(const(k) * self.a, const(k) * self.b, const(k) * self.c, name=self.name)

    def jet(self, x: float, y: float, order: int = 1) -> Jet:
        d = self._d
        vals = [d[k, w].eval(x, y) for k in "abc" for w in ("", "x", "y")]
        a, a_x, a_y, b, b_x, b_y, c, c_x, c_y = vals
        second = None
        if order >= 2:
            second = {f"{k}_{w}": d[k, w].eval(x, y) for k in "abc" for w in _SECOND}
        return Jet(a, b, c, a_x, a_y, b_x, b_y, c_x, c_y, second)

    def __repr__(self) -> str:
        return f"Metric(a={self.a}, b={self.b}, c={self.c})"


def _pt(q) -> tuple[float, float]:
    x, y = q
    return float(x), float(y)


def coefficient_scale(m: Metric, q) -> float:
    return m.jet(*_pt(q)).scale


def discriminant(m: Metric, q) -> tuple[float, tuple[float, float]]:
    """Return ``Delta(q) = (ac - b^2)(q)`` and its gradient."""
    j = m.jet(*_pt(q))
    return j.delta, (j.delta_x, j.delta_y)


def on_discriminant(m: Metric, q, band: float = DISC_BAND) -> bool:
    j = m.jet(*_pt(q))
    return abs(j.delta) <= band * j.scale**2


def F_value(m: Metric, q, p: Direction | float) -> float:
    if not isinstance(p, Direction):
        p = Direction.affine(p)
    j = m.jet(*_pt(q))
    if p.infinite:
        return j.c
    return j.F(p.p)


def causal_type(m: Metric, q, p: Direction | float, tol_iso: float = TOL_ISO) -> str:
    """Causal character of the direction ``p`` at ``q`` (timelike when ds^2 > 0).

    The isotropic band is relative to the size of the individual terms of F.
    """
    if not isinstance(p, Direction):
        p = Direction.affine(p)
    j = m.jet(*_pt(q))
    return _causal_from_jet(j, p, tol_iso)


def _causal_from_jet(j: Jet, p: Direction, tol_iso: float) -> str:
    if p.infinite:
        value, scale = j.c, abs(j.c)
    else:
        pp = p.p
        value = j.F(pp)
        scale = max(abs(j.c) * pp * pp, 2.0 * abs(j.b * pp), abs(j.a))
    return causal_label(value, scale, tol_iso)


def causal_label(value: float, scale: float, tol_iso: float = TOL_ISO) -> str:
    if abs(value) <= tol_iso * scale:
        return ISOTROPIC
    return TIMELIKE if value > 0 else SPACELIKE


def _quadratic_roots(A: float, B: float, C: float, band: float) -> list[tuple[float, int]]:
    """Real roots of A t^2 + B t + C in the affine chart; ``inf`` marks a root at infinity."""
    scale = max(abs(A), abs(B), abs(C))
    if scale == 0.0:
        raise MetricError("degenerate quadratic")
    if abs(A) <= band * scale:
        if abs(B) <= band * scale:
            return [(math.inf, 2)]
        return [(-C / B, 1), (math.inf, 1)]
    disc = B * B - 4.0 * A * C
    if abs(disc) <= band * max(B * B, abs(4.0 * A * C)):
        return [(-B / (2.0 * A), 2)]
    if disc < 0.0:
        return []
    s = math.sqrt(disc)
    qq = -0.5 * (B + math.copysign(s, B))
    r1, r2 = qq / A, C / qq
    return sorted([(r1, 1), (r2, 1)])


def isotropic_directions(m: Metric, q, band: float = DISC_BAND) -> list[tuple[Direction, int]]:
    """Real roots of ``F(q, .)`` over RP^1 with multiplicity."""
    j = m.jet(*_pt(q))
    out = []
    if abs(j.delta) <= band * j.scale**2 and abs(j.c) > band * j.scale:
        return [(Direction.affine(-j.b / j.c), 2)]
    for r, mult in _quadratic_roots(j.c, 2.0 * j.b, j.a, band):
        out.append((Direction.at_infinity() if math.isinf(r) else Direction.affine(r), mult))
    return out


def _det3(m) -> float:
    return (
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    )


def brioschi_K1(m: Metric, q) -> float:
    """Numerator ``det A - det B`` of the Brioschi formula with E=a, F=b, G=c.

    Equals ``Delta^2 * K`` off the discriminant and stays smooth across it.
    """
    j = m.jet(*_pt(q), order=2)
    E, F, G = j.a, j.b, j.c
    E_u, E_v = j.a_x, j.a_y
    F_u, F_v = j.b_x, j.b_y
    G_u, G_v = j.c_x, j.c_y
    E_vv = j.d2("a_yy")
    F_uv = j.d2("b_xy")
    G_uu = j.d2("c_xx")
    A = (
        (-0.5 * E_vv + F_uv - 0.5 * G_uu, 0.5 * E_u, F_u - 0.5 * E_v),
        (F_v - 0.5 * G_u, E, F),
        (0.5 * G_v, F, G),
    )
    B = (
        (0.0, 0.5 * E_v, 0.5 * G_u),
        (0.5 * E_v, E, F),
        (0.5 * G_u, F, G),
    )
    return _det3(A) - _det3(B)


def project_to_discriminant(m: Metric, q, tol: float = 1e-14, max_iter: int = 60) -> np.ndarray:
    """Newton projection of ``q`` onto ``Delta = 0`` along the gradient."""
    x, y = _pt(q)
    best = None
    for _ in range(max_iter):
        j = m.jet(x, y)
        d, gx, gy = j.delta, j.delta_x, j.delta_y
        g2 = gx * gx + gy * gy
        if g2 <= (1e-12 * j.scale**2) ** 2:
            raise DiscriminantError(f"gradient of the discriminant vanishes near ({x:.6g}, {y:.6g})")
        if best is None or abs(d) < best[0]:
            best = (abs(d), x, y)
        if abs(d) <= tol * j.scale**2:
            return np.array([x, y])
        x -= d * gx / g2
        y -= d * gy / g2
    if best is not None and best[0] <= 1e-10:
        return np.array([best[1], best[2]])
    raise DiscriminantError(f"Newton projection onto the discriminant did not converge from {q}")


def trace_discriminant(
    m: Metric,
    seed,
    arclength: float,
    step: float,
    *,
    both_ways: bool = False,
    bounds: Sequence[float] | None = None,
) -> np.ndarray:
    """March along ``Delta = 0`` by tangent prediction and Newton correction.

    Returns an ``(n, 2)`` array starting at the projected seed (or ending there
    and continuing, when ``both_ways``). A negative ``step`` walks the other way.
    """
    if step == 0.0:
        raise ValueError("step must be non-zero")
    if both_ways:
        back = trace_discriminant(m, seed, arclength, -step, bounds=bounds)
        fwd = trace_discriminant(m, seed, arclength, step, bounds=bounds)
        return np.vstack([back[::-1], fwd[1:]])
    q = project_to_discriminant(m, seed)
    pts = [q]
    n = int(math.ceil(arclength / abs(step) - 1e-12))
    h = abs(step)
    sgn = 1.0 if step > 0 else -1.0
    prev_t = None
    for _ in range(n):
        _, (gx, gy) = discriminant(m, q)
        g = math.hypot(gx, gy)
        t = np.array([-gy, gx]) / g
        if prev_t is None:
            t = sgn * t
        elif float(t @ prev_t) < 0:
            t = -t
        q = project_to_discriminant(m, q + h * t)
        pts.append(q)
        prev_t = t
        if bounds is not None:
            xmin, xmax, ymin, ymax = bounds
            if not (xmin <= q[0] <= xmax and ymin <= q[1] <= ymax):
                pts.pop()
                break
    return np.array(pts)


def find_discriminant_point(m: Metric, bounds: Sequence[float], n: int = 41) -> np.ndarray:
    """Locate some point of ``Delta = 0`` inside the box by a grid sign scan."""
    xmin, xmax, ymin, ymax = bounds
    xs = np.linspace(xmin, xmax, n)
    ys = np.linspace(ymin, ymax, n)
    cx, cy = 0.5 * (xmin + xmax), 0.5 * (ymin + ymax)
    cands = []
    for i, x in enumerate(xs):
        vals = [discriminant(m, (x, y))[0] for y in ys]
        for k in range(n - 1):
            if vals[k] == 0.0:
                cands.append((x, ys[k]))
            elif vals[k] * vals[k + 1] < 0.0:
                y0 = ys[k] - vals[k] * (ys[k + 1] - ys[k]) / (vals[k + 1] - vals[k])
                cands.append((x, y0))
    if not cands:
        raise DiscriminantError("no discriminant point found in the region")
    cands.sort(key=lambda p: (p[0] - cx) ** 2 + (p[1] - cy) ** 2)
    return project_to_discriminant(m, cands[0])


def sample_points(points: Iterable, k: int) -> np.ndarray:
    pts = np.asarray(list(points), dtype=float)
    if len(pts) <= k:
        return pts
    idx = np.linspace(0, len(pts) - 1, k).round().astype(int)
    return pts[idx]
