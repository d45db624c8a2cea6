"""Lifted geodesic fields, the blow-up chart and the Euler-Lagrange system.

States of the lifted flows are ``(x, y, s)`` with a chart tag: ``s = p = dy/dx``
in the affine chart and ``s = q = 1/p`` in the inverted chart.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .expr import Expr, as_expr
from .integrator import (
    Event,
    EventRecord,
    IntegrationError,
    IntegratorConfig,
    Trace,
    integrate,
)
from .metric import (
    ISOTROPIC,
    Direction,
    Jet,
    Metric,
    MetricError,
    DiscriminantError,
    causal_label,
    TOL_ISO,
    project_to_discriminant,
)
from .singular import (
    CubicM,
    SingularError,
    _mu,
    admissible_directions,
    classify,
    isotropic_root,
)

__all__ = [
    "AFFINE",
    "INVERTED",
    "LiftedState",
    "BlowUpState",
    "NaturalState",
    "LiftedTrace",
    "field_isotropic",
    "field_lifted",
    "chart_velocity",
    "blowup",
    "blowdown",
    "field_blowup",
    "blowup_pushforward",
    "integrate_lifted",
    "integrate_blowup",
    "trace_geodesic",
    "singular_eigenvector",
    "el_field",
    "el_integrate",
    "line_restriction",
    "SingularStartError",
]

AFFINE = 0
INVERTED = 1
CHART_NAMES = {AFFINE: "p", INVERTED: "q"}


class SingularStartError(SingularError):
    """Raised when a trace would start at a singular point of the lifted field."""


@dataclass(frozen=True)
class LiftedState:
    x: float
    y: float
    s: float
    chart: int = AFFINE

    @classmethod
    def from_direction(cls, x: float, y: float, d: Direction | float) -> "LiftedState":
        if not isinstance(d, Direction):
            d = Direction.affine(d)
        if d.infinite:
            return cls(x, y, 0.0, INVERTED)
        if abs(d.p) > 1.0:
            return cls(x, y, 1.0 / d.p, INVERTED)
        return cls(x, y, d.p, AFFINE)

    @property
    def direction(self) -> Direction:
        if self.chart == AFFINE:
            return Direction.affine(self.s)
        return Direction.at_infinity() if self.s == 0.0 else Direction.affine(1.0 / self.s)

    def array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.s])

    def switched(self) -> "LiftedState":
        if self.s == 0.0:
            raise ValueError("cannot switch chart at s = 0")
        return LiftedState(self.x, self.y, 1.0 / self.s, 1 - self.chart)


@dataclass(frozen=True)
class BlowUpState:
    x: float
    u: float
    p: float

    @property
    def v(self) -> float:
        return self.u - 1.0

    def array(self) -> np.ndarray:
        return np.array([self.x, self.u, self.p])


@dataclass(frozen=True)
class NaturalState:
    x: float
    y: float
    xdot: float
    ydot: float

    def array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.xdot, self.ydot])


def _as_state(s, chart: int | None) -> tuple[float, float, float, int]:
    if isinstance(s, LiftedState):
        return s.x, s.y, s.s, s.chart
    x, y, v = (float(t) for t in s)
    return x, y, v, AFFINE if chart is None else chart


# isotropic field (4) ------------------------------------------------------


def _isotropic(j: Jet, s: float, chart: int) -> np.ndarray:
    if chart == AFFINE:
        p = s
        g1 = j.c * p + j.b
        return np.array([g1, p * g1, -0.5 * (j.F_x(p) + p * j.F_y(p))])
    q = s
    # Ft(q) = c + 2bq + aq^2 = q^2 F(1/q)
    Ft_q = 2.0 * (j.b + j.a * q)
    Ft_x = j.c_x + 2.0 * j.b_x * q + j.a_x * q * q
    Ft_y = j.c_y + 2.0 * j.b_y * q + j.a_y * q * q
    return np.array([0.5 * q * Ft_q, 0.5 * Ft_q, -0.5 * (Ft_y + q * Ft_x)])


def field_isotropic(m: Metric, s, chart: int | None = None) -> np.ndarray:
    """``(F_p/2, p F_p/2, -(F_x + p F_y)/2)`` in the state's chart."""
    x, y, v, ch = _as_state(s, chart)
    return _isotropic(m.jet(x, y), v, ch)


# lifted field (5) ---------------------------------------------------------


def _lifted(j: Jet, s: float, chart: int) -> np.ndarray:
    cm = CubicM(*_mu(j))
    d = j.delta
    if chart == AFFINE:
        return np.array([2.0 * d, 2.0 * s * d, cm(s)])
    return np.array([2.0 * s * d, 2.0 * d, -cm.inverted(s)])


def field_lifted(m: Metric, s, chart: int | None = None) -> np.ndarray:
    """``(2 Delta, 2p Delta, M(q, p))``; in the inverted chart ``(2q Delta, 2 Delta, -q^3 M(1/q))``."""
    x, y, v, ch = _as_state(s, chart)
    return _lifted(m.jet(x, y), v, ch)


_FIELDS = {"lifted": _lifted, "isotropic": _isotropic}


def chart_velocity(vel: np.ndarray, s: float, chart_from: int) -> np.ndarray:
    """Push a velocity through ``s -> 1/s`` (the chart change)."""
    return np.array([vel[0], vel[1], -vel[2] / (s * s)])


def _F_chart(j: Jet, s: float, chart: int) -> tuple[float, float]:
    """F (or ``q^2 F`` in the inverted chart) and the scale of its terms."""
    if chart == AFFINE:
        val = j.F(s)
        scale = max(abs(j.c) * s * s, 2.0 * abs(j.b * s), abs(j.a))
    else:
        val = j.c + 2.0 * j.b * s + j.a * s * s
        scale = max(abs(j.c), 2.0 * abs(j.b * s), abs(j.a) * s * s)
    return val, scale


# blow-up -------------------------------------------------------------------


def blowup(s, eps: float) -> BlowUpState:
    """``u = (y - eps x^2) / p^2``."""
    x, y, p = (float(t) for t in (s.array() if isinstance(s, LiftedState) else s))
    if p == 0.0:
        raise ValueError("blow-up is undefined on p = 0")
    return BlowUpState(x, (y - eps * x * x) / (p * p), p)


def blowdown(s, eps: float) -> np.ndarray:
    x, u, p = (float(t) for t in (s.array() if isinstance(s, BlowUpState) else s))
    return np.array([x, eps * x * x + u * p * p, p])


def _omega_parts(metric_or_omega) -> tuple[Expr, float | None]:
    if isinstance(metric_or_omega, Metric):
        if metric_or_omega.normal_form is None:
            raise MetricError("metric carries no normal-form data")
        om, eps = metric_or_omega.normal_form
        return om, eps
    return as_expr(metric_or_omega), None


def field_blowup(omega, eps: float | None, s) -> np.ndarray:
    """Blown-up lifted field with zero flat remainder.

    The velocity is ordered like the state, ``(x', u', p')`` with
    ``x' = 2 omega u p``, ``u' = 2u(u-1) N1`` and ``p' = p M1 - 2 eps x omega``.
    """
    om, eps0 = _omega_parts(omega)
    if eps is None:
        eps = eps0
    x, u, p = (float(t) for t in (s.array() if isinstance(s, BlowUpState) else s))
    y = eps * x * x + u * p * p
    w = om.eval(x, y)
    wx = _cached_diff(om, "x").eval(x, y)
    wy = _cached_diff(om, "y").eval(x, y)
    M1 = p * (u * p * wy + wx) * (1.0 - u) + w * (2.0 - u)
    N1 = u * p * p * wy + p * wx + w
    return np.array([2.0 * w * u * p, (u - 1.0) * 2.0 * u * N1, p * M1 - 2.0 * eps * x * w])


_DIFF_CACHE: dict[tuple[int, str], Expr] = {}


def _cached_diff(e: Expr, v: str) -> Expr:
    key = (id(e), v)
    hit = _DIFF_CACHE.get(key)
    if hit is None or hit[0] is not e:
        hit = (e, e.diff(v))
        _DIFF_CACHE[key] = hit
    return hit[1]


def blowup_pushforward(m: Metric, s: BlowUpState | Sequence[float]) -> np.ndarray:
    """Lifted field of a normal-form metric carried to ``(x, u, p)`` and divided by ``-omega p``."""
    om, eps = _omega_parts(m)
    x, u, p = (float(t) for t in (s.array() if isinstance(s, BlowUpState) else s))
    y = eps * x * x + u * p * p
    vx, vy, vp = field_lifted(m, (x, y, p))
    # u = (y - eps x^2)/p^2
    du = (vy - 2.0 * eps * x * vx) / (p * p) - 2.0 * (y - eps * x * x) * vp / p**3
    k = -om.eval(x, y) * p
    return np.array([vx, du, vp]) / k


# traces --------------------------------------------------------------------


@dataclass
class LiftedTrace:
    """Samples of a lifted trajectory with per-sample diagnostics."""

    t: np.ndarray
    x: np.ndarray
    y: np.ndarray
    s: np.ndarray
    chart: np.ndarray
    events: list[EventRecord] = field(default_factory=list)
    status: str = ""
    sample_events: list[str] = field(default_factory=list)
    delta: np.ndarray | None = None
    F: np.ndarray | None = None
    causal: list[str] | None = None
    # orientation of the field in the final chart (chart switches can flip it)
    orient: int = 1

    def __len__(self) -> int:
        return len(self.t)

    @property
    def p(self) -> np.ndarray:
        """Slope ``dy/dx`` per sample (``inf`` for vertical directions)."""
        out = self.s.astype(float).copy()
        inv = self.chart == INVERTED
        with np.errstate(divide="ignore"):
            out[inv] = 1.0 / self.s[inv]
        return out

    @property
    def xy(self) -> np.ndarray:
        return np.column_stack([self.x, self.y])

    def diagnose(self, m: Metric, tol_iso: float = TOL_ISO) -> "LiftedTrace":
        d, f, lab = [], [], []
        for x, y, s, ch in zip(self.x, self.y, self.s, self.chart):
            j = m.jet(x, y)
            d.append(j.delta)
            val, scale = _F_chart(j, s, int(ch))
            f.append(val)
            lab.append(causal_label(val, scale, tol_iso))
        self.delta, self.F, self.causal = np.array(d), np.array(f), lab
        return self

    def rows(self):
        for i in range(len(self.t)):
            yield (
                self.t[i], self.x[i], self.y[i], self.s[i], CHART_NAMES[int(self.chart[i])],
                None if self.delta is None else self.delta[i],
                None if self.F is None else self.F[i],
                None if self.causal is None else self.causal[i],
                self.sample_events[i] if self.sample_events else "",
            )

    @staticmethod
    def concat(parts: list["LiftedTrace"]) -> "LiftedTrace":
        parts = [p for p in parts if len(p)]
        out = LiftedTrace(
            np.concatenate([p.t for p in parts]),
            np.concatenate([p.x for p in parts]),
            np.concatenate([p.y for p in parts]),
            np.concatenate([p.s for p in parts]),
            np.concatenate([p.chart for p in parts]),
        )
        for p in parts:
            out.events.extend(p.events)
            out.sample_events.extend(p.sample_events or [""] * len(p))
        out.status = parts[-1].status if parts else ""
        return out


def _in_bounds(bounds, x: float, y: float) -> bool:
    if bounds is None:
        return True
    xmin, xmax, ymin, ymax = bounds
    return xmin <= x <= xmax and ymin <= y <= ymax


def integrate_lifted(
    m: Metric,
    start: LiftedState,
    config: IntegratorConfig = IntegratorConfig(),
    *,
    kind: str = "lifted",
    sense: int = 1,
    stop: Callable[[np.ndarray, int], str | None] | None = None,
    events: Sequence[Event] = (),
    arclength: bool = False,
) -> LiftedTrace:
    """Integrate field (4) or (5) with projective chart switching.

    The chart flips from ``p`` to ``q`` when ``|p|`` exceeds
    ``config.chart_switch`` and back when ``|q|`` exceeds ``2/chart_switch``.
    Orientation is carried across the switch so the curve keeps its direction.
    The returned parameter ``t`` is the accumulated flow-parameter length, or
    the chart arclength when ``arclength`` normalizes the field (same orbits,
    no crawling near degenerate singular points).
    """
    fld = _FIELDS[kind]
    T = config.chart_switch
    state = start.array()
    chart = start.chart
    orient = float(sense)
    t_used = 0.0
    steps_left = config.max_steps
    pieces: list[LiftedTrace] = []
    status = "budget"
    # start in the chart where |s| is below its switch threshold
    if abs(state[2]) > (T if chart == AFFINE else 2.0 / T):
        j = m.jet(state[0], state[1])
        v_map = chart_velocity(orient * fld(j, state[2], chart), state[2], chart)
        new_state = np.array([state[0], state[1], 1.0 / state[2]])
        if float(v_map @ (orient * fld(j, new_state[2], 1 - chart))) < 0.0:
            orient = -orient
        state, chart = new_state, 1 - chart
    while True:
        ch = chart
        o = orient

        def fun(t, y, ch=ch, o=o):
            v = o * fld(m.jet(y[0], y[1]), y[2], ch)
            if arclength:
                n = math.sqrt(float(v @ v))
                return v / n if n > 0.0 else v
            return v

        limit = T if ch == AFFINE else 2.0 / T
        evs = [Event("chart", lambda t, y, L=limit: abs(y[2]) - L, terminal=True, direction=1)]
        evs.extend(events)

        def stopper(t, y, ch=ch):
            if not _in_bounds(config.bounds, y[0], y[1]):
                return "bounds"
            if arclength:
                raw = fld(m.jet(y[0], y[1]), y[2], ch)
                if math.sqrt(float(raw @ raw)) < config.arrest_band:
                    return "arrest"
            if stop is not None:
                return stop(y, ch)
            return None

        cfg = config.with_(t_max=config.t_max - t_used, max_steps=steps_left)
        tr = integrate(fun, state, cfg, events=evs, stop=stopper)
        n = len(tr.t)
        piece = LiftedTrace(
            t_used + tr.t, tr.y[:, 0], tr.y[:, 1], tr.y[:, 2], np.full(n, ch, dtype=int),
            sample_events=[""] * n,
        )
        for ev in tr.events:
            ev.t += t_used
            ev.info.setdefault("chart", ch)
        steps_left -= tr.nsteps
        t_used += float(tr.t[-1])
        last = tr.events[-1] if tr.events else None
        if tr.status == "event" and last is not None and last.name == "chart":
            piece.events = tr.events
            piece.sample_events[-1] = "chart"
            pieces.append(piece)
            xe, ye, se = tr.y[-1]
            j = m.jet(xe, ye)
            v_old = o * fld(j, se, ch)
            new_state = np.array([xe, ye, 1.0 / se])
            v_map = chart_velocity(v_old, se, ch)
            v_new = o * fld(j, new_state[2], 1 - ch)
            if float(v_map @ v_new) < 0.0:
                orient = -orient
            state, chart = new_state, 1 - ch
            if steps_left <= 0 or t_used >= config.t_max:
                status = "budget"
                break
            continue
        if tr.status == "event" and last is not None:
            piece.sample_events[-1] = last.name
            status = last.name
        else:
            status = tr.status
            if tr.status == "arrest":
                piece.sample_events[-1] = "arrest"
        piece.events = tr.events
        pieces.append(piece)
        break
    out = LiftedTrace.concat(pieces)
    out.status = status
    out.orient = int(orient)
    return out


def integrate_blowup(
    omega,
    eps: float | None,
    start: BlowUpState | Sequence[float],
    config: IntegratorConfig = IntegratorConfig(),
    *,
    sense: int = 1,
    stop: Callable[[np.ndarray], str | None] | None = None,
) -> Trace:
    """Integrate the blown-up field in ``(x, u, p)``."""
    om, eps0 = _omega_parts(omega)
    if eps is None:
        eps = eps0
    if eps is None:
        raise ValueError("eps is required")
    y0 = start.array() if isinstance(start, BlowUpState) else np.asarray(start, dtype=float)

    def fun(t, y):
        return sense * field_blowup(om, eps, y)

    def stopper(t, y):
        if config.bounds is not None:
            x, yy, _ = blowdown(y, eps)
            if not _in_bounds(config.bounds, x, yy):
                return "bounds"
        return stop(y) if stop is not None else None

    return integrate(fun, y0, config, stop=stopper)


# geodesic traces with crossings -------------------------------------------


def singular_eigenvector(m: Metric, q, d: Direction, h: float = 1e-6) -> tuple[np.ndarray, float, int]:
    """Unit eigenvector for ``lambda1`` of the lifted field at the singular point ``(q, d)``.

    Returns ``(e1, lambda1, chart)`` where ``e1`` lives in the chart's ``(x, y, s)``.
    The Jacobian is taken by central differences.
    """
    st = LiftedState.from_direction(float(q[0]), float(q[1]), d)
    base = st.array()
    J = np.empty((3, 3))
    for k in range(3):
        e = np.zeros(3)
        e[k] = h
        J[:, k] = (
            _lifted(m.jet(*(base + e)[:2]), (base + e)[2], st.chart)
            - _lifted(m.jet(*(base - e)[:2]), (base - e)[2], st.chart)
        ) / (2 * h)
    w, V = np.linalg.eig(J)
    # eigenvalue with an eigenvector transverse to the fibre (largest |dx, dy| part)
    best = None
    for k in range(3):
        if abs(w[k].imag) > 1e-9:
            continue
        v = V[:, k].real
        planar = math.hypot(v[0], v[1])
        if abs(w[k].real) < 1e-9 * max(1.0, np.abs(w).max()):
            continue
        if best is None or planar > best[0]:
            best = (planar, v / np.linalg.norm(v), w[k].real)
    if best is None or best[0] < 1e-8:
        raise SingularError("no eigendirection transverse to the fibre")
    return best[1], best[2], st.chart


def _relaunch_across(
    m: Metric, foot: np.ndarray, d: Direction, side_sign: float, delta: float
) -> tuple[LiftedState, int]:
    """Seed just across the discriminant along the smooth geodesic through ``(foot, d)``."""
    e1, lam1, chart = singular_eigenvector(m, foot, d)
    st = LiftedState.from_direction(foot[0], foot[1], d)
    base = st.array()
    for sgn in (1.0, -1.0):
        cand = base + sgn * delta * e1
        dd = m.jet(cand[0], cand[1]).delta
        if dd * side_sign < 0:
            break
    sense = 1 if lam1 > 0 else -1
    return LiftedState(cand[0], cand[1], cand[2], chart), sense


def _line_foot(m: Metric, x: float, y: float, d: Direction) -> np.ndarray | None:
    """Where the line through ``(x, y)`` with direction ``d`` meets ``Delta = 0`` (Newton)."""
    v = np.array([0.0, 1.0]) if d.infinite else np.array([1.0, d.p]) / math.hypot(1.0, d.p)
    tau = 0.0
    for _ in range(50):
        j = m.jet(x + tau * v[0], y + tau * v[1])
        g = j.delta_x * v[0] + j.delta_y * v[1]
        if g == 0.0:
            return None
        step = j.delta / g
        tau -= step
        if abs(step) <= 1e-16 * max(1.0, abs(tau)):
            break
    foot = np.array([x + tau * v[0], y + tau * v[1]])
    j = m.jet(*foot)
    if abs(j.delta) > 1e-12 * j.scale**2:
        return None
    return foot


def trace_geodesic(
    m: Metric,
    q0,
    direction: Direction | float,
    sense: int = 1,
    config: IntegratorConfig = IntegratorConfig(),
    *,
    kind: str = "lifted",
    disc_check: float = 1e-6,
    disc_stop: float = 1e-10,
    crossing_tol: float = 1e-2,
    relaunch_offset: float = 1e-6,
    max_crossings: int = 4,
    tol_iso: float = TOL_ISO,
) -> LiftedTrace:
    """Trace the geodesic through ``(q0, direction)`` and label its samples.

    The lifted flow leaves ``Delta = 0`` invariant, so a trajectory only
    approaches the discriminant. Once ``|Delta|`` drops below ``disc_check``
    the slope is compared with the simple non-isotropic admissible directions
    at the point where the tangent line meets the discriminant. A match means
    the geodesic is the smooth one through that point: a ``crossing`` event is
    recorded there and integration resumes on the other side along the same
    branch. Otherwise integration continues down to ``disc_stop`` (or until the
    velocity dies) and ends with an ``arrest`` event carrying the class of the
    nearby discriminant point.

    Orbits near the smooth branch follow hyperbolas of the saddle, so their
    slope error grows like ``(initial error) / |Delta|``; the check band keeps
    that error far below ``crossing_tol``.
    """
    st = LiftedState.from_direction(float(q0[0]), float(q0[1]), direction)
    j0 = m.jet(st.x, st.y)
    fld = _FIELDS[kind]
    v0 = fld(j0, st.s, st.chart)
    if float(np.linalg.norm(v0)) < max(config.arrest_band, 1e-12 * j0.scale**3):
        raise SingularStartError("start is a singular point of the lifted field; launch it as a family")

    def near(band, start: LiftedState):
        # armed only once the trajectory is clear of the band (relaunch seeds start inside it)
        j = m.jet(start.x, start.y)
        armed = [abs(j.delta) > band * j.scale**2]

        def f(y, ch):
            j = m.jet(y[0], y[1])
            inside = abs(j.delta) <= band * j.scale**2
            if not armed[0]:
                armed[0] = abs(j.delta) > 10.0 * band * j.scale**2
                return None
            return "discriminant" if inside else None
        return f

    pieces: list[LiftedTrace] = []

    def add(tr: LiftedTrace) -> None:
        if pieces:
            off = pieces[-1].t[-1]
            tr.t = tr.t + off
            for ev in tr.events:
                ev.t += off
            if len(tr) > 1:
                # the first sample repeats the previous end
                tr.t, tr.x, tr.y, tr.s, tr.chart = tr.t[1:], tr.x[1:], tr.y[1:], tr.s[1:], tr.chart[1:]
                tr.sample_events = tr.sample_events[1:]
        pieces.append(tr)

    crossings = 0
    cur, cur_sense = st, sense
    first = True
    while True:
        tr = integrate_lifted(m, cur, config, kind=kind, sense=cur_sense, stop=near(disc_check, cur))
        if first:
            pieces.append(tr)
            first = False
        else:
            add(tr)
        if tr.status != "discriminant":
            break
        x, y, s, ch = tr.x[-1], tr.y[-1], tr.s[-1], int(tr.chart[-1])
        here = LiftedState(x, y, s, ch).direction
        foot = _line_foot(m, x, y, here)
        match = None
        if foot is not None and crossings < max_crossings:
            try:
                roots = admissible_directions(m, foot)
                p0 = isotropic_root(m.jet(*foot))
            except (DiscriminantError, MetricError):
                roots, p0 = [], None
            for d, k in roots:
                if k == 1 and p0 is not None and d.distance(p0) > 1e-6 and d.distance(here) <= crossing_tol:
                    match = d
        if match is not None:
            info = {"foot": (float(foot[0]), float(foot[1])), "direction": str(match)}
            try:
                info["class"] = classify(m, foot).tag
            except (DiscriminantError, SingularError, MetricError):
                info["class"] = "unknown"
            side = m.jet(x, y).delta
            seed, seed_sense = _relaunch_across(m, foot, match, side, relaunch_offset)
            fs = LiftedState.from_direction(foot[0], foot[1], match)
            cross = LiftedTrace(
                np.array([tr.t[-1]]), np.array([foot[0]]), np.array([foot[1]]),
                np.array([fs.s]), np.array([fs.chart]), sample_events=["crossing"],
            )
            cross.events.append(EventRecord("crossing", float(tr.t[-1]), fs.array(), info))
            pieces.append(cross)
            crossings += 1
            cur, cur_sense = seed, seed_sense
            first = True
            continue
        # no smooth continuation: run in to the discriminant and arrest
        rest = integrate_lifted(
            m, LiftedState(x, y, s, ch), config, kind=kind, sense=tr.orient, stop=near(disc_stop, LiftedState(x, y, s, ch))
        )
        add(rest)
        x, y, s, ch = rest.x[-1], rest.y[-1], rest.s[-1], int(rest.chart[-1])
        here = LiftedState(x, y, s, ch).direction
        info = {"direction": str(here)}
        try:
            foot = project_to_discriminant(m, (x, y))
            info["foot"] = (float(foot[0]), float(foot[1]))
            info["class"] = classify(m, foot).tag
            p0 = isotropic_root(m.jet(*foot))
            info["isotropic"] = bool(here.distance(p0) <= 1e-3)
        except (DiscriminantError, SingularError, MetricError):
            info.setdefault("class", "unknown")
        if rest.status in ("discriminant", "arrest"):
            rest.events = [e for e in rest.events if e.name != "arrest"]
            rest.events.append(EventRecord("arrest", float(rest.t[-1]), np.array([x, y, s]), info))
            rest.sample_events[-1] = "arrest"
            rest.status = "arrest"
        break
    out = LiftedTrace.concat(pieces)
    out.status = pieces[-1].status
    return out.diagnose(m, tol_iso)


# Euler-Lagrange system -----------------------------------------------------


def el_field(m: Metric, s, delta_floor: float = 0.0) -> np.ndarray:
    """``(xdot, ydot, xddot, yddot)`` for extremals of the action of the metric."""
    x, y, xd, yd = (float(t) for t in (s.array() if isinstance(s, NaturalState) else s))
    j = m.jet(x, y)
    det = j.delta
    if abs(det) <= delta_floor * j.scale**2 or det == 0.0:
        raise DiscriminantError("metric matrix is degenerate here")
    r1 = 0.5 * ((j.c_x - 2.0 * j.b_y) * yd * yd - 2.0 * j.a_y * xd * yd - j.a_x * xd * xd)
    r2 = 0.5 * ((j.a_y - 2.0 * j.b_x) * xd * xd - 2.0 * j.c_x * xd * yd - j.c_y * yd * yd)
    xdd = (j.c * r1 - j.b * r2) / det
    ydd = (j.a * r2 - j.b * r1) / det
    return np.array([xd, yd, xdd, ydd])


def el_integrate(
    m: Metric,
    start: NaturalState | Sequence[float],
    t0: float,
    t1: float,
    config: IntegratorConfig = IntegratorConfig(),
    *,
    delta_floor: float = 1e-12,
) -> Trace:
    """Integrate the Euler-Lagrange system from ``t0`` toward ``t1``.

    Stops with an ``arrest`` event when the metric matrix degenerates.
    """
    y0 = start.array() if isinstance(start, NaturalState) else np.asarray(start, dtype=float)
    sense = 1 if t1 >= t0 else -1

    def fun(t, y):
        j = m.jet(y[0], y[1])
        if abs(j.delta) <= delta_floor * j.scale**2:
            return np.zeros(4)
        return el_field(m, y)

    def stop(t, y):
        j = m.jet(y[0], y[1])
        if abs(j.delta) <= delta_floor * j.scale**2:
            return "discriminant"
        return None

    cfg = config.with_(t_max=abs(t1 - t0), arrest_band=0.0)
    tr = integrate(fun, y0, cfg, t0=t0, sense=sense, stop=stop)
    if tr.status == "discriminant":
        tr.events.append(EventRecord("arrest", float(tr.t[-1]), tr.y[-1].copy(), {"reason": "discriminant"}))
    return tr


def line_restriction(m: Metric, xs: Sequence[float], y0: float = 0.0) -> np.ndarray:
    """Largest ``|xdot|`` compatible with the Euler-Lagrange system on ``y = y0``.

    With ``ydot = yddot = 0`` the system is linear in ``(xddot, xdot^2)``:
    ``2a xddot + a_x xdot^2 = 0`` and ``2b xddot - (a_y - 2b_x) xdot^2 = 0``.
    A speed is forced to zero when the ``xdot^2`` column is independent of the
    ``xddot`` column. Free points report ``inf``.
    """
    out = []
    for x in xs:
        j = m.jet(float(x), float(y0))
        A = np.array([[2.0 * j.a, j.a_x], [2.0 * j.b, -(j.a_y - 2.0 * j.b_x)]])
        col0, col1 = A[:, 0], A[:, 1]
        n0 = float(np.linalg.norm(col0))
        if n0 > 0:
            perp = col1 - (col1 @ col0) / (n0 * n0) * col0
        else:
            perp = col1
        out.append(0.0 if float(np.linalg.norm(perp)) > 1e-12 else math.inf)
    return np.array(out)
