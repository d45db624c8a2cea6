"""Adaptive Dormand-Prince driver with event location and dense sampling.

Stepping is delegated to :class:`scipy.integrate.RK45`; this module adds the
bookkeeping the flows need: a step budget, a parameter budget, sign-change
events located on the dense output, an arrest test on the velocity norm and
optional evenly spaced samples.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import RK45
from scipy.optimize import brentq

__all__ = [
    "IntegratorConfig",
    "Event",
    "EventRecord",
    "Trace",
    "IntegrationError",
    "StepUnderflowError",
    "MaxStepsError",
    "integrate",
]


class IntegrationError(ArithmeticError):
    pass


class StepUnderflowError(IntegrationError):
    pass


class MaxStepsError(IntegrationError):
    pass


@dataclass(frozen=True)
class IntegratorConfig:
    rtol: float = 1e-9
    atol: float = 1e-12
    max_steps: int = 200_000
    t_max: float = 1e3
    first_step: float | None = None
    max_step: float = math.inf
    arrest_band: float = 1e-10
    sample_dt: float | None = None
    bounds: tuple[float, float, float, float] | None = None
    chart_switch: float = 1.0

    def with_(self, **kw) -> "IntegratorConfig":
        return replace(self, **kw)


@dataclass
class Event:
    """A scalar function of ``(t, y)`` whose sign changes are located."""

    name: str
    func: Callable[[float, np.ndarray], float]
    terminal: bool = False
    direction: int = 0


@dataclass
class EventRecord:
    name: str
    t: float
    state: np.ndarray
    info: dict = field(default_factory=dict)


@dataclass
class Trace:
    t: np.ndarray
    y: np.ndarray
    events: list[EventRecord] = field(default_factory=list)
    status: str = "budget"
    nsteps: int = 0

    def __len__(self) -> int:
        return len(self.t)

    @property
    def end(self) -> np.ndarray:
        return self.y[-1]


def _locate(ev: Event, sol, t0: float, t1: float, g0: float, g1: float) -> float | None:
    if g0 == 0.0 or g0 * g1 > 0.0:
        return None
    if ev.direction > 0 and not (g0 < 0.0 < g1 or g1 == 0.0):
        return None
    if ev.direction < 0 and not (g0 > 0.0 > g1 or g1 == 0.0):
        return None
    if g1 == 0.0:
        return t1
    return brentq(lambda s: ev.func(s, sol(s)), t0, t1, xtol=1e-15 * max(1.0, abs(t1)), rtol=8.9e-16, maxiter=200)


def integrate(
    fun: Callable[[float, np.ndarray], np.ndarray],
    y0: Sequence[float],
    config: IntegratorConfig = IntegratorConfig(),
    *,
    t0: float = 0.0,
    sense: int = 1,
    events: Sequence[Event] = (),
    stop: Callable[[float, np.ndarray], str | None] | None = None,
) -> Trace:
    """Integrate ``y' = fun(t, y)`` forward (``sense=1``) or backward in ``t``.

    ``stop`` is polled after every accepted step; a non-empty string ends the
    run with that status. Terminal events end it with status ``"event"``.
    """
    y0 = np.asarray(y0, dtype=float)
    v0 = np.asarray(fun(t0, y0), dtype=float)
    if not np.all(np.isfinite(v0)):
        raise IntegrationError("field is not finite at the initial state")
    ts = [t0]
    ys = [y0.copy()]
    out = Trace(np.empty(0), np.empty((0, len(y0))))
    if float(np.linalg.norm(v0)) < config.arrest_band:
        out.events.append(EventRecord("arrest", t0, y0.copy(), {"speed": float(np.linalg.norm(v0))}))
        out.t, out.y, out.status = np.array(ts), np.array(ys), "arrest"
        return out

    t_bound = t0 + sense * config.t_max
    kw = {"rtol": config.rtol, "atol": config.atol, "max_step": config.max_step}
    if config.first_step is not None:
        kw["first_step"] = config.first_step
    solver = RK45(fun, t0, y0, t_bound, **kw)
    gvals = [ev.func(t0, y0) for ev in events]
    next_sample = t0 + sense * config.sample_dt if config.sample_dt else None
    status = "budget"
    for step in range(config.max_steps):
        msg = solver.step()
        if solver.status == "failed":
            raise StepUnderflowError(f"step size underflow at t={solver.t:.6g}: {msg}")
        ta, tb = solver.t_old, solver.t
        sol = solver.dense_output()
        # evenly spaced samples inside the step
        if next_sample is not None:
            while (next_sample - tb) * sense < 0:
                ts.append(next_sample)
                ys.append(sol(next_sample))
                next_sample += sense * config.sample_dt
        hit = None
        gnew = [ev.func(tb, solver.y) for ev in events]
        for k, ev in enumerate(events):
            te = _locate(ev, sol, ta, tb, gvals[k], gnew[k])
            if te is None:
                continue
            if te == ta and gvals[k] == 0.0:
                continue
            rec = EventRecord(ev.name, te, sol(te))
            if ev.terminal:
                if hit is None or (te - hit[0].t) * sense < 0:
                    hit = (rec, k)
            else:
                out.events.append(rec)
        gvals = gnew
        if hit is not None:
            rec = hit[0]
            # drop samples past the terminal event
            while len(ts) > 1 and (ts[-1] - rec.t) * sense > 0:
                ts.pop()
                ys.pop()
            out.events = [e for e in out.events if (e.t - rec.t) * sense <= 0]
            out.events.append(rec)
            if ts[-1] != rec.t:
                ts.append(rec.t)
                ys.append(rec.state)
            status = "event"
            break
        if next_sample is None:
            ts.append(tb)
            ys.append(solver.y.copy())
        speed = float(np.linalg.norm(fun(tb, solver.y)))
        if speed < config.arrest_band:
            out.events.append(EventRecord("arrest", tb, solver.y.copy(), {"speed": speed}))
            status = "arrest"
        elif stop is not None and (why := stop(tb, solver.y)):
            status = why
        elif solver.status == "finished":
            status = "budget"
        else:
            continue
        # on a sampling grid the final state is kept as well
        if ts[-1] != tb:
            ts.append(tb)
            ys.append(solver.y.copy())
        break
    else:
        raise MaxStepsError(f"exceeded {config.max_steps} steps (t={solver.t:.6g})")
    out.t = np.array(ts)
    out.y = np.array(ys)
    out.status = status
    out.nsteps = step + 1
    return out
