import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sigflow.integrator import Event, IntegratorConfig, MaxStepsError, integrate

CFG = IntegratorConfig(rtol=1e-11, atol=1e-13, t_max=10.0)


def test_exponential_decay():
    tr = integrate(lambda t, y: -y, [1.0], CFG.with_(t_max=2.0))
    assert tr.status == "budget"
    assert tr.t[-1] == pytest.approx(2.0)
    assert tr.end[0] == pytest.approx(math.exp(-2.0), rel=1e-9)


def test_backward_sense():
    tr = integrate(lambda t, y: y, [1.0], CFG.with_(t_max=1.0), t0=0.0, sense=-1)
    assert tr.t[-1] == pytest.approx(-1.0)
    assert np.all(np.diff(tr.t) < 0)
    assert tr.end[0] == pytest.approx(math.exp(-1.0), rel=1e-9)


def test_terminal_event_is_located():
    # harmonic oscillator: x = cos t crosses zero at pi/2
    ev = Event("zero", lambda t, y: y[0], terminal=True, direction=-1)
    tr = integrate(lambda t, y: np.array([y[1], -y[0]]), [1.0, 0.0], CFG, events=[ev])
    assert tr.status == "event"
    assert tr.events[-1].t == pytest.approx(math.pi / 2, abs=1e-10)
    assert tr.t[-1] == tr.events[-1].t


def test_non_terminal_events_recorded():
    ev = Event("zero", lambda t, y: y[0])
    tr = integrate(lambda t, y: np.array([y[1], -y[0]]), [1.0, 0.0], CFG.with_(t_max=7.0), events=[ev])
    got = [e.t for e in tr.events if e.name == "zero"]
    assert got == pytest.approx([math.pi / 2, 3 * math.pi / 2], abs=1e-10)


def test_stop_callback_and_arrest():
    tr = integrate(lambda t, y: np.ones(1), [0.0], CFG, stop=lambda t, y: "far" if y[0] > 3 else None)
    assert tr.status == "far" and tr.end[0] > 3
    tr = integrate(lambda t, y: -y, [1.0], CFG.with_(t_max=1e3, arrest_band=1e-6))
    assert tr.status == "arrest" and tr.events[-1].name == "arrest"


def test_arrest_at_start():
    tr = integrate(lambda t, y: np.zeros(2), [1.0, 2.0], CFG)
    assert tr.status == "arrest" and len(tr) == 1


def test_max_steps():
    with pytest.raises(MaxStepsError):
        integrate(lambda t, y: np.array([y[1], -y[0]]), [1.0, 0.0], CFG.with_(t_max=1e3, max_steps=5))


def test_sampling_grid():
    tr = integrate(lambda t, y: -y, [1.0], CFG.with_(t_max=1.0, sample_dt=0.01))
    assert np.allclose(np.diff(tr.t[:-1]), 0.01)


@settings(max_examples=30, deadline=None)
@given(st.floats(-2.0, 2.0), st.floats(0.1, 3.0))
def test_linear_growth_matches_closed_form(k, T):
    tr = integrate(lambda t, y: k * y, [1.0], CFG.with_(t_max=T))
    assert tr.end[0] == pytest.approx(math.exp(k * T), rel=1e-8)
    assert np.all(np.diff(tr.t) > 0)
