import math

import numpy as np
import pytest

from convoy.control import (
    ErrorVector,
    Gains,
    closed_loop_rhs,
    compute_error,
    control_law,
)
from convoy.dynamics import AgentState
from convoy.errors import HeadingSingularity, InvalidGains, NonFiniteInput
from convoy.references import ReferenceState


def ref(x1s=0.0, x2s=0.0, x3s=0.0, u_ref=0.0, w_ref=0.0):
    return ReferenceState(x1s, x2s, x3s, u_ref, w_ref)


def open_loop_error_rate(e, r, gains):
    """Oracle: push the control law through the raw error dynamics
    (e' = time derivative of x - x*), never using the closed-form result."""
    cmd = control_law(e, r, gains)
    x3 = r.x3s + e.e3
    return (
        cmd.u * math.cos(x3) - r.u_ref * math.cos(r.x3s),
        cmd.u * math.sin(x3) - r.u_ref * math.sin(r.x3s),
        cmd.omega - r.w_ref,
    )


# -- compute_error ------------------------------------------------------------


def test_error_zero_at_reference():
    s = AgentState(1.0, 2.0, 0.3)
    e = compute_error(s, ref(1.0, 2.0, 0.3))
    assert (e.e1, e.e2, e.e3) == (0.0, 0.0, 0.0)


def test_error_componentwise():
    e = compute_error(AgentState(1.0, 2.0, 0.1), ref(0.5, 2.5, -0.1))
    assert abs(e.e1 - 0.5) < 1e-15
    assert abs(e.e2 + 0.5) < 1e-15
    assert abs(e.e3 - 0.2) < 1e-15


def test_error_heading_wrap():
    e = compute_error(AgentState(0, 0, 3.0), ref(0, 0, -3.0))
    assert abs(e.e3 - (6.0 - math.tau)) < 1e-12


def test_error_nonfinite():
    with pytest.raises(NonFiniteInput):
        compute_error(AgentState(math.nan, 0, 0), ref())


# -- control_law ----------------------------------------------------------------


def test_feedforward_passthrough():
    g = Gains(4.5, 7.5, 2.5)
    r = ref(x3s=0.2, u_ref=0.7, w_ref=0.3)
    cmd = control_law(ErrorVector(0, 0, 0), r, g)
    assert abs(cmd.u - 0.7) < 1e-12
    assert abs(cmd.omega - 0.3) < 1e-12


def test_control_law_hand_value():
    g = Gains(1.0, 1.0, 2.5)
    cmd = control_law(ErrorVector(0.5, 0.0, 0.0), ref(u_ref=1.0), g)
    assert abs(cmd.u - (-0.25)) < 1e-15
    assert cmd.omega == 0.0


def test_control_law_singularity():
    g = Gains(1, 1, 1)
    with pytest.raises(HeadingSingularity):
        control_law(ErrorVector(0, 0, math.pi / 2), ref(), g)


def test_gains_validation():
    with pytest.raises(InvalidGains):
        Gains(0.0, 1.0, 1.0)
    with pytest.raises(InvalidGains):
        Gains(1.0, -2.0, 1.0)


# -- closed_loop_rhs ---------------------------------------------------------------


def test_equilibrium_rhs_zero():
    g = Gains(4.5, 7.5, 2.5)
    r = ref(x3s=0.4, u_ref=0.5, w_ref=0.1)
    assert closed_loop_rhs(ErrorVector(0, 0, 0), r, g) == (0.0, 0.0, 0.0)


def test_rhs_hand_value():
    g = Gains(1.0, 1.0, 2.5)
    de = closed_loop_rhs(ErrorVector(1.0, 0.0, 0.0), ref(), g)
    assert de == (-2.5, 0.0, 0.0)


def test_substitution_equivalence():
    """Control law pushed through the raw error dynamics must reproduce the
    analytic closed-loop expression componentwise."""
    rng = np.random.default_rng(42)
    lim = math.radians(60.0)
    for _ in range(10_000):
        x3s = rng.uniform(-lim, lim)
        e3 = rng.uniform(-lim - x3s, lim - x3s)
        e = ErrorVector(rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5), e3)
        r = ref(x3s=x3s, u_ref=rng.uniform(0.05, 1.0), w_ref=rng.uniform(-1, 1))
        g = Gains(*rng.uniform(0.1, 10.0, 3))
        expected = open_loop_error_rate(e, r, g)
        got = closed_loop_rhs(e, r, g)
        for a, b in zip(expected, got):
            assert abs(a - b) < 1e-10


def test_e1_channel_decoupled_exponential():
    """Integrate the closed-loop error ODE; e1 must decay as e1(0) e^{-lam3 t}."""
    g = Gains(4.5, 7.5, 2.5)
    r = ref(x3s=0.1, u_ref=0.4)
    e = np.array([0.2, 0.05, -0.1])
    dt, t_end = 1e-4, 1.0
    n = int(round(t_end / dt))
    for _ in range(n):
        def f(ev):
            return np.array(closed_loop_rhs(ErrorVector(*ev), r, g))
        k1 = f(e)
        k2 = f(e + dt / 2 * k1)
        k3 = f(e + dt / 2 * k2)
        k4 = f(e + dt * k3)
        e = e + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    expected = 0.2 * math.exp(-g.lambda3 * t_end)
    assert abs(e[0] - expected) / expected < 1e-6
