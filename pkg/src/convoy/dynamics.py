"""Unicycle kinematics with first-order actuation lag and saturation.

State derivative:  x1' = u cos(x3),  x2' = u sin(x3),  x3' = w.
Platform differences (wheeled vs legged) are abstracted as the lag time
constants and velocity limits of an ActuationModel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InvalidDt, NonFiniteInput

MAX_DT = 0.05


@dataclass(frozen=True)
class AgentState:
    x1: float
    x2: float
    x3: float  # heading, wrapped to (-pi, pi]
    u_act: float = 0.0
    w_act: float = 0.0


@dataclass(frozen=True)
class ControlInput:
    u: float
    omega: float


@dataclass(frozen=True)
class ActuationModel:
    """First-order lag toward saturated commands; tau = 0 means ideal."""

    tau_u: float = 0.0
    tau_w: float = 0.0
    u_max: float = 10.0
    w_max: float = 10.0

    def __post_init__(self):
        if self.tau_u < 0 or self.tau_w < 0:
            raise ValueError("lag time constants must be >= 0")
        if self.u_max <= 0 or self.w_max <= 0:
            raise ValueError("velocity limits must be positive")


IDEAL = ActuationModel()


def wrap_angle(theta: float) -> float:
    """Wrap an angle to (-pi, pi]."""
    if not math.isfinite(theta):
        raise NonFiniteInput("angle must be finite")
    return math.pi - (math.pi - theta) % math.tau


def _relax(current: float, target: float, tau: float, dt: float) -> float:
    if tau == 0.0:
        return target
    return target + (current - target) * math.exp(-dt / tau)


def step(state: AgentState, cmd: ControlInput, model: ActuationModel, dt: float) -> AgentState:
    """Advance one control period.

    The actuated velocities relax exponentially toward the saturated
    commands (exact update for a first-order lag), then the pose is
    integrated with classical RK4 holding those velocities constant.
    """
    if not (dt > 0.0 and dt <= MAX_DT):
        raise InvalidDt(f"dt must be in (0, {MAX_DT}], got {dt}")
    vals = (state.x1, state.x2, state.x3, state.u_act, state.w_act, cmd.u, cmd.omega)
    if not all(math.isfinite(v) for v in vals):
        raise NonFiniteInput("state and command must be finite")

    u_sat = min(max(cmd.u, -model.u_max), model.u_max)
    w_sat = min(max(cmd.omega, -model.w_max), model.w_max)
    u = _relax(state.u_act, u_sat, model.tau_u, dt)
    w = _relax(state.w_act, w_sat, model.tau_w, dt)

    x, y, th = state.x1, state.x2, state.x3
    # RK4 on the unicycle with (u, w) held over the step.
    k1x, k1y = u * math.cos(th), u * math.sin(th)
    th2 = th + 0.5 * dt * w
    k2x, k2y = u * math.cos(th2), u * math.sin(th2)
    k3x, k3y = k2x, k2y  # x3' = w is state-independent, so k3 == k2 for x3
    th4 = th + dt * w
    k4x, k4y = u * math.cos(th4), u * math.sin(th4)
    x += dt / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
    y += dt / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y)
    th = wrap_angle(th + dt * w)
    return AgentState(x, y, th, u, w)
