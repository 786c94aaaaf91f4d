"""Packaged demo scenarios for the three platform configurations.

Gain sets: wheeled (4.5, 7.5, 2.5), quadruped (4.5, 1.5, 2.5), and the
heterogeneous mix (5.0, 1.0, 1.5).  Platform actuation differences are
modeled as first-order lag constants: 0.02 s for the wheeled base,
0.15 s for the quadruped's gait controller.
"""

from __future__ import annotations

import math

import numpy as np

from .control import Gains
from .dynamics import ActuationModel
from .paths import SplineKind, Waypoint
from .references import FormationConfig
from .scenarios import Scenario, SteerEvent
from .stability import LyapunovWeights

TURTLEBOT3_GAINS = Gains(4.5, 7.5, 2.5)
LAIKAGO_GAINS = Gains(4.5, 1.5, 2.5)
MIXED_GAINS = Gains(5.0, 1.0, 1.5)

TURTLEBOT3_ACTUATION = ActuationModel(tau_u=0.02, tau_w=0.02, u_max=0.8, w_max=4.0)
LAIKAGO_ACTUATION = ActuationModel(tau_u=0.15, tau_w=0.15, u_max=1.2, w_max=4.0)
IDEAL_ACTUATION = ActuationModel(u_max=2.0, w_max=8.0)


def straight_waypoints(x0: float = -6.0, x1: float = 24.0, step: float = 1.0,
                       y: float = 0.0) -> list[Waypoint]:
    return [Waypoint(float(x), y) for x in np.arange(x0, x1 + 0.5 * step, step)]


def gentle_curve_waypoints(x0: float = -8.0, x1: float = 24.0, step: float = 1.0,
                           amp: float = 0.4, freq: float = 0.45) -> list[Waypoint]:
    xs = np.arange(x0, x1 + 0.5 * step, step)
    return [Waypoint(float(x), float(amp * math.sin(freq * x))) for x in xs]


def settle_preset(kind: str) -> Scenario:
    """Single +15 deg heading event at t = 0.1 s, step-resolution trace."""
    if kind == "turtlebot3":
        gains, act = TURTLEBOT3_GAINS, TURTLEBOT3_ACTUATION
    elif kind == "laikago":
        gains, act = LAIKAGO_GAINS, LAIKAGO_ACTUATION
    else:
        raise ValueError(f"unknown settle preset {kind!r}")
    n = 3
    return Scenario(
        formation=FormationConfig(n_agents=n, spacing_d=0.5, v_cmd=0.25),
        agents=[act] * n,
        gains=[gains] * n,
        weights=LyapunovWeights(2.0, 3.0),
        waypoints=straight_waypoints(),
        spline_kind=SplineKind.CLAMPED_BSPLINE,
        dt=1e-3,
        duration=6.0,
        steering_script=[SteerEvent(0.1, "heading_delta", math.radians(15.0))],
        leader_start_x=0.0,
        emit_every=1,
    )


def mixed_preset() -> Scenario:
    """4-agent heterogeneous run on a curved path with three steering events."""
    acts = [TURTLEBOT3_ACTUATION, LAIKAGO_ACTUATION,
            TURTLEBOT3_ACTUATION, LAIKAGO_ACTUATION]
    n = len(acts)
    return Scenario(
        formation=FormationConfig(n_agents=n, spacing_d=1.0, v_cmd=0.3),
        agents=acts,
        gains=[MIXED_GAINS] * n,
        weights=LyapunovWeights(2.0, 3.0),
        waypoints=gentle_curve_waypoints(),
        spline_kind=SplineKind.CLAMPED_BSPLINE,
        dt=1e-3,
        duration=10.0,
        steering_script=[
            SteerEvent(2.0, "heading_delta", math.radians(12.0)),
            SteerEvent(5.0, "heading_delta", math.radians(-12.0)),
            SteerEvent(8.0, "heading_delta", math.radians(8.0)),
        ],
        leader_start_x=0.0,
        emit_every=10,
    )


def equilibrium_preset(n: int = 3, duration: float = 2.0) -> Scenario:
    """Straight path, zero initial error, ideal actuation, no events."""
    return Scenario(
        formation=FormationConfig(n_agents=n, spacing_d=0.5, v_cmd=0.25),
        agents=[IDEAL_ACTUATION] * n,
        gains=[TURTLEBOT3_GAINS] * n,
        weights=LyapunovWeights(2.0, 3.0),
        waypoints=straight_waypoints(),
        dt=1e-3,
        duration=duration,
        leader_start_x=0.0,
        emit_every=1,
    )


def preset(name: str) -> Scenario:
    if name == "turtlebot3":
        return settle_preset("turtlebot3")
    if name == "laikago":
        return settle_preset("laikago")
    if name == "mixed":
        return mixed_preset()
    if name == "equilibrium":
        return equilibrium_preset()
    raise ValueError(f"unknown preset {name!r} (try turtlebot3, laikago, mixed)")
