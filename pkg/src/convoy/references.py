"""Per-agent reference states anchored to the leader's displacement.

References live in the path's local frame.  Each step every reference
advances its abscissa by v_cmd cos(x3*) dt (the exact first-order
arc-length-to-abscissa conversion) and is re-anchored onto the curve, so
x2* = g(x1*) and x3* = atan(g'(x1*)) hold by construction and arc-length
spacing is conserved up to O(dt^2) per step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import OutOfDomain
from .paths import PathModel


@dataclass(frozen=True)
class ReferenceState:
    x1s: float
    x2s: float
    x3s: float
    u_ref: float
    w_ref: float


@dataclass(frozen=True)
class FormationConfig:
    n_agents: int = 1
    spacing_d: float = 0.5
    v_cmd: float = 0.25

    def __post_init__(self):
        if self.n_agents < 1:
            raise ValueError("need at least one agent")
        if self.spacing_d <= 0:
            raise ValueError("spacing must be positive")


def reference_at(path: PathModel, x: float, v_cmd: float) -> ReferenceState:
    """Reference state anchored on the curve at abscissa x."""
    y, dy, _ = path.eval(x)
    return ReferenceState(
        x1s=float(x),
        x2s=float(y),
        x3s=math.atan(dy),
        u_ref=v_cmd,
        w_ref=v_cmd * path.curvature(x),
    )


def initialize_formation(path: PathModel, leader_x: float, config: FormationConfig) -> list[ReferenceState]:
    """Place agent references at fixed arc-length intervals behind the leader."""
    refs = []
    for i in range(config.n_agents):
        x_i = path.point_at_arc_length(leader_x, i * config.spacing_d)
        refs.append(reference_at(path, x_i, config.v_cmd))
    return refs


def propagate(refs: list[ReferenceState], path: PathModel, config: FormationConfig,
              dt: float) -> list[ReferenceState]:
    """Advance every reference one step along the path."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    x = np.array([r.x1s for r in refs])
    x3 = np.array([r.x3s for r in refs])
    x_new = x + config.v_cmd * np.cos(x3) * dt
    if np.any(x_new > path.x_max + 1e-9):
        raise OutOfDomain("leader reference ran off the end of the path")
    x_new = np.minimum(x_new, path.x_max)
    y, dy, _ = path.eval(x_new)
    kappa = path.curvature(x_new)
    return [
        ReferenceState(float(xi), float(yi), math.atan(di), config.v_cmd,
                       config.v_cmd * float(ki))
        for xi, yi, di, ki in zip(np.atleast_1d(x_new), np.atleast_1d(y),
                                  np.atleast_1d(dy), np.atleast_1d(kappa))
    ]


def spacing_profile(refs: list[ReferenceState], path: PathModel) -> list[float]:
    """Consecutive arc-length gaps between references (leader first)."""
    return [
        path.arc_length(refs[i + 1].x1s, refs[i].x1s)
        for i in range(len(refs) - 1)
    ]
