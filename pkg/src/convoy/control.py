"""Tracking errors, feedback control law, and analytic closed-loop dynamics.

The control law is

    u = (u* cos(x3*) - lam3 e1) / cos(x3* + e3)
    w = w* - lam2 e3 - lam1 e2

Substituting it into the open-loop error dynamics gives

    e1' = -lam3 e1
    e2' = -lam3 e1 tan(x3* + e3) + u* sin(e3) / cos(e3 + x3*)
    e3' = -lam1 e2 - lam2 e3

which `closed_loop_rhs` provides as an independent verification oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .dynamics import ControlInput, wrap_angle
from .errors import HeadingSingularity, InvalidGains, NonFiniteInput, TanSingularity

# Guard on the cosine denominators.  The frame-rotation machinery keeps the
# reference heading gentle, so hitting this means something upstream broke.
EPS_SINGULAR = 0.05


@dataclass(frozen=True)
class ErrorVector:
    e1: float
    e2: float
    e3: float  # wrapped to (-pi, pi]


@dataclass(frozen=True)
class Gains:
    lambda1: float
    lambda2: float
    lambda3: float

    def __post_init__(self):
        vals = (self.lambda1, self.lambda2, self.lambda3)
        if not all(math.isfinite(v) and v > 0 for v in vals):
            raise InvalidGains(f"gains must be strictly positive, got {vals}")


def compute_error(state, ref) -> ErrorVector:
    """Tracking error e = (x1 - x1*, x2 - x2*, wrap(x3 - x3*)).

    ``state`` and ``ref`` must carry poses expressed in the same frame.
    """
    vals = (state.x1, state.x2, state.x3, ref.x1s, ref.x2s, ref.x3s)
    if not all(math.isfinite(v) for v in vals):
        raise NonFiniteInput("poses must be finite")
    return ErrorVector(
        state.x1 - ref.x1s,
        state.x2 - ref.x2s,
        wrap_angle(state.x3 - ref.x3s),
    )


def control_law(e: ErrorVector, ref, gains: Gains) -> ControlInput:
    """Feedback + feedforward inputs driving the error to zero."""
    c = math.cos(ref.x3s + e.e3)
    if abs(c) < EPS_SINGULAR:
        raise HeadingSingularity(
            f"cos(x3* + e3) = {c:.4f} below the {EPS_SINGULAR} guard"
        )
    u = (ref.u_ref * math.cos(ref.x3s) - gains.lambda3 * e.e1) / c
    w = ref.w_ref - gains.lambda2 * e.e3 - gains.lambda1 * e.e2
    return ControlInput(u, w)


def closed_loop_rhs(e: ErrorVector, ref, gains: Gains) -> tuple[float, float, float]:
    """Analytic time derivative of the error under the control law."""
    c = math.cos(ref.x3s + e.e3)
    if abs(c) < EPS_SINGULAR:
        raise HeadingSingularity(
            f"cos(x3* + e3) = {c:.4f} below the {EPS_SINGULAR} guard"
        )
    if abs(math.cos(ref.x3s)) < EPS_SINGULAR:
        raise TanSingularity("reference heading too close to +/-90 deg")
    de1 = -gains.lambda3 * e.e1
    de2 = -gains.lambda3 * e.e1 * math.tan(ref.x3s + e.e3) + ref.u_ref * math.sin(e.e3) / c
    de3 = -gains.lambda1 * e.e2 - gains.lambda2 * e.e3
    return (de1, de2, de3)
