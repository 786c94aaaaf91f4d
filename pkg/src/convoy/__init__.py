"""Leader-follower path-train simulation and control library.

A steered leader drags a train of unicycle agents along a re-plannable
spline path.  Follower references are propagated by the leader's spatial
displacement (arc length), tracked with a Lyapunov-verified feedback law,
and the whole loop can be driven live from a browser cockpit through the
websocket gateway.
"""

from .control import ErrorVector, Gains, closed_loop_rhs, compute_error, control_law
from .dynamics import ActuationModel, AgentState, ControlInput, step, wrap_angle
from .engine import RunResult, SimSnapshot, SimTrace, run, settle_steps
from .paths import (
    FrameTransform,
    PathModel,
    SplineKind,
    Waypoint,
    build_path,
    extend_path,
    replan,
    rotate_frame,
)
from .references import (
    FormationConfig,
    ReferenceState,
    initialize_formation,
    propagate,
    reference_at,
    spacing_profile,
)
from .scenarios import Scenario, SteerEvent, load_scenario, save_scenario
from .stability import (
    CertificationResult,
    ExponentialBoundEstimate,
    LyapunovWeights,
    StabilityRegion,
    certify_region,
    is_positive_definite,
    lyapunov_rate,
    lyapunov_value,
)
from .telemetry import export_csv, export_jsonl, import_jsonl, read_csv_rows, run_metrics

__version__ = "0.1.0"

__all__ = [
    "ActuationModel", "AgentState", "CertificationResult", "ControlInput",
    "ErrorVector", "ExponentialBoundEstimate", "FormationConfig",
    "FrameTransform", "Gains", "LyapunovWeights", "PathModel", "ReferenceState",
    "RunResult", "Scenario", "SimSnapshot", "SimTrace", "SplineKind",
    "StabilityRegion", "SteerEvent", "Waypoint", "build_path",
    "certify_region", "closed_loop_rhs", "compute_error", "control_law",
    "export_csv", "export_jsonl", "extend_path", "import_jsonl",
    "initialize_formation", "is_positive_definite", "load_scenario",
    "lyapunov_rate", "lyapunov_value", "propagate", "read_csv_rows",
    "reference_at", "replan", "rotate_frame", "run", "run_metrics",
    "save_scenario", "settle_steps", "spacing_profile", "step", "wrap_angle",
]
