"""Scenario definition and its JSON file format.

A scenario JSON document mirrors the Scenario dataclass field for field;
see docs/scenario_schema.md for the documented schema.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field

from .control import Gains
from .dynamics import MAX_DT, ActuationModel
from .errors import ScenarioError
from .paths import SplineKind, Waypoint
from .references import FormationConfig
from .stability import LyapunovWeights, is_positive_definite

EVENT_KINDS = ("heading_delta", "set_speed", "set_gains", "pause", "resume", "reset")
MAX_HEADING_DELTA = math.radians(45.0)


@dataclass(frozen=True)
class SteerEvent:
    t: float
    kind: str
    value: object = None  # radians, m/s, or Gains depending on kind

    def __post_init__(self):
        if self.t < 0:
            raise ScenarioError("event time must be >= 0")
        if self.kind not in EVENT_KINDS:
            raise ScenarioError(f"unknown event kind {self.kind!r}")
        if self.kind == "heading_delta":
            if not (isinstance(self.value, (int, float)) and abs(self.value) <= MAX_HEADING_DELTA + 1e-12):
                raise ScenarioError("heading delta must be a number within 45 deg")
        elif self.kind == "set_speed":
            if not (isinstance(self.value, (int, float)) and math.isfinite(self.value)):
                raise ScenarioError("speed must be a finite number")
        elif self.kind == "set_gains":
            if not isinstance(self.value, Gains):
                raise ScenarioError("set_gains needs a Gains value")


@dataclass(frozen=True)
class Scenario:
    formation: FormationConfig
    agents: list[ActuationModel]
    gains: list[Gains]
    weights: LyapunovWeights
    waypoints: list[Waypoint]
    spline_kind: SplineKind = SplineKind.CLAMPED_BSPLINE
    frame_rotation: float = 0.0
    frame_origin: tuple[float, float] = (0.0, 0.0)
    dt: float = 1e-3
    duration: float = 1.0
    steering_script: list[SteerEvent] = field(default_factory=list)
    seed: int = 0
    leader_start_x: float | None = None
    emit_every: int = 1
    auto_extend: bool = True
    start_paused: bool = False
    # Optional per-agent spawn offsets (de1, de2, de3) in the path frame,
    # for perturbation studies; agents spawn on their references otherwise.
    initial_offsets: list[tuple[float, float, float]] | None = None

    def __post_init__(self):
        if not (0.0 < self.dt <= MAX_DT):
            raise ScenarioError(f"dt must be in (0, {MAX_DT}]")
        if self.duration <= 0:
            raise ScenarioError("duration must be positive")
        if len(self.agents) != self.formation.n_agents:
            raise ScenarioError("need one actuation model per agent")
        if len(self.gains) != self.formation.n_agents:
            raise ScenarioError("need one gain set per agent")
        if self.emit_every < 1:
            raise ScenarioError("emit_every must be >= 1")
        if len(self.waypoints) < 4:
            raise ScenarioError("initial path needs at least 4 waypoints")
        if (self.initial_offsets is not None
                and len(self.initial_offsets) != self.formation.n_agents):
            raise ScenarioError("need one spawn offset per agent")
        ok, witness = is_positive_definite(self.weights)
        if not ok:
            raise ScenarioError(f"Lyapunov weights not positive definite: {witness}")

    @property
    def n_steps(self) -> int:
        return int(math.ceil(self.duration / self.dt - 1e-9))

    def to_dict(self) -> dict:
        return {
            "formation": {
                "n_agents": self.formation.n_agents,
                "spacing_d": self.formation.spacing_d,
                "v_cmd": self.formation.v_cmd,
            },
            "agents": [
                {"tau_u": a.tau_u, "tau_w": a.tau_w, "u_max": a.u_max, "w_max": a.w_max}
                for a in self.agents
            ],
            "gains": [
                {"lambda1": g.lambda1, "lambda2": g.lambda2, "lambda3": g.lambda3}
                for g in self.gains
            ],
            "weights": {"delta": self.weights.delta, "delta1": self.weights.delta1},
            "path": {
                "waypoints": [[w.x, w.y] for w in self.waypoints],
                "spline_kind": self.spline_kind.value,
                "frame": {"rotation": self.frame_rotation,
                          "origin": list(self.frame_origin)},
            },
            "dt": self.dt,
            "duration": self.duration,
            "steering_script": [event_to_dict(ev) for ev in self.steering_script],
            "seed": self.seed,
            "leader_start_x": self.leader_start_x,
            "emit_every": self.emit_every,
            "auto_extend": self.auto_extend,
            "start_paused": self.start_paused,
            "initial_offsets": (None if self.initial_offsets is None
                                else [list(o) for o in self.initial_offsets]),
        }

    def digest(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


def event_to_dict(ev: SteerEvent) -> dict:
    d = {"t": ev.t, "kind": ev.kind}
    if ev.kind == "heading_delta":
        d["radians"] = float(ev.value)
    elif ev.kind == "set_speed":
        d["mps"] = float(ev.value)
    elif ev.kind == "set_gains":
        d["gains"] = {
            "lambda1": ev.value.lambda1,
            "lambda2": ev.value.lambda2,
            "lambda3": ev.value.lambda3,
        }
    return d


def event_from_dict(d: dict) -> SteerEvent:
    kind = d.get("kind")
    if kind == "heading_delta":
        value = float(d["radians"])
    elif kind == "set_speed":
        value = float(d["mps"])
    elif kind == "set_gains":
        g = d["gains"]
        value = Gains(float(g["lambda1"]), float(g["lambda2"]), float(g["lambda3"]))
    else:
        value = None
    return SteerEvent(float(d.get("t", 0.0)), kind, value)


def scenario_from_dict(doc: dict) -> Scenario:
    try:
        fm = doc["formation"]
        formation = FormationConfig(
            n_agents=int(fm["n_agents"]),
            spacing_d=float(fm["spacing_d"]),
            v_cmd=float(fm["v_cmd"]),
        )
        agents = [
            ActuationModel(
                tau_u=float(a.get("tau_u", 0.0)),
                tau_w=float(a.get("tau_w", 0.0)),
                u_max=float(a.get("u_max", 10.0)),
                w_max=float(a.get("w_max", 10.0)),
            )
            for a in doc["agents"]
        ]
        raw_gains = doc["gains"]
        if isinstance(raw_gains, dict):
            raw_gains = [raw_gains] * formation.n_agents
        gains = [
            Gains(float(g["lambda1"]), float(g["lambda2"]), float(g["lambda3"]))
            for g in raw_gains
        ]
        wts = doc.get("weights", {})
        weights = LyapunovWeights(
            delta=float(wts.get("delta", 2.0)), delta1=float(wts.get("delta1", 3.0))
        )
        path = doc["path"]
        waypoints = [Waypoint(float(x), float(y)) for x, y in path["waypoints"]]
        kind = SplineKind(path.get("spline_kind", "bspline"))
        fr = path.get("frame", {})
        frame_rotation = float(fr.get("rotation", 0.0))
        frame_origin = tuple(float(v) for v in fr.get("origin", (0.0, 0.0)))
        script = [event_from_dict(e) for e in doc.get("steering_script", [])]
        leader_start = doc.get("leader_start_x")
        offsets = doc.get("initial_offsets")
        if offsets is not None:
            offsets = [tuple(float(v) for v in o) for o in offsets]
        return Scenario(
            formation=formation,
            agents=agents,
            gains=gains,
            weights=weights,
            waypoints=waypoints,
            spline_kind=kind,
            frame_rotation=frame_rotation,
            frame_origin=frame_origin,
            dt=float(doc.get("dt", 1e-3)),
            duration=float(doc["duration"]),
            steering_script=script,
            seed=int(doc.get("seed", 0)),
            leader_start_x=None if leader_start is None else float(leader_start),
            emit_every=int(doc.get("emit_every", 1)),
            auto_extend=bool(doc.get("auto_extend", True)),
            start_paused=bool(doc.get("start_paused", False)),
            initial_offsets=offsets,
        )
    except ScenarioError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ScenarioError(f"malformed scenario: {exc}") from exc


def load_scenario(path: str) -> Scenario:
    with open(path) as fh:
        return scenario_from_dict(json.load(fh))


def save_scenario(sc: Scenario, path: str) -> None:
    with open(path, "w") as fh:
        json.dump(sc.to_dict(), fh, indent=2)
