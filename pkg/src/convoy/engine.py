"""Fixed-step simulation loop.

Per step, in order: drain due events (scripted first, then live arrivals),
rotate the frame if the leader heading got steep, extend the path if the
leader is near its end, propagate references, compute per-agent control,
integrate dynamics, and emit a snapshot.  The loop is single-threaded and
owns all mutable state; live events arrive over a thread-safe queue and are
quantized to the next step boundary.
"""

from __future__ import annotations

import logging
import math
import queue as queue_mod
import time
from dataclasses import dataclass, field, replace

from . import dynamics, paths, references
from .control import ErrorVector, Gains, compute_error, control_law
from .dynamics import ActuationModel, AgentState, ControlInput
from .errors import (
    DegenerateGeometry,
    HeadingSingularity,
    OutOfDomain,
    PathExhausted,
    ScenarioError,
    SingularityAbort,
    SteepHeading,
)
from .paths import STEEP_HEADING_RAD, FrameTransform, PathModel, build_path
from .references import FormationConfig, ReferenceState
from .scenarios import Scenario, SteerEvent
from .stability import lyapunov_value

logger = logging.getLogger(__name__)

SINGULAR_ABORT_AFTER = 3
SETTLE_HOLD_STEPS = 50


@dataclass(frozen=True)
class SimSnapshot:
    k: int
    t: float
    agents: list[AgentState]          # global frame
    refs: list[ReferenceState]        # global frame pose, feedforward inputs
    errors: list[ErrorVector]         # control (path-local) frame
    inputs: list[ControlInput]
    path_points: list[tuple[float, float]]  # local-frame control points
    frame: FrameTransform
    err_norm: list[float]
    gaps: list[float]
    v_lyap: list[float]
    v_cmd: float

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "t": self.t,
            "agents": [[a.x1, a.x2, a.x3, a.u_act, a.w_act] for a in self.agents],
            "refs": [[r.x1s, r.x2s, r.x3s, r.u_ref, r.w_ref] for r in self.refs],
            "errors": [[e.e1, e.e2, e.e3] for e in self.errors],
            "inputs": [[c.u, c.omega] for c in self.inputs],
            "path_points": [list(p) for p in self.path_points],
            "frame": {"rotation": self.frame.rotation, "origin": list(self.frame.origin)},
            "err_norm": list(self.err_norm),
            "gaps": list(self.gaps),
            "v_lyap": list(self.v_lyap),
            "v_cmd": self.v_cmd,
        }


@dataclass
class SimTrace:
    digest: str
    meta: dict
    snapshots: list[SimSnapshot] = field(default_factory=list)
    events: list[tuple[int, SteerEvent]] = field(default_factory=list)


@dataclass
class RunResult:
    trace: SimTrace
    summary: dict


class _EngineState:
    """Mutable world state owned by the stepping loop."""

    def __init__(self, sc: Scenario):
        self.scenario = sc
        frame = FrameTransform(sc.frame_rotation, tuple(sc.frame_origin))
        self.path: PathModel = build_path(sc.waypoints, sc.spline_kind, frame)
        self.config: FormationConfig = sc.formation
        self.gains: list[Gains] = list(sc.gains)
        self.models: list[ActuationModel] = list(sc.agents)
        leader_x = sc.leader_start_x
        if leader_x is None:
            behind = (sc.formation.n_agents - 1) * sc.formation.spacing_d
            leader_x = self.path.point_at_arc_length(self.path.x_min, -(behind + 0.05))
        try:
            self.refs = references.initialize_formation(self.path, leader_x, self.config)
        except OutOfDomain as exc:
            raise ScenarioError(f"initial path too short for the formation: {exc}") from exc
        offsets = sc.initial_offsets or [(0.0, 0.0, 0.0)] * self.config.n_agents
        self.agents = [self._spawn(r, m, o)
                       for r, m, o in zip(self.refs, self.models, offsets)]
        self.last_inputs = [ControlInput(0.0, 0.0)] * self.config.n_agents
        self.singular_streak = [0] * self.config.n_agents
        self.paused = sc.start_paused

    def _spawn(self, ref: ReferenceState, model: ActuationModel,
               offset=(0.0, 0.0, 0.0)) -> AgentState:
        gx, gy = self.path.frame.to_global(ref.x1s + offset[0], ref.x2s + offset[1])
        th = self.path.frame.heading_to_global(ref.x3s + offset[2])
        u0 = min(max(ref.u_ref, -model.u_max), model.u_max)
        w0 = min(max(ref.w_ref, -model.w_max), model.w_max)
        return AgentState(gx, gy, th, u0, w0)

    def local_pose(self, a: AgentState) -> AgentState:
        lx, ly = self.path.frame.to_local(a.x1, a.x2)
        return AgentState(lx, ly, self.path.frame.heading_to_local(a.x3), a.u_act, a.w_act)

    def ref_global(self, r: ReferenceState) -> ReferenceState:
        gx, gy = self.path.frame.to_global(r.x1s, r.x2s)
        return ReferenceState(gx, gy, self.path.frame.heading_to_global(r.x3s),
                              r.u_ref, r.w_ref)

    def rotate_if_steep(self, target_heading: float | None = None) -> None:
        leader = self.refs[0]
        check = leader.x3s if target_heading is None else target_heading
        if abs(check) <= STEEP_HEADING_RAD and target_heading is None:
            return
        new_path, _ = paths.rotate_frame(self.path, leader.x1s, reference_heading=check)
        if new_path is self.path:
            return
        old_frame = self.path.frame
        self.path = new_path
        remapped = []
        for r in self.refs:
            gx, gy = old_frame.to_global(r.x1s, r.x2s)
            lx, _ = new_path.frame.to_local(gx, gy)
            lx = min(max(lx, new_path.x_min), new_path.x_max)
            remapped.append(references.reference_at(new_path, lx, self.config.v_cmd))
        self.refs = remapped

    def keep_behind(self) -> float:
        n, d = self.config.n_agents, self.config.spacing_d
        return (n - 1) * d + 2.0 * d

    def apply_event(self, ev: SteerEvent) -> None:
        if ev.kind == "heading_delta":
            leader = self.refs[0]
            target = leader.x3s + float(ev.value)
            if abs(target) >= STEEP_HEADING_RAD:
                self.rotate_if_steep(target_heading=target)
                leader = self.refs[0]
                target = leader.x3s + float(ev.value)
            pose = (leader.x1s, leader.x2s, leader.x3s)
            self.path = paths.replan(self.path, pose, target,
                                     keep_behind=self.keep_behind())
            self.refs = [references.reference_at(self.path, r.x1s, self.config.v_cmd)
                         for r in self.refs]
        elif ev.kind == "set_speed":
            self.config = replace(self.config, v_cmd=float(ev.value))
            # feedforward in the stored references follows immediately
            self.refs = [references.reference_at(self.path, r.x1s, self.config.v_cmd)
                         for r in self.refs]
        elif ev.kind == "set_gains":
            self.gains = [ev.value] * self.config.n_agents
        elif ev.kind == "pause":
            self.paused = True
        elif ev.kind == "resume":
            self.paused = False
        elif ev.kind == "reset":
            fresh = _EngineState(self.scenario)
            self.path = fresh.path
            self.config = fresh.config
            self.gains = fresh.gains
            self.refs = fresh.refs
            self.agents = fresh.agents
            self.last_inputs = fresh.last_inputs
            self.singular_streak = fresh.singular_streak


def apply_steer(state: _EngineState, ev: SteerEvent) -> _EngineState:
    """Apply one steering event to the engine internals (between steps)."""
    state.apply_event(ev)
    return state


def _snapshot(st: _EngineState, k: int, dt: float) -> SimSnapshot:
    errs, norms, vs = [], [], []
    weights = st.scenario.weights
    for a, r in zip(st.agents, st.refs):
        e = compute_error(st.local_pose(a), r)
        errs.append(e)
        norms.append(math.sqrt(e.e1 * e.e1 + e.e2 * e.e2 + e.e3 * e.e3))
        vs.append(lyapunov_value(e, weights))
    gaps = references.spacing_profile(st.refs, st.path)
    return SimSnapshot(
        k=k,
        t=k * dt,
        agents=list(st.agents),
        refs=[st.ref_global(r) for r in st.refs],
        errors=errs,
        inputs=list(st.last_inputs),
        path_points=[(float(x), float(y)) for x, y in
                     zip(st.path.control_x, st.path.control_y)],
        frame=st.path.frame,
        err_norm=norms,
        gaps=gaps,
        v_lyap=vs,
        v_cmd=st.config.v_cmd,
    )


def run(scenario: Scenario, sink=None, live_events=None, realtime: bool = False,
        should_stop=None) -> RunResult:
    """Execute a scenario; returns the trace and summary metrics.

    ``sink`` receives every emitted SimSnapshot (in addition to the trace).
    ``live_events`` is an optional queue.Queue of SteerEvent drained at step
    boundaries.  With ``realtime`` the loop paces sim time to the wall
    clock (for live serving); otherwise it runs flat out.  ``should_stop``
    is polled so a server can shut the loop down.
    """
    st = _EngineState(scenario)
    dt = scenario.dt
    n_steps = scenario.n_steps
    script = sorted(scenario.steering_script, key=lambda e: e.t)
    si = 0

    trace = SimTrace(
        digest=scenario.digest(),
        meta={
            "dt": dt,
            "n_agents": scenario.formation.n_agents,
            "spacing_d": scenario.formation.spacing_d,
            "emit_every": scenario.emit_every,
            "weights": [scenario.weights.delta, scenario.weights.delta1],
        },
    )

    def emit(k: int) -> None:
        snap = _snapshot(st, k, dt)
        trace.snapshots.append(snap)
        if sink is not None:
            sink(snap)

    def drain(k: int) -> None:
        nonlocal si
        t_now = k * dt
        while si < len(script) and script[si].t <= t_now + 1e-12:
            _apply_logged(script[si], k)
            si += 1
        if live_events is not None:
            while True:
                try:
                    ev = live_events.get_nowait()
                except queue_mod.Empty:
                    break
                _apply_logged(ev, k)

    def _apply_logged(ev: SteerEvent, k: int) -> None:
        try:
            st.apply_event(ev)
            trace.events.append((k, ev))
        except (SteepHeading, DegenerateGeometry) as exc:
            logger.warning("dropped %s at step %d: %s", ev.kind, k, exc)

    t_wall0 = time.monotonic()
    emit(0)
    k = 0
    while k < n_steps:
        if should_stop is not None and should_stop():
            break
        drain(k)
        # While paused, sim time is frozen; any event that arrives (live) or
        # remains scripted is applied at this same step boundary, so a
        # pause/resume pair is a zero-duration no-op in sim time.
        while st.paused:
            if should_stop is not None and should_stop():
                break
            if live_events is not None:
                try:
                    ev = live_events.get(timeout=0.05)
                except queue_mod.Empty:
                    continue
                _apply_logged(ev, k)
            elif si < len(script):
                _apply_logged(script[si], k)
                si += 1
            else:
                break  # paused with nothing left to unpause us
        if st.paused:
            break
        if realtime:
            t_wall0 = max(t_wall0, time.monotonic() - k * dt)

        st.rotate_if_steep()
        margin = 3.0 * st.config.v_cmd * dt + 1e-6
        if st.scenario.auto_extend and st.refs[0].x1s + margin >= st.path.x_max:
            st.path = paths.extend_path(st.path, max(2.0, 10.0 * margin))

        # Control reads the current references, then agents and references
        # advance over the same interval (standard sampled-data semantics;
        # chasing the next-step reference would bake in a v*dt offset).
        for i, (agent, ref) in enumerate(zip(st.agents, st.refs)):
            try:
                e = compute_error(st.local_pose(agent), ref)
                cmd = control_law(e, ref, st.gains[i])
                st.singular_streak[i] = 0
            except HeadingSingularity:
                st.singular_streak[i] += 1
                if st.singular_streak[i] >= SINGULAR_ABORT_AFTER:
                    raise SingularityAbort(
                        f"agent {i} singular for {SINGULAR_ABORT_AFTER} consecutive steps"
                    )
                cmd = st.last_inputs[i]
            st.last_inputs[i] = cmd
            st.agents[i] = dynamics.step(agent, cmd, st.models[i], dt)

        try:
            st.refs = references.propagate(st.refs, st.path, st.config, dt)
        except OutOfDomain as exc:
            raise PathExhausted(str(exc)) from exc

        k += 1
        if k % scenario.emit_every == 0 or k == n_steps:
            emit(k)
        if realtime:
            lag = k * dt - (time.monotonic() - t_wall0)
            if lag > 0:
                time.sleep(lag)

    summary = _summarize(trace)
    return RunResult(trace=trace, summary=summary)


def _summarize(trace: SimTrace) -> dict:
    n_agents = trace.meta["n_agents"]
    peak = [0.0] * n_agents
    for snap in trace.snapshots:
        for i, v in enumerate(snap.err_norm):
            peak[i] = max(peak[i], v)
    settle = {}
    for step, ev in trace.events:
        if ev.kind in ("heading_delta", "set_speed", "set_gains"):
            settle[f"{ev.kind}@{step}"] = settle_steps(trace, step)
    final_gaps = trace.snapshots[-1].gaps if trace.snapshots else []
    return {
        "steps": trace.snapshots[-1].k if trace.snapshots else 0,
        "peak_err_norm": peak,
        "settle_steps": settle,
        "final_gaps": final_gaps,
    }


def settle_steps(trace: SimTrace, event_step: int, threshold_frac: float = 0.05,
                 hold: int = SETTLE_HOLD_STEPS) -> list[int | None]:
    """Steps from the event until each agent's |e| has fallen back below
    threshold_frac of its post-event peak and stayed there for ``hold``
    consecutive steps.  None marks an agent that never settled.

    On traces emitted every N steps the hold window is N-coarse and counts
    are snapshot-resolution; emit every step for exact counts.  A trailing
    window shorter than ``hold`` at the end of the trace counts as settled
    if the error stays below threshold through the end.
    """
    if not (0.0 < threshold_frac < 1.0):
        raise ValueError("threshold_frac must be in (0, 1)")
    ks = [s.k for s in trace.snapshots]
    try:
        start = next(i for i, k in enumerate(ks) if k >= event_step)
    except StopIteration:
        raise ValueError("event_step beyond the trace") from None
    emit_every = max(1, int(trace.meta.get("emit_every", 1)))
    hold_samples = max(1, math.ceil(hold / emit_every))
    n_agents = trace.meta["n_agents"]
    out: list[int | None] = []
    for a in range(n_agents):
        series = [s.err_norm[a] for s in trace.snapshots[start:]]
        peak = max(series)
        if peak <= 1e-12:  # error indistinguishable from zero
            out.append(0)
            continue
        thr = threshold_frac * peak
        i_peak = series.index(peak)
        settled = None
        run_len = 0
        for j in range(i_peak, len(series)):
            if series[j] < thr:
                run_len += 1
                if run_len == 1:
                    first = j
                if run_len >= hold_samples or j == len(series) - 1:
                    settled = ks[start + first] - event_step
                    break
            else:
                run_len = 0
        out.append(settled)
    return out
