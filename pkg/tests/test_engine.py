import math
from dataclasses import replace

import numpy as np
import pytest

from convoy import run, settle_steps
from convoy.control import ErrorVector
from convoy.dynamics import ActuationModel, AgentState, ControlInput
from convoy.engine import SimSnapshot, SimTrace, _EngineState, apply_steer
from convoy.errors import PathExhausted, ScenarioError, SingularityAbort
from convoy.paths import FrameTransform, Waypoint
from convoy.presets import (
    IDEAL_ACTUATION,
    TURTLEBOT3_GAINS,
    equilibrium_preset,
    mixed_preset,
    settle_preset,
    straight_waypoints,
)
from convoy.references import ReferenceState
from convoy.scenarios import Scenario, SteerEvent, scenario_from_dict
from convoy.stability import LyapunovWeights
from convoy.references import FormationConfig


def tiny_scenario(**kw):
    base = dict(
        formation=FormationConfig(n_agents=2, spacing_d=0.5, v_cmd=0.25),
        agents=[IDEAL_ACTUATION] * 2,
        gains=[TURTLEBOT3_GAINS] * 2,
        weights=LyapunovWeights(2.0, 3.0),
        waypoints=straight_waypoints(),
        dt=1e-3,
        duration=0.2,
        leader_start_x=0.0,
        emit_every=1,
    )
    base.update(kw)
    n = base["formation"].n_agents
    base["agents"] = base["agents"][:1] * n
    base["gains"] = base["gains"][:1] * n
    return Scenario(**base)


def mk_trace(err_series, dt=1e-3):
    """Minimal single-agent trace carrying an err_norm series."""
    trace = SimTrace(digest="x", meta={"dt": dt, "n_agents": 1, "spacing_d": 0.5,
                                       "emit_every": 1, "weights": [2.0, 3.0]})
    for k, e in enumerate(err_series):
        trace.snapshots.append(SimSnapshot(
            k=k, t=k * dt,
            agents=[AgentState(0, 0, 0)],
            refs=[ReferenceState(0, 0, 0, 0, 0)],
            errors=[ErrorVector(e, 0, 0)],
            inputs=[ControlInput(0, 0)],
            path_points=[], frame=FrameTransform(),
            err_norm=[e], gaps=[], v_lyap=[0.0], v_cmd=0.25,
        ))
    return trace


# -- basic runs ---------------------------------------------------------------


def test_equilibrium_run_zero_error():
    res = run(equilibrium_preset(n=3, duration=1.0))
    for snap in res.trace.snapshots:
        assert max(snap.err_norm) <= 1e-9


def test_leader_only_kinematics():
    sc = tiny_scenario(formation=FormationConfig(1, 0.5, 0.3), duration=1.0)
    res = run(sc)
    assert abs(res.trace.snapshots[-1].refs[0].x1s - 0.3) < 1e-6


def test_snapshot_time_indexing():
    res = run(tiny_scenario(duration=0.05))
    for snap in res.trace.snapshots:
        assert snap.t == snap.k * 1e-3
    assert res.trace.snapshots[-1].k == 50


def test_emit_every():
    sc = tiny_scenario(duration=0.1, emit_every=10)
    res = run(sc)
    assert [s.k for s in res.trace.snapshots] == list(range(0, 101, 10))


# -- steering events -------------------------------------------------------------


def test_apply_steer_noop_heading():
    st = _EngineState(tiny_scenario())
    old = st.path
    apply_steer(st, SteerEvent(0.0, "heading_delta", 0.0))
    xs = np.linspace(st.path.x_min, min(old.x_max, st.path.x_max), 150)
    assert np.max(np.abs(st.path.eval(xs)[0] - old.eval(xs)[0])) < 1e-6


def test_apply_steer_heading_slope():
    st = _EngineState(tiny_scenario())
    apply_steer(st, SteerEvent(0.0, "heading_delta", math.radians(15.0)))
    leader = st.refs[0]
    assert abs(math.tan(leader.x3s) - math.tan(math.radians(15.0))) < 2e-2


def test_set_speed_zero_freezes_references():
    sc = tiny_scenario(duration=0.3,
                       steering_script=[SteerEvent(0.05, "set_speed", 0.0)])
    res = run(sc)
    xs = [s.refs[0].x1s for s in res.trace.snapshots if s.k >= 60]
    assert max(xs) - min(xs) == 0.0
    assert res.trace.snapshots[-1].err_norm[0] <= 1e-6


def test_set_gains_applies():
    ev = SteerEvent(0.05, "set_gains", TURTLEBOT3_GAINS)
    sc = tiny_scenario(duration=0.1, steering_script=[ev])
    res = run(sc)
    assert any(e.kind == "set_gains" for _, e in res.trace.events)


def test_event_ordering_states_unchanged_at_arrival():
    ev_t = 0.05
    with_ev = tiny_scenario(duration=0.1, steering_script=[
        SteerEvent(ev_t, "heading_delta", math.radians(10.0))])
    without = tiny_scenario(duration=0.1)
    ra, rb = run(with_ev), run(without)
    k_ev = 50
    for k in range(k_ev + 1):
        for a, b in zip(ra.trace.snapshots[k].agents, rb.trace.snapshots[k].agents):
            assert a == b
    # path changed in the next snapshot, agents moved continuously
    assert ra.trace.snapshots[k_ev + 1].path_points != rb.trace.snapshots[k_ev + 1].path_points
    a_prev = ra.trace.snapshots[k_ev].agents[0]
    a_next = ra.trace.snapshots[k_ev + 1].agents[0]
    assert math.hypot(a_next.x1 - a_prev.x1, a_next.x2 - a_prev.x2) < 2.0 * 1e-3 * 2.0


def test_pause_resume_is_noop_in_sim_time():
    paused = tiny_scenario(duration=0.1, steering_script=[
        SteerEvent(0.05, "pause"), SteerEvent(0.05, "resume")])
    plain = tiny_scenario(duration=0.1)
    ra, rb = run(paused), run(plain)
    assert len(ra.trace.snapshots) == len(rb.trace.snapshots)
    for sa, sb in zip(ra.trace.snapshots, rb.trace.snapshots):
        assert sa.agents == sb.agents


def test_pause_without_resume_ends_run():
    sc = tiny_scenario(duration=0.1, steering_script=[SteerEvent(0.05, "pause")])
    res = run(sc)
    assert res.trace.snapshots[-1].k == 50


def test_reset_restores_initial_state():
    sc = tiny_scenario(duration=0.1, steering_script=[
        SteerEvent(0.02, "heading_delta", math.radians(10.0)),
        SteerEvent(0.05, "reset")])
    res = run(sc)
    s0 = res.trace.snapshots[0]
    s51 = res.trace.snapshots[51]
    for a, b in zip(s0.agents, s51.agents):
        assert math.hypot(a.x1 - b.x1, a.x2 - b.x2) < 1e-2  # back near spawn
    assert s51.t == 51 * 1e-3  # clock keeps counting


# -- aborts ------------------------------------------------------------------------


def test_path_exhausted_without_extension():
    sc = tiny_scenario(
        formation=FormationConfig(1, 0.5, 0.5),
        waypoints=straight_waypoints(x0=-1.0, x1=0.3, step=0.25),
        duration=2.0,
        auto_extend=False,
    )
    with pytest.raises(PathExhausted):
        run(sc)


def test_auto_extension_keeps_going():
    sc = tiny_scenario(
        formation=FormationConfig(1, 0.5, 0.5),
        waypoints=straight_waypoints(x0=-1.0, x1=0.3, step=0.25),
        duration=2.0,
        auto_extend=True,
    )
    res = run(sc)
    assert abs(res.trace.snapshots[-1].refs[0].x1s - 1.0) < 1e-6


def test_singularity_abort():
    sc = tiny_scenario(
        formation=FormationConfig(1, 0.5, 0.25),
        duration=0.05,
        initial_offsets=[(0.0, 0.0, 1.62)],  # heading nearly orthogonal
    )
    with pytest.raises(SingularityAbort):
        run(sc)


def test_scenario_too_short_for_formation():
    with pytest.raises(ScenarioError):
        run(tiny_scenario(
            formation=FormationConfig(4, 2.0, 0.25),
            waypoints=straight_waypoints(x0=0.0, x1=3.0, step=0.5),
            leader_start_x=3.0,
        ))


# -- settle metric -----------------------------------------------------------------


def test_settle_zero_trace():
    trace = mk_trace([0.0] * 300)
    assert settle_steps(trace, 10) == [0]


def test_settle_synthetic_exponential():
    dt, tau = 1e-3, 50e-3
    series = [math.exp(-k * dt / tau) for k in range(400)]
    trace = mk_trace(series, dt)
    (n,) = settle_steps(trace, 0)
    assert abs(n - 150) <= 1


def test_settle_never():
    series = [0.1 * (1.01 ** k) for k in range(200)]
    trace = mk_trace(series)
    assert settle_steps(trace, 0) == [None]


def test_settle_slow_onset_counts_from_fall():
    # error rises slowly, peaks, then decays: the early quiet stretch must
    # not count as settled
    series = [k / 100 for k in range(100)] + [math.exp(-k / 30.0) for k in range(300)]
    trace = mk_trace([s for s in series])
    (n,) = settle_steps(trace, 0)
    assert n > 100


# -- determinism ----------------------------------------------------------------------


def test_determinism_identical_traces():
    sc = replace(mixed_preset(), duration=0.5)
    ra, rb = run(sc), run(sc)
    assert len(ra.trace.snapshots) == len(rb.trace.snapshots)
    for sa, sb in zip(ra.trace.snapshots, rb.trace.snapshots):
        assert sa.agents == sb.agents
        assert sa.refs == sb.refs
        assert sa.err_norm == sb.err_norm
        assert sa.gaps == sb.gaps


# -- frame rotation transparency --------------------------------------------------------


def test_frame_rotation_transparency():
    """A run that crosses a steep-heading frame rotation must match the same
    geometry authored in the rotated frame from the start, in global
    coordinates."""
    theta = math.radians(75.0)
    slope = math.tan(theta)
    xs = np.arange(0.0, 4.01, 0.25)
    wps_a = [Waypoint(float(x), slope * x) for x in xs]
    leader_a = 0.9

    common = dict(
        formation=FormationConfig(2, 0.5, 0.25),
        agents=[ActuationModel(tau_u=0.02, tau_w=0.02, u_max=2.0, w_max=8.0)] * 2,
        gains=[TURTLEBOT3_GAINS] * 2,
        weights=LyapunovWeights(2.0, 3.0),
        dt=1e-3,
        duration=1.0,
        emit_every=1,
    )
    sc_a = Scenario(waypoints=wps_a, leader_start_x=leader_a, **common)

    # the rotation the engine will perform: anchor at the leader reference,
    # local heading 75 deg -> 15 deg
    delta = theta - math.radians(15.0)
    origin = (leader_a, slope * leader_a)
    frame_b = FrameTransform(delta, origin)
    wps_b = [Waypoint(*frame_b.to_local(w.x, w.y)) for w in wps_a]
    sc_b = Scenario(waypoints=wps_b, leader_start_x=0.0,
                    frame_rotation=delta, frame_origin=origin, **common)

    ra, rb = run(sc_a), run(sc_b)
    assert len(ra.trace.snapshots) == len(rb.trace.snapshots)
    worst = 0.0
    for sa, sb in zip(ra.trace.snapshots, rb.trace.snapshots):
        for a, b in zip(sa.agents, sb.agents):
            worst = max(worst, math.hypot(a.x1 - b.x1, a.x2 - b.x2))
    assert worst < 1e-6


# -- spacing under steering --------------------------------------------------------------


def test_spacing_invariance_under_steering():
    sc = replace(mixed_preset(), duration=3.0)
    res = run(sc)
    d = sc.formation.spacing_d
    for snap in res.trace.snapshots:
        for g in snap.gaps:
            assert abs(g - d) <= 0.02 * d


def test_mid_run_frame_rotation_on_curved_path():
    """A curving path whose heading climbs past 60 degrees mid-run triggers a
    frame rotation without teleporting agents or references."""
    xs = np.arange(0.0, 8.01, 0.25)
    wps = [Waypoint(float(x), 0.84 * x + 0.175 * x * x) for x in xs]
    sc = Scenario(
        formation=FormationConfig(2, 0.4, 0.6),
        agents=[IDEAL_ACTUATION] * 2,
        gains=[TURTLEBOT3_GAINS] * 2,
        weights=LyapunovWeights(2.0, 3.0),
        waypoints=wps,
        dt=1e-3,
        duration=4.0,
        leader_start_x=1.8,
        emit_every=1,
    )
    res = run(sc)
    rotations = {s.frame.rotation for s in res.trace.snapshots}
    assert len(rotations) > 1  # the frame rotated at least once
    # no agent teleported across any step (u_max = 2 m/s on the ideal model)
    for prev, cur in zip(res.trace.snapshots, res.trace.snapshots[1:]):
        for a, b in zip(prev.agents, cur.agents):
            assert math.hypot(b.x1 - a.x1, b.x2 - a.x2) <= 2.0 * sc.dt + 1e-9
        # reference global positions are continuous too
        for ra, rb in zip(prev.refs, cur.refs):
            assert math.hypot(rb.x1s - ra.x1s, rb.x2s - ra.x2s) <= 3.0 * sc.dt + 1e-6
    # tracking stayed sane throughout
    assert max(max(s.err_norm) for s in res.trace.snapshots) < 0.05


def test_heading_event_triggers_pre_rotation():
    """A delta that would push the commanded heading past 60 degrees rotates
    the frame first, then replans; the reference heading still lands on the
    commanded global direction."""
    slope = math.tan(math.radians(50.0))
    xs = np.arange(0.0, 6.01, 0.25)
    wps = [Waypoint(float(x), slope * x) for x in xs]
    sc = Scenario(
        formation=FormationConfig(1, 0.4, 0.3),
        agents=[IDEAL_ACTUATION],
        gains=[TURTLEBOT3_GAINS],
        weights=LyapunovWeights(2.0, 3.0),
        waypoints=wps,
        dt=1e-3,
        duration=0.2,
        leader_start_x=1.5,
        emit_every=1,
        steering_script=[SteerEvent(0.05, "heading_delta", math.radians(15.0))],
    )
    res = run(sc)
    assert len(res.trace.events) == 1  # event applied, not dropped
    before = res.trace.snapshots[50]
    after = res.trace.snapshots[52]
    assert after.frame.rotation != before.frame.rotation
    # snapshot refs are global poses: the leader's reference heading reached
    # the commanded 50 + 15 degrees
    assert abs(math.degrees(after.refs[0].x3s) - 65.0) < 1.5


def test_rapid_successive_replans():
    sc = tiny_scenario(duration=0.4, steering_script=[
        SteerEvent(0.05, "heading_delta", math.radians(10.0)),
        SteerEvent(0.10, "heading_delta", math.radians(10.0)),
        SteerEvent(0.15, "heading_delta", math.radians(-5.0)),
    ])
    res = run(sc)
    assert len(res.trace.events) == 3
    # cumulative heading command reached +15 degrees
    assert abs(math.degrees(res.trace.snapshots[-1].refs[0].x3s) - 15.0) < 1.0
    d = sc.formation.spacing_d
    for snap in res.trace.snapshots:
        for g in snap.gaps:
            assert abs(g - d) <= 0.02 * d


def test_scenario_json_round_trip():
    sc = mixed_preset()
    sc2 = scenario_from_dict(sc.to_dict())
    assert sc2.digest() == sc.digest()
    assert sc2 == sc


def test_scenario_single_gains_broadcast():
    doc = mixed_preset().to_dict()
    doc["gains"] = doc["gains"][0]  # one object instead of a list
    sc = scenario_from_dict(doc)
    assert len(sc.gains) == sc.formation.n_agents
    assert all(g == sc.gains[0] for g in sc.gains)
