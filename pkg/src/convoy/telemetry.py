"""Trace export and run metrics.

CSV columns are one row per (step, agent) for spreadsheet analysis; the
JSONL stream carries full snapshots (one per line, same schema as the
gateway's `state` payload) and round-trips losslessly.  Poses in the CSV
are global-frame; the error columns are the control errors in the path
frame, which coincide with global differences whenever the frame is
unrotated.
"""

from __future__ import annotations

import json
import math

from .control import ErrorVector
from .dynamics import AgentState, ControlInput
from .engine import SimSnapshot, SimTrace, settle_steps
from .errors import EmptyTrace
from .paths import FrameTransform
from .references import ReferenceState
from .scenarios import event_from_dict, event_to_dict

CSV_HEADER = "k,t,agent,x1,x2,x3,x1s,x2s,x3s,e1,e2,e3,u,omega,u_ref,omega_ref,V"


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def export_csv(trace: SimTrace, path: str) -> int:
    """Write one row per (snapshot, agent); returns the data row count."""
    rows = 0
    with open(path, "w") as fh:
        fh.write(CSV_HEADER + "\n")
        for snap in trace.snapshots:
            for i, (a, r, e, c) in enumerate(
                zip(snap.agents, snap.refs, snap.errors, snap.inputs)
            ):
                vals = (snap.t, a.x1, a.x2, a.x3, r.x1s, r.x2s, r.x3s,
                        e.e1, e.e2, e.e3, c.u, c.omega, r.u_ref, r.w_ref,
                        snap.v_lyap[i])
                fh.write(f"{snap.k},{_fmt(snap.t)},{i}," +
                         ",".join(_fmt(v) for v in vals[1:]) + "\n")
                rows += 1
            if rows % 1000 == 0:
                fh.flush()
    return rows


def read_csv_rows(path: str) -> list[dict]:
    """Parse an exported CSV back into per-row dicts of floats."""
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        out = []
        for line in fh:
            parts = line.strip().split(",")
            row = {h: (int(p) if h in ("k", "agent") else float(p))
                   for h, p in zip(header, parts)}
            out.append(row)
    return out


def export_jsonl(trace: SimTrace, path: str) -> int:
    """Full-fidelity snapshot stream: header line, then one snapshot per line."""
    with open(path, "w") as fh:
        header = {"digest": trace.digest, "meta": trace.meta,
                  "events": [[k, event_to_dict(ev)] for k, ev in trace.events]}
        fh.write(json.dumps(header) + "\n")
        for snap in trace.snapshots:
            fh.write(json.dumps(snap.to_dict()) + "\n")
    return len(trace.snapshots)


def _snapshot_from_dict(d: dict) -> SimSnapshot:
    return SimSnapshot(
        k=int(d["k"]),
        t=float(d["t"]),
        agents=[AgentState(*a) for a in d["agents"]],
        refs=[ReferenceState(*r) for r in d["refs"]],
        errors=[ErrorVector(*e) for e in d["errors"]],
        inputs=[ControlInput(*c) for c in d["inputs"]],
        path_points=[tuple(p) for p in d["path_points"]],
        frame=FrameTransform(d["frame"]["rotation"], tuple(d["frame"]["origin"])),
        err_norm=list(d["err_norm"]),
        gaps=list(d["gaps"]),
        v_lyap=list(d["v_lyap"]),
        v_cmd=float(d["v_cmd"]),
    )


def import_jsonl(path: str) -> SimTrace:
    with open(path) as fh:
        header = json.loads(fh.readline())
        trace = SimTrace(digest=header["digest"], meta=header["meta"])
        trace.events = [(int(k), event_from_dict(e)) for k, e in header.get("events", [])]
        for line in fh:
            if line.strip():
                trace.snapshots.append(_snapshot_from_dict(json.loads(line)))
    return trace


def run_metrics(trace: SimTrace) -> dict:
    """Convergence, spacing, and Lyapunov-descent metrics of a trace."""
    if not trace.snapshots:
        raise EmptyTrace("no snapshots recorded")
    n_agents = int(trace.meta["n_agents"])
    d = float(trace.meta["spacing_d"])

    peak = [0.0] * n_agents
    sq_sum = [0.0] * n_agents
    for snap in trace.snapshots:
        for i, v in enumerate(snap.err_norm):
            peak[i] = max(peak[i], v)
            sq_sum[i] += v * v
    rms = [math.sqrt(s / len(trace.snapshots)) for s in sq_sum]

    max_gap_dev = 0.0
    for snap in trace.snapshots:
        for g in snap.gaps:
            max_gap_dev = max(max_gap_dev, abs(g - d))

    # Lyapunov descent violations, skipping the step right after each event
    # (the reference jumps there by design).
    event_steps = {k for k, _ in trace.events}
    violations = 0
    prev = None
    for snap in trace.snapshots:
        if prev is not None and snap.k - 1 not in event_steps and prev.k not in event_steps:
            for i in range(n_agents):
                if (prev.err_norm[i] > 1e-6
                        and snap.v_lyap[i] > prev.v_lyap[i] + 1e-12):
                    violations += 1
        prev = snap

    settle = {}
    for step, ev in trace.events:
        if ev.kind in ("heading_delta", "set_speed", "set_gains"):
            settle[f"{ev.kind}@{step}"] = settle_steps(trace, step)

    return {
        "peak_err_norm": peak,
        "rms_err_norm": rms,
        "max_gap_deviation": max_gap_dev,
        "lyapunov_violations": violations,
        "settle_steps": settle,
    }
