import math
from dataclasses import replace

import pytest

from convoy import run
from convoy.engine import SimTrace
from convoy.errors import EmptyTrace
from convoy.presets import equilibrium_preset, settle_preset
from convoy.scenarios import SteerEvent
from convoy.telemetry import (
    CSV_HEADER,
    export_csv,
    export_jsonl,
    import_jsonl,
    read_csv_rows,
    run_metrics,
)


@pytest.fixture(scope="module")
def short_run():
    sc = replace(equilibrium_preset(n=3, duration=0.1),
                 steering_script=[SteerEvent(0.05, "heading_delta", math.radians(8.0))])
    return run(sc)


def test_csv_header_and_row_count(tmp_path, short_run):
    out = tmp_path / "trace.csv"
    rows = export_csv(short_run.trace, str(out))
    lines = out.read_text().splitlines()
    assert lines[0] == CSV_HEADER
    assert rows == len(lines) - 1
    assert rows == len(short_run.trace.snapshots) * 3


def test_empty_trace_csv(tmp_path):
    trace = SimTrace(digest="x", meta={"dt": 1e-3, "n_agents": 0, "spacing_d": 1.0,
                                       "emit_every": 1, "weights": [2, 3]})
    out = tmp_path / "empty.csv"
    assert export_csv(trace, str(out)) == 0
    assert out.read_text().splitlines() == [CSV_HEADER]


def test_csv_round_trip_bit_exact(tmp_path, short_run):
    out = tmp_path / "trace.csv"
    export_csv(short_run.trace, str(out))
    rows = read_csv_rows(str(out))
    i = 0
    for snap in short_run.trace.snapshots:
        for a in range(3):
            row = rows[i]
            assert row["k"] == snap.k and row["agent"] == a
            assert row["x1"] == snap.agents[a].x1
            assert row["x2"] == snap.agents[a].x2
            assert row["x3"] == snap.agents[a].x3
            assert row["e1"] == snap.errors[a].e1
            assert row["V"] == snap.v_lyap[a]
            i += 1


def test_csv_error_columns_self_consistent(tmp_path, short_run):
    """Errors recomputed from the pose columns reproduce the e columns
    (unrotated frame, so control errors equal global differences)."""
    out = tmp_path / "trace.csv"
    export_csv(short_run.trace, str(out))
    for row in read_csv_rows(str(out)):
        assert abs((row["x1"] - row["x1s"]) - row["e1"]) < 1e-15
        assert abs((row["x2"] - row["x2s"]) - row["e2"]) < 1e-15
        d3 = math.remainder(row["x3"] - row["x3s"] - row["e3"], math.tau)
        assert abs(d3) < 1e-15


def test_jsonl_round_trip_preserves_metrics(tmp_path, short_run):
    out = tmp_path / "trace.jsonl"
    n = export_jsonl(short_run.trace, str(out))
    assert n == len(short_run.trace.snapshots)
    back = import_jsonl(str(out))
    assert back.digest == short_run.trace.digest
    assert run_metrics(back) == run_metrics(short_run.trace)


def test_metrics_equilibrium(tmp_path):
    res = run(equilibrium_preset(n=2, duration=0.1))
    m = run_metrics(res.trace)
    assert max(m["peak_err_norm"]) <= 1e-9
    assert m["lyapunov_violations"] == 0
    assert m["max_gap_deviation"] < 1e-6


def test_metrics_settle_reported():
    sc = replace(settle_preset("turtlebot3"), duration=2.0)
    res = run(sc)
    m = run_metrics(res.trace)
    (key,) = [k for k in m["settle_steps"] if k.startswith("heading_delta")]
    assert m["settle_steps"][key][0] is not None


def test_metrics_empty_trace_raises():
    trace = SimTrace(digest="x", meta={"dt": 1e-3, "n_agents": 1, "spacing_d": 1.0,
                                       "emit_every": 1, "weights": [2, 3]})
    with pytest.raises(EmptyTrace):
        run_metrics(trace)
