"""Command-line entry points: headless runs, certification, live serving."""

from __future__ import annotations

import argparse
import json
import math
import sys

from dataclasses import replace

from . import engine, presets, telemetry
from .errors import ConvoyError, ScenarioError
from .scenarios import event_from_dict, load_scenario
from .stability import StabilityRegion, certify_region, is_positive_definite

EXIT_OK = 0
EXIT_SCENARIO = 1
EXIT_RUNTIME = 2


def _load(path: str):
    try:
        return load_scenario(path)
    except (OSError, ScenarioError, ValueError) as exc:
        print(f"scenario error: {exc}", file=sys.stderr)
        raise SystemExit(EXIT_SCENARIO)


def _run_and_report(scenario, out_csv=None, out_jsonl=None, report=None) -> int:
    try:
        result = engine.run(scenario)
    except ConvoyError as exc:
        print(f"runtime abort: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    metrics = telemetry.run_metrics(result.trace)
    if out_csv:
        rows = telemetry.export_csv(result.trace, out_csv)
        print(f"wrote {rows} rows to {out_csv}")
    if out_jsonl:
        n = telemetry.export_jsonl(result.trace, out_jsonl)
        print(f"wrote {n} snapshots to {out_jsonl}")
    doc = {"summary": result.summary, "metrics": metrics}
    if report:
        with open(report, "w") as fh:
            json.dump(doc, fh, indent=2, default=str)
        print(f"wrote report to {report}")
    else:
        print(json.dumps(doc, indent=2, default=str))
    return EXIT_OK


def cmd_run(args) -> int:
    scenario = _load(args.scenario)
    if args.script:
        # sidecar steering script, merged with any embedded events
        try:
            with open(args.script) as fh:
                extra = [event_from_dict(d) for d in json.load(fh)]
        except (OSError, ScenarioError, KeyError, TypeError, ValueError) as exc:
            print(f"script error: {exc}", file=sys.stderr)
            return EXIT_SCENARIO
        scenario = replace(scenario,
                           steering_script=list(scenario.steering_script) + extra)
    return _run_and_report(scenario, args.out_csv, args.out_jsonl, args.report)


def cmd_demo(args) -> int:
    try:
        scenario = presets.preset(args.preset)
    except ValueError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_SCENARIO
    return _run_and_report(scenario, args.out_csv, None, args.report)


def cmd_certify(args) -> int:
    scenario = _load(args.scenario)
    try:
        with open(args.region) as fh:
            doc = json.load(fh)
        region = StabilityRegion(
            e1_max=float(doc["e1_max"]),
            e2_max=float(doc["e2_max"]),
            e3_max=float(doc["e3_max"]),
            x3s_max=float(doc["x3s_max"]),
            u_ref_range=(float(doc["u_ref_min"]), float(doc["u_ref_max"])),
        )
        n_samples = int(doc.get("n_samples", 100_000))
    except (OSError, KeyError, ValueError, ConvoyError) as exc:
        print(f"region error: {exc}", file=sys.stderr)
        return EXIT_SCENARIO

    ok, witness = is_positive_definite(scenario.weights)
    if not ok:
        print(f"weight matrix not positive definite: {witness}", file=sys.stderr)
        return EXIT_SCENARIO
    try:
        res = certify_region(region, scenario.gains[0], scenario.weights, n_samples)
    except ConvoyError as exc:
        print(f"certification error: {exc}", file=sys.stderr)
        return EXIT_SCENARIO
    doc = {
        "ok": res.ok,
        "n_checked": res.n_checked,
        "bounds": None if res.bounds is None else {
            "alpha": res.bounds.alpha, "beta": res.bounds.beta, "rho": res.bounds.rho,
        },
        "counterexample": res.counterexample,
    }
    out = args.report or "certification.json"
    with open(out, "w") as fh:
        json.dump(doc, fh, indent=2)
    print(json.dumps(doc, indent=2))
    return EXIT_OK if res.ok else EXIT_RUNTIME


def cmd_serve(args) -> int:
    from .gateway import serve

    scenario = _load(args.scenario) if args.scenario else presets.preset(args.preset)
    try:
        serve(scenario, bind=args.bind)
    except OSError as exc:
        print(f"bind failure: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="convoy",
                                description="leader-follower path-train simulator")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run a scenario headless")
    r.add_argument("--scenario", required=True)
    r.add_argument("--script", help="sidecar steering-script JSON (list of events)")
    r.add_argument("--out-csv")
    r.add_argument("--out-jsonl")
    r.add_argument("--report")
    r.set_defaults(fn=cmd_run)

    c = sub.add_parser("certify", help="certify a stability region")
    c.add_argument("--scenario", required=True)
    c.add_argument("--region", required=True)
    c.add_argument("--report")
    c.set_defaults(fn=cmd_certify)

    s = sub.add_parser("serve", help="serve the live steering gateway")
    s.add_argument("--scenario")
    s.add_argument("--preset", default="turtlebot3")
    s.add_argument("--bind", default="127.0.0.1:8700")
    s.set_defaults(fn=cmd_serve)

    d = sub.add_parser("demo", help="run a packaged demo scenario")
    d.add_argument("--preset", required=True,
                   choices=["turtlebot3", "laikago", "mixed", "equilibrium"])
    d.add_argument("--out-csv")
    d.add_argument("--report")
    d.set_defaults(fn=cmd_demo)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        code = args.fn(args)
    except SystemExit as exc:
        code = exc.code if isinstance(exc.code, int) else EXIT_SCENARIO
    except ConvoyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        code = EXIT_RUNTIME
    return code


if __name__ == "__main__":
    sys.exit(main())
