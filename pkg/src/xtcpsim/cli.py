"""Command-line experiment harness: run, batch, gen-scenario, summarize.

Outputs are plain CSV files so external tooling can consume them directly.
A single run writes `trace.csv` (time series) and `summary.csv` (one row per
UE); a batch writes one directory per run plus an aggregate `summary.csv`
with 95% confidence intervals.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import statistics
import sys
from pathlib import Path

from .bundles import bundle_document, list_bundles
from .runner import RunResult, run_scenario
from .scenario import CC_FLAVORS, ConfigError, Scenario

GEN_KINDS = ("random-two-ue", "outage")

SUMMARY_METRICS = ("mean_rtt_s", "mean_goodput_bps", "mean_occupancy_bytes")


def gen_scenario(kind: str, seed: int | None = None,
                 overrides: dict | None = None) -> dict:
    """A fully-populated scenario document for one of the known kinds."""
    if kind not in GEN_KINDS:
        raise ConfigError(
            f"unknown scenario kind {kind!r}; valid kinds: {', '.join(GEN_KINDS)}")
    doc = bundle_document(kind)
    if seed is not None:
        doc["seed"] = int(seed)
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if key == "cc":
            for ue, cc in zip(doc["ues"], _cycle_cc(value, len(doc["ues"]))):
                ue["cc"] = cc
        elif key in ("lambda", "epsilon_ms"):
            doc.setdefault("tcp", {})[key] = value
        else:
            doc[key] = value
    # round-trip through the validator so defaults are materialized
    return Scenario.from_dict(doc).to_dict()


def _cycle_cc(cc_list: list[str], n: int) -> list[str]:
    for cc in cc_list:
        if cc not in CC_FLAVORS:
            raise ConfigError(
                f"unknown cc flavor {cc!r}; valid: {', '.join(CC_FLAVORS)}")
    return [cc_list[i % len(cc_list)] for i in range(n)]


def _write_run_summary(path: Path, result: RunResult) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["scenario", "seed", "ue_id", "cc", "mean_rtt_s",
                    "mean_goodput_bps", "mean_occupancy_bytes",
                    "retransmissions", "rto_count"])
        for row in result.summary_rows():
            w.writerow([row[0], row[1], row[2], row[3],
                        repr(row[4]), repr(row[5]), repr(row[6]),
                        row[7], row[8]])


def _apply_cli_overrides(doc: dict, args) -> dict:
    doc = dict(doc)
    if args.seed is not None:
        doc["seed"] = args.seed
    if getattr(args, "duration", None) is not None:
        doc["duration_s"] = args.duration
    if getattr(args, "rate_cap", None) is not None:
        doc["rate_cap_bps"] = int(args.rate_cap)
    if getattr(args, "cc", None):
        for ue, cc in zip(doc["ues"], _cycle_cc(args.cc, len(doc["ues"]))):
            ue["cc"] = cc
    tcp = dict(doc.get("tcp", {}))
    if getattr(args, "lam", None) is not None:
        tcp["lambda"] = args.lam
    if getattr(args, "epsilon_ms", None) is not None:
        tcp["epsilon_ms"] = args.epsilon_ms
    if tcp:
        doc["tcp"] = tcp
    return doc


def _load_doc(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"scenario file not found: {path}")
    except json.JSONDecodeError as e:
        raise ConfigError(f"invalid JSON in {path}: {e}")


def _swap_trajectories(doc: dict) -> dict:
    """Rotate trajectory assignments among the UEs, keeping cc flavors."""
    doc = json.loads(json.dumps(doc))
    ues = doc["ues"]
    n = len(ues)
    traj = [(u["start"], u["heading"], u.get("speed", 1.75)) for u in ues]
    for i, u in enumerate(ues):
        s, h, v = traj[(i + 1) % n]
        u["start"], u["heading"], u["speed"] = s, h, v
    return doc


def _execute_run(doc: dict, out_dir: Path) -> RunResult:
    scn = Scenario.from_dict(doc)
    result = run_scenario(scn)
    out_dir.mkdir(parents=True, exist_ok=True)
    result.write_csv(out_dir / "trace.csv")
    _write_run_summary(out_dir / "summary.csv", result)
    return result


def _aggregate(rows: list[tuple[str, str, str, float]], out_path: Path) -> None:
    """rows: (scenario, cc, metric, value) -> summary CSV with mean/ci95/n."""
    groups: dict[tuple[str, str, str], list[float]] = {}
    for scenario, cc, metric, value in rows:
        groups.setdefault((scenario, cc, metric), []).append(value)
    with open(out_path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["scenario", "cc", "metric", "mean", "ci95", "n"])
        for (scenario, cc, metric) in sorted(groups):
            vals = groups[(scenario, cc, metric)]
            n = len(vals)
            mean = statistics.fmean(vals)
            ci = (repr(1.96 * statistics.stdev(vals) / math.sqrt(n))
                  if n > 1 else "")
            w.writerow([scenario, cc, metric, repr(mean), ci, n])


def _summary_rows_from_result(result: RunResult):
    for u in result.ues:
        yield (result.scenario_name, u.cc, "mean_rtt_s", u.mean_rtt_s)
        yield (result.scenario_name, u.cc, "mean_goodput_bps",
               u.mean_goodput_bps)
        yield (result.scenario_name, u.cc, "mean_occupancy_bytes",
               u.mean_occupancy_bytes)


def cmd_run(args) -> int:
    doc = _apply_cli_overrides(_load_doc(args.scenario), args)
    out_dir = Path(args.out or ".")
    result = _execute_run(doc, out_dir)
    for row in result.summary_rows():
        print(f"ue {row[2]} ({row[3]}): rtt {row[4] * 1e3:.2f} ms, "
              f"goodput {row[5] / 1e6:.1f} Mbit/s, "
              f"occupancy {row[6] / 1e3:.1f} kB")
    return 0


def cmd_batch(args) -> int:
    template = _apply_cli_overrides(_load_doc(args.scenario), args)
    base_seed = template.get("seed", 1) if args.seed is None else args.seed
    out_dir = Path(args.out or "batch-out")
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = []
    for i in range(args.runs):
        seed = base_seed + i
        variants = [("", dict(template, seed=seed))]
        if args.swap_pairing:
            variants.append(("-swap", dict(_swap_trajectories(template),
                                           seed=seed)))
        for suffix, doc in variants:
            result = _execute_run(doc, out_dir / f"run-{seed}{suffix}")
            rows.extend(_summary_rows_from_result(result))
    _aggregate(rows, out_dir / "summary.csv")
    print(f"{len(rows) // len(SUMMARY_METRICS)} UE results -> "
          f"{out_dir / 'summary.csv'}")
    return 0


def cmd_gen_scenario(args) -> int:
    overrides = {"rate_cap_bps": int(args.rate_cap) if args.rate_cap else None,
                 "duration_s": args.duration,
                 "cc": args.cc,
                 "lambda": args.lam,
                 "epsilon_ms": args.epsilon_ms}
    doc = gen_scenario(args.kind, args.seed, overrides)
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if args.out:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_summarize(args) -> int:
    out_dir = Path(args.out or ".")
    rows = []
    for summary in sorted(out_dir.glob("run-*/summary.csv")):
        with open(summary) as fh:
            for rec in csv.DictReader(fh):
                for metric in SUMMARY_METRICS:
                    rows.append((rec["scenario"], rec["cc"], metric,
                                 float(rec[metric])))
    if not rows:
        print(f"no run summaries found under {out_dir}", file=sys.stderr)
        return 1
    _aggregate(rows, out_dir / "summary.csv")
    print(f"wrote {out_dir / 'summary.csv'}")
    return 0


def _env_seed() -> int | None:
    raw = os.environ.get("XTCP_SIM_SEED")
    return int(raw) if raw else None


def _add_common(p, with_run_flags=True):
    p.add_argument("--seed", type=int, default=_env_seed(),
                   help="run seed (falls back to XTCP_SIM_SEED, then the "
                        "scenario document)")
    p.add_argument("--out", help="output directory")
    if with_run_flags:
        p.add_argument("--cc", type=lambda s: s.split(","),
                       help="comma-separated cc flavors assigned to UEs in "
                            "order (cycled if shorter)")
        p.add_argument("--duration", type=float, help="duration in seconds")
        p.add_argument("--rate-cap", dest="rate_cap", type=float,
                       help="application rate cap in bit/s")
        p.add_argument("--lambda", dest="lam", type=float,
                       help="X-TCP congested-window scaling factor")
        p.add_argument("--epsilon-ms", dest="epsilon_ms", type=float,
                       help="X-TCP RTT tolerance in milliseconds")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="xtcpsim",
        description="Deterministic TCP-over-mmWave uplink simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="execute one scenario")
    p.add_argument("--scenario", required=True, help="scenario JSON path")
    _add_common(p)
    p.set_defaults(fn=cmd_run)

    p = sub.add_parser("batch", help="run N seeds of a scenario")
    p.add_argument("--scenario", required=True, help="scenario JSON path")
    p.add_argument("--runs", type=int, default=1, help="number of seeds")
    p.add_argument("--swap-pairing", action="store_true",
                   help="also run each seed with UE trajectories swapped")
    _add_common(p)
    p.set_defaults(fn=cmd_batch)

    p = sub.add_parser("gen-scenario", help="emit a scenario document")
    p.add_argument("kind", choices=GEN_KINDS)
    _add_common(p)
    p.set_defaults(fn=cmd_gen_scenario)

    p = sub.add_parser("summarize", help="aggregate completed run outputs")
    _add_common(p, with_run_flags=False)
    p.set_defaults(fn=cmd_summarize)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"io error: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
