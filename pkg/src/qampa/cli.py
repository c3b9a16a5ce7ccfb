"""Command line entry point: ``qampa <command> [options]``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import harness
from .harness import ConfigError, ExperimentConfig

LOGGER = logging.getLogger("qampa.cli")


def _config(args) -> ExperimentConfig:
    if args.config:
        cfg = ExperimentConfig.load(args.config)
    else:
        cfg = ExperimentConfig()
    data = cfg.to_dict()
    if args.seed is not None:
        data["master_seed"] = args.seed
    if args.profile:
        data["profile"] = args.profile
    if args.kinds:
        data["kinds"] = [k.strip() for k in args.kinds.split(",") if k.strip()]
    if args.sizes:
        data["sizes"] = [int(x) for x in args.sizes.split(",")]
    if args.instances is not None:
        data["instances"] = args.instances
    if args.p_max is not None:
        data["p_max"] = args.p_max
    return ExperimentConfig.from_dict(data)


def cmd_generate(args, cfg: ExperimentConfig) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    cfg.save(out / "config.json")
    paths = harness.generate(cfg, out)
    print(f"wrote {len(paths)} instance files to {harness.instance_dir(out)}")
    return 0


def cmd_run(args, cfg: ExperimentConfig) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    if not harness.instance_dir(out).exists():
        harness.generate(cfg, out)
    records = harness.run(cfg, out, threads=args.threads)
    print(f"appended {len(records)} records to {harness.results_path(out)}")
    return 0


def cmd_compile_report(args, cfg: ExperimentConfig) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rows = harness.compile_reports(cfg)
    path = out / "compile_report.jsonl"
    path.write_text("".join(json.dumps(r, sort_keys=True) + "\n" for r in rows))
    for r in rows:
        print(f"{r['kind']:12s} {r['gate_set']:13s} n={r['n']:<3d} p={r['p']:<2d} "
              f"2q={r['two_qubit_gates']:<5d} 2q-depth={r['two_qubit_depth']:<4d} "
              f"cx={r['cnot_count']:<5d} depth={r['total_depth']}")
    return 0


def _records(out: Path) -> list[dict]:
    records = harness.read_records(harness.results_path(out))
    if not records:
        raise FileNotFoundError(f"no results in {harness.results_path(out)}; run 'run' first")
    return records


def cmd_aggregate(args, cfg: ExperimentConfig) -> int:
    out = Path(args.out)
    records = _records(out)
    harness.write_csv(harness.aggregate(records, cfg.R_list), out / "aggregate.csv")
    harness.write_csv(harness.metric_rows(records), out / "metrics.csv")
    report = harness.compare_report(records, R=args.R)
    (out / "compare.json").write_text(json.dumps(report, indent=1, sort_keys=True) + "\n")
    for row in report:
        line = f"p={row['p']}: ranking " + " < ".join(row["ranking"])
        if "median_diff_qaoa_minus_qampa" in row:
            line += (f" | median(QAOA-QAMPA)={row['median_diff_qaoa_minus_qampa']:+.5f}"
                     f" wins QAOA/QAMPA/tie={row['qaoa_wins']}/{row['qampa_wins']}/{row['ties']}")
        print(line)
    return 0


def cmd_export_plot_data(args, cfg: ExperimentConfig) -> int:
    out = Path(args.out)
    records = _records(out)
    harness.write_csv(harness.scatter_rows(records, R=args.R), out / "scatter.csv")
    harness.write_csv(harness.angle_rows(records), out / "angles.csv")
    print(f"wrote {out / 'scatter.csv'} and {out / 'angles.csv'}")
    return 0


COMMANDS = {
    "generate": cmd_generate,
    "run": cmd_run,
    "compile-report": cmd_compile_report,
    "aggregate": cmd_aggregate,
    "export-plot-data": cmd_export_plot_data,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="experiment config (JSON)")
    common.add_argument("--out", type=Path, default=Path("qampa-out"), help="output directory")
    common.add_argument("--seed", type=int, help="master seed")
    common.add_argument("--profile", choices=["paper", "desk"], help="scanlast budget profile")
    common.add_argument("--kinds", help="comma-separated ansatz kinds")
    common.add_argument("--sizes", help="comma-separated even qubit counts")
    common.add_argument("--instances", type=int, help="instances per size")
    common.add_argument("--p-max", type=int, dest="p_max")
    common.add_argument("--threads", type=int, default=1, help="worker processes")
    common.add_argument("--R", type=int, default=5, help="metric R for reports")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="qampa", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = _config(args)
        return COMMANDS[args.command](args, cfg)
    except (ConfigError, FileNotFoundError, ValueError) as exc:
        print(f"qampa {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
