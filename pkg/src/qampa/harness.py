"""Experiment orchestration: instance ensembles, scanlast runs, aggregation and plot data."""
from __future__ import annotations

import csv
import io
import json
import logging
import time
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .ansatz import AngleSchedule, AnsatzKind, angle_domains, build, execute
from .compiler import GATE_SETS, compile_plan, depth_report
from .metrics import metric_report
from .optimizer import ScanlastConfig, default_ordering_seed, profile_config, scanlast
from .problem import (DEFAULT_COEFFS, ProblemInstance, energy_table, generate_instance,
                      load_instance, save_instance)

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
ALL_KINDS = tuple(k.value for k in AnsatzKind)


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    sizes: list[int] = field(default_factory=lambda: [8])
    kappa: str | int = "half"  # "half" -> n // 2, or a fixed integer
    instances: int = 10
    kinds: list[str] = field(default_factory=lambda: ["QAOA", "QAMPA"])
    p_max: int = 4
    profile: str = "desk"
    scanlast: dict = field(default_factory=dict)  # overrides on top of the profile
    R_list: list[int] = field(default_factory=lambda: [1, 5])
    master_seed: int = 0
    coeff_set: list[float] = field(default_factory=lambda: list(DEFAULT_COEFFS))
    schema_version: int = SCHEMA_VERSION

    def __post_init__(self):
        if not self.sizes or any(n < 2 or n % 2 for n in self.sizes):
            raise ConfigError(f"sizes must be even integers >= 2, got {self.sizes}")
        if self.instances < 1:
            raise ConfigError("instances must be >= 1")
        try:
            self.kinds = [AnsatzKind.parse(k).value for k in self.kinds]
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        if self.profile not in ("paper", "desk"):
            raise ConfigError(f"profile must be 'paper' or 'desk', got {self.profile!r}")
        if not (self.kappa == "half" or isinstance(self.kappa, int)):
            raise ConfigError(f"kappa must be 'half' or an integer, got {self.kappa!r}")
        unknown = set(self.scanlast) - {f.name for f in fields(ScanlastConfig)}
        if unknown:
            raise ConfigError(f"unknown scanlast fields {sorted(unknown)}")

    def kappa_for(self, n: int) -> int:
        return n // 2 if self.kappa == "half" else int(self.kappa)

    def scanlast_config(self) -> ScanlastConfig:
        opts = {"p_max": self.p_max, "master_seed": self.master_seed, **self.scanlast}
        return profile_config(self.profile, **opts)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> ExperimentConfig:
        known = {f.name for f in fields(cls)}
        extra = set(data) - known
        if extra:
            raise ConfigError(f"unknown config fields {sorted(extra)}")
        version = data.get("schema_version", SCHEMA_VERSION)
        if version != SCHEMA_VERSION:
            raise ConfigError(f"unsupported config schema_version {version}")
        return cls(**data)

    @classmethod
    def load(cls, path) -> ExperimentConfig:
        path = Path(path)
        try:
            data = json.loads(path.read_text())
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {path}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
        return cls.from_dict(data)

    def save(self, path) -> Path:
        path = Path(path)
        path.write_text(json.dumps(self.to_dict(), indent=1, sort_keys=True) + "\n")
        return path


def instance_seed(master_seed: int, n: int, index: int) -> int:
    return int(np.random.SeedSequence([int(master_seed), n, index]).generate_state(1, np.uint32)[0])


def instance_ensemble(config: ExperimentConfig) -> list[ProblemInstance]:
    out = []
    for n in config.sizes:
        for i in range(config.instances):
            out.append(generate_instance(n, config.kappa_for(n), config.coeff_set,
                                         seed=instance_seed(config.master_seed, n, i)))
    return out


# --------------------------------------------------------------------------- #
# file layout
# --------------------------------------------------------------------------- #
def instance_dir(out: Path) -> Path:
    return Path(out) / "instances"


def results_path(out: Path) -> Path:
    return Path(out) / "results.jsonl"


def generate(config: ExperimentConfig, out) -> list[Path]:
    d = instance_dir(out)
    d.mkdir(parents=True, exist_ok=True)
    return [save_instance(inst, d / f"{inst.id}.json") for inst in instance_ensemble(config)]


def load_ensemble(config: ExperimentConfig, out) -> list[ProblemInstance]:
    d = instance_dir(out)
    instances = []
    for expected in instance_ensemble(config):
        path = d / f"{expected.id}.json"
        if not path.exists():
            raise FileNotFoundError(f"missing instance file {path}; run 'generate' first")
        instances.append(load_instance(path))
    return instances


# --------------------------------------------------------------------------- #
# runs
# --------------------------------------------------------------------------- #
def _run_cell(args) -> tuple[list[dict], list[dict]]:
    inst_dict, kind, scfg, R_list = args
    instance = ProblemInstance.from_dict(inst_dict)
    progress: list[dict] = []
    t0 = time.perf_counter()
    layers = scanlast(instance, kind, scfg, progress=progress.append)
    wall = time.perf_counter() - t0
    table = energy_table(instance, build(kind, instance, 1).basis)
    oseed = (default_ordering_seed(scfg.master_seed, instance.id)
             if scfg.ordering_seed is None else scfg.ordering_seed)
    gmax, bmax = angle_domains(instance)
    records = []
    for layer in layers:
        sched = layer.best_schedule
        state = execute(build(kind, instance, layer.p, oseed), sched)
        rep = metric_report(state, table, R_list)
        red = sched.reduced(gmax, bmax)
        records.append({
            "schema_version": SCHEMA_VERSION,
            "instance_id": instance.id,
            "n": instance.n,
            "kappa": instance.kappa,
            "ansatz": AnsatzKind.parse(kind).value,
            "p": layer.p,
            "objective_R": scfg.R,
            "objective": layer.best_value,
            "metrics": {str(R): v for R, v in sorted(rep.best.items())},
            "p_optimum": rep.p_optimum,
            "gammas": list(sched.gammas),
            "betas": list(sched.betas),
            "gammas_reduced": list(red.gammas),
            "betas_reduced": list(red.betas),
            "ordering_seed": oseed,
            "master_seed": scfg.master_seed,
            "evaluations": layer.evaluations,
            "wall_time": wall,
        })
    return records, progress


def read_records(path) -> list[dict]:
    path = Path(path)
    if not path.exists():
        return []
    out = []
    with path.open() as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                out.append(json.loads(line))
            except json.JSONDecodeError as exc:
                raise ValueError(f"{path}:{lineno}: {exc.msg}") from None
    return out


def run(config: ExperimentConfig, out, threads: int = 1, kinds: Sequence[str] | None = None) -> list[dict]:
    """Run scanlast for every (instance, kind) cell not already in results.jsonl."""
    out = Path(out)
    instances = load_ensemble(config, out)
    kinds = [AnsatzKind.parse(k).value for k in (kinds or config.kinds)]
    scfg = config.scanlast_config()
    rpath = results_path(out)
    done = defaultdict(set)
    for rec in read_records(rpath):
        done[(rec["instance_id"], rec["ansatz"])].add(rec["p"])
    full = set(range(1, scfg.p_max + 1))
    cells = [(inst.to_dict(), k, scfg, config.R_list) for inst in instances for k in kinds
             if not full <= done[(inst.id, k)]]
    log.info("%d cells to run (%d already complete)", len(cells), len(instances) * len(kinds) - len(cells))
    new: list[dict] = []
    ppath = out / "progress.jsonl"
    with rpath.open("a") as rfh, ppath.open("a") as pfh:
        if threads > 1 and len(cells) > 1:
            with ProcessPoolExecutor(max_workers=threads) as pool:
                outputs = pool.map(_run_cell, cells)
                for records, progress in outputs:
                    _write(rfh, pfh, records, progress, done)
                    new.extend(records)
        else:
            for cell in cells:
                records, progress = _run_cell(cell)
                _write(rfh, pfh, records, progress, done)
                new.extend(records)
    return new


def _write(rfh, pfh, records, progress, done):
    for rec in records:
        if rec["p"] in done[(rec["instance_id"], rec["ansatz"])]:
            continue
        rfh.write(json.dumps(rec, sort_keys=True) + "\n")
    rfh.flush()
    for rec in progress:
        pfh.write(json.dumps(rec, sort_keys=True) + "\n")


# --------------------------------------------------------------------------- #
# aggregation and reports
# --------------------------------------------------------------------------- #
def _value(rec: dict, R: int) -> float:
    return float(rec["metrics"][str(R)])


def aggregate(records: Iterable[dict], R_list: Sequence[int] = (1, 5)) -> list[dict]:
    """Median and standard deviation over instances per (ansatz, n, p, R)."""
    cells: dict[tuple, list[float]] = defaultdict(list)
    for rec in records:
        for R in R_list:
            if str(R) in rec["metrics"]:
                cells[(rec["ansatz"], rec["n"], rec["p"], R)].append(_value(rec, R))
    rows = []
    for (kind, n, p, R), vals in sorted(cells.items()):
        v = np.asarray(vals)
        rows.append({"ansatz": kind, "n": n, "p": p, "R": R, "count": v.size,
                     "median": float(np.median(v)), "std": float(np.std(v)),
                     "min": float(v.min()), "max": float(v.max())})
    return rows


def metric_rows(records: Iterable[dict]) -> list[dict]:
    """Flat {instance_id, ansatz, p, R, value} rows."""
    rows = []
    for rec in records:
        for R, v in sorted(rec["metrics"].items(), key=lambda kv: int(kv[0])):
            rows.append({"instance_id": rec["instance_id"], "ansatz": rec["ansatz"],
                         "p": rec["p"], "R": int(R), "value": v})
    return sorted(rows, key=lambda r: (r["instance_id"], r["ansatz"], r["p"], r["R"]))


def scatter_rows(records: Iterable[dict], R: int = 5, x_kind: str = "QAOA",
                 y_kind: str = "QAMPA") -> list[dict]:
    by = defaultdict(dict)
    for rec in records:
        by[(rec["instance_id"], rec["n"], rec["p"])][rec["ansatz"]] = _value(rec, R)
    rows = []
    for (iid, n, p), vals in sorted(by.items()):
        if x_kind in vals and y_kind in vals:
            rows.append({"instance_id": iid, "n": n, "p": p, "R": R,
                         x_kind: vals[x_kind], y_kind: vals[y_kind]})
    return rows


def angle_rows(records: Iterable[dict]) -> list[dict]:
    rows = []
    for rec in records:
        for layer, (g, b) in enumerate(zip(rec["gammas_reduced"], rec["betas_reduced"]), start=1):
            rows.append({"instance_id": rec["instance_id"], "ansatz": rec["ansatz"], "n": rec["n"],
                         "p": rec["p"], "layer": layer, "gamma": g, "beta": b})
    return sorted(rows, key=lambda r: (r["instance_id"], r["ansatz"], r["p"], r["layer"]))


def compare_report(records: Iterable[dict], R: int = 5) -> list[dict]:
    """Per-p QAOA vs QAMPA summary and a median-based ranking of all kinds present."""
    records = list(records)
    per_p = defaultdict(lambda: defaultdict(dict))
    for rec in records:
        per_p[rec["p"]][rec["ansatz"]][rec["instance_id"]] = _value(rec, R)
    out = []
    for p in sorted(per_p):
        kinds = per_p[p]
        medians = {k: float(np.median(list(v.values()))) for k, v in kinds.items()}
        ranking = sorted(medians, key=lambda k: (medians[k], k))
        row = {"p": p, "R": R, "medians": medians, "ranking": ranking}
        qa, qm = kinds.get("QAOA", {}), kinds.get("QAMPA", {})
        common = sorted(set(qa) & set(qm))
        if common:
            diffs = np.array([qa[i] - qm[i] for i in common])
            row.update({
                "instances": len(common),
                "median_diff_qaoa_minus_qampa": float(np.median(diffs)),
                "qaoa_wins": int(np.sum(diffs < 0)),
                "qampa_wins": int(np.sum(diffs > 0)),
                "ties": int(np.sum(diffs == 0)),
            })
        out.append(row)
    return out


def write_csv(rows: Sequence[dict], path) -> Path:
    path = Path(path)
    buf = io.StringIO()
    if rows:
        writer = csv.DictWriter(buf, fieldnames=list(rows[0].keys()), lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in row.items()})
    path.write_text(buf.getvalue())
    return path


def compile_reports(config: ExperimentConfig, gate_sets: Sequence[str] = GATE_SETS,
                    kinds: Sequence[str] | None = None) -> list[dict]:
    """DepthReports for the first instance of each size, for p = 1..p_max."""
    rows = []
    for n in config.sizes:
        inst = generate_instance(n, config.kappa_for(n), config.coeff_set,
                                 seed=instance_seed(config.master_seed, n, 0))
        for kind in kinds or config.kinds:
            for p in range(1, config.p_max + 1):
                plan = build(kind, inst, p, default_ordering_seed(config.master_seed, inst.id))
                for gs in gate_sets:
                    rows.append(depth_report(compile_plan(plan, gs)).to_dict())
    return rows
