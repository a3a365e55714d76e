"""Parameter sweeps and leakage histograms over random channel realizations.

Realization ``r`` of a run with master seed ``s`` uses the scenario seed
drawn from ``SeedSequence([s, r])``; the same realization seeds are reused
for every grid value, so sweeps compare methods and grid points on common
channels. Output rows are ordered by (grid value, method) no matter how the
work is scheduled.

The number of worker processes comes from the ``ROBUST_SWIPT_WORKERS``
environment variable (default 1, i.e. in-process).
"""
from __future__ import annotations

import csv
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .io import RunConfig, parse_config
from .quadforms import eval_realized
from .scenario import draw_errors, watts_to_dbm
from .solution import Method, design, validate_outage

WORKERS_ENV = "ROBUST_SWIPT_WORKERS"
SWEEP_PARAMETERS = ("gamma_dB", "P_req_dBm", "outage_rho", "M")
DEFAULT_METHODS = (Method.METHOD1.value, Method.METHOD2_SOC.value)

SWEEP_HEADER = [
    "parameter", "value", "method", "n_realizations", "n_feasible_method", "feasibility_rate",
    "n_common", "mean_power_W", "mean_power_dBm", "mean_iterations", "mean_rank_ratio",
    "max_rank_ratio", "max_sinr_outage", "max_leak_outage", "max_power_outage",
    "mean_leak_sinr_dB", "status",
]
HISTOGRAM_HEADER = ["realization", "scenario_seed", "method", "status", "total_power_dBm", "avg_leak_sinr_dB"]


def worker_count() -> int:
    raw = os.environ.get(WORKERS_ENV, "1")
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"{WORKERS_ENV} must be an integer, got {raw!r}") from None
    return max(1, n)


def realization_seeds(master_seed: int, count: int) -> list[int]:
    return [int(np.random.SeedSequence([int(master_seed), r]).generate_state(1)[0]) for r in range(count)]


@dataclass(frozen=True)
class SweepSpec:
    parameter: str
    values: tuple
    realizations: int = 100
    methods: tuple = DEFAULT_METHODS
    base: RunConfig = field(default_factory=RunConfig)
    seed: int = 0
    validation_draws: int = 0

    def __post_init__(self):
        if self.parameter not in SWEEP_PARAMETERS:
            raise ConfigError(f"parameter must be one of {SWEEP_PARAMETERS}, got {self.parameter!r}")
        if not self.values:
            raise ConfigError("sweep grid must be nonempty")
        if self.realizations < 1:
            raise ConfigError("realizations must be at least 1")
        if self.validation_draws < 0:
            raise ConfigError("validation_draws must be non-negative")
        object.__setattr__(self, "methods", tuple(Method.parse(m).value for m in self.methods))
        object.__setattr__(self, "values", tuple(self.values))

    def config_at(self, value) -> RunConfig:
        if self.parameter == "outage_rho":
            return self.base.with_changes(rho=value, rho_leak=value, varrho=value)
        if self.parameter == "M":
            if int(value) != value:
                raise ConfigError("M grid values must be integers")
            return self.base.with_changes(M=int(value))
        return self.base.with_changes(**{self.parameter: value})


def parse_sweep(data: dict, base_dir: Path | None = None) -> SweepSpec:
    """Build a :class:`SweepSpec` from JSON.

    ``base`` is either an inline configuration object or a path (relative to
    ``base_dir``) of a configuration file.
    """
    if not isinstance(data, dict):
        raise ConfigError("sweep spec must be a JSON object")
    data = dict(data)
    data.pop("schema_version", None)
    allowed = {"parameter", "values", "realizations", "methods", "base", "seed", "validation_draws"}
    unknown = sorted(set(data) - allowed)
    if unknown:
        raise ConfigError(f"unknown sweep keys: {', '.join(unknown)}")
    base = data.pop("base", {})
    if isinstance(base, str):
        path = Path(base) if base_dir is None else base_dir / base
        try:
            base = json.loads(path.read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot load base config {path}: {exc}") from exc
    if "parameter" not in data or "values" not in data:
        raise ConfigError("sweep spec needs 'parameter' and 'values'")
    try:
        return SweepSpec(base=parse_config(base), **data)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def _avg_leak_db(sol, scenario, draws: int, seed: int) -> float:
    if scenario.config.N == 0 or draws == 0:
        return float("nan")
    _, leak, _ = eval_realized(sol.beamformers(), scenario, draw_errors(scenario, draws, seed))
    return float(10.0 * np.log10(leak.mean()))


def run_realization(cfg: RunConfig, methods, scenario_seed: int, draws: int) -> dict:
    """Design every method on one realization; returns plain data (picklable)."""
    scenario = cfg.scenario(scenario_seed)
    out = {}
    for m in methods:
        try:
            sol = design(scenario, m)
        except Exception as exc:  # reported as a failure row, never swallowed silently
            out[m] = {"status": "error", "error": f"{type(exc).__name__}: {exc}"}
            continue
        rec = {
            "status": sol.status.value, "power": sol.total_power,
            "iterations": sol.solver.get("iterations", 0),
            "rank_ratio": sol.max_rank_ratio if sol.ok else float("nan"),
        }
        if sol.ok and draws > 0:
            rep = validate_outage(sol, scenario, draws, scenario_seed ^ 0x5EED)
            rec.update(
                sinr_out=float(rep.sinr.max()) if rep.sinr.size else 0.0,
                leak_out=float(rep.leak.max()) if rep.leak.size else 0.0,
                power_out=float(rep.power.max()) if rep.power.size else 0.0,
                leak_db=_avg_leak_db(sol, scenario, draws, scenario_seed ^ 0x1EA4),
            )
        out[m] = rec
    return out


def _run_task(args):
    return run_realization(*args)


def _map(tasks):
    n = worker_count()
    if n == 1 or len(tasks) == 1:
        return [_run_task(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=n) as pool:
        return list(pool.map(_run_task, tasks))


def _nanmean(vals):
    vals = [v for v in vals if v is not None and np.isfinite(v)]
    return float(np.mean(vals)) if vals else float("nan")


def _nanmax(vals):
    vals = [v for v in vals if v is not None and np.isfinite(v)]
    return float(np.max(vals)) if vals else float("nan")


def summarize(spec: SweepSpec, value, results: list[dict]) -> list[dict]:
    """Aggregate per-realization records into one row per method.

    Powers and outage statistics use only the realizations where every
    requested method returned an optimum.
    """
    n = len(results)
    common = [r for r in results if all(r[m]["status"] == "Optimal" for m in spec.methods)]
    crashed = any(r[m]["status"] == "error" for r in results for m in spec.methods)
    rows = []
    for m in spec.methods:
        own = sum(r[m]["status"] == "Optimal" for r in results)
        recs = [r[m] for r in common]
        mean_w = _nanmean([x["power"] for x in recs])
        rows.append({
            "parameter": spec.parameter, "value": value, "method": m,
            "n_realizations": n, "n_feasible_method": own, "feasibility_rate": own / n,
            "n_common": len(recs), "mean_power_W": mean_w,
            "mean_power_dBm": float(watts_to_dbm(mean_w)) if np.isfinite(mean_w) else float("nan"),
            "mean_iterations": _nanmean([x["iterations"] for x in recs]),
            "mean_rank_ratio": _nanmean([x["rank_ratio"] for x in recs]),
            "max_rank_ratio": _nanmax([x["rank_ratio"] for x in recs]),
            "max_sinr_outage": _nanmax([x.get("sinr_out") for x in recs]),
            "max_leak_outage": _nanmax([x.get("leak_out") for x in recs]),
            "max_power_outage": _nanmax([x.get("power_out") for x in recs]),
            "mean_leak_sinr_dB": _nanmean([x.get("leak_db") for x in recs]),
            "status": "error" if crashed else "ok",
        })
    return rows


def _fmt(v):
    if isinstance(v, float):
        return "nan" if not np.isfinite(v) else repr(v)
    return str(v)


def run_sweep(spec: SweepSpec, out_csv, keep_records: list | None = None) -> bool:
    """Write the sweep CSV; returns ``False`` if any design crashed.

    Rows are flushed after each grid value, so an interrupted run leaves the
    completed part on disk. Crashes are marked in the ``status`` column and
    followed by a ``FAILED`` marker row.
    """
    seeds = realization_seeds(spec.seed, spec.realizations)
    ok = True
    with open(out_csv, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SWEEP_HEADER)
        fh.flush()
        for value in spec.values:
            cfg = spec.config_at(value)
            tasks = [(cfg, spec.methods, s, spec.validation_draws) for s in seeds]
            try:
                results = _map(tasks)
            except Exception as exc:
                writer.writerow([spec.parameter, value, "FAILED"] + [""] * (len(SWEEP_HEADER) - 4)
                                + [f"crash: {type(exc).__name__}: {exc}"])
                fh.flush()
                return False
            if keep_records is not None:
                keep_records.append((value, results))
            rows = summarize(spec, value, results)
            for row in rows:
                writer.writerow([_fmt(row[k]) for k in SWEEP_HEADER])
            if any(row["status"] == "error" for row in rows):
                errors = sorted({r[m]["error"] for r in results for m in spec.methods if r[m]["status"] == "error"})
                writer.writerow([spec.parameter, value, "FAILED"] + [""] * (len(SWEEP_HEADER) - 4)
                                + ["crash: " + " | ".join(errors)])
                ok = False
            fh.flush()
    return ok


HISTOGRAM_METHODS = (Method.METHOD1.value, Method.METHOD2_SOC.value, Method.BASELINE.value)


def histogram_rows(cfg: RunConfig, n_realizations: int, n_draws: int, master_seed: int,
                   methods=HISTOGRAM_METHODS) -> list[dict]:
    """Per-realization average leakage SINR (dB) of every method."""
    if n_draws < 1:
        raise ConfigError("n-draws must be at least 1")
    if n_realizations < 1:
        raise ConfigError("n-realizations must be at least 1")
    if cfg.N < 1:
        raise ConfigError("leakage histogram needs at least one ER")
    seeds = realization_seeds(master_seed, n_realizations)
    rows = []
    for r, seed in enumerate(seeds):
        scenario = cfg.scenario(seed)
        for m in methods:
            sol = design(scenario, m)
            row = {"realization": r, "scenario_seed": seed, "method": Method.parse(m).value,
                   "status": sol.status.value, "total_power_dBm": float("nan"), "avg_leak_sinr_dB": float("nan")}
            if sol.ok:
                row["total_power_dBm"] = float(watts_to_dbm(sol.total_power))
                row["avg_leak_sinr_dB"] = _avg_leak_db(sol, scenario, n_draws, seed ^ 0x1EA4)
            rows.append(row)
    return rows


def write_rows(rows: list[dict], header: list[str], out_csv):
    with open(out_csv, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(row[k]) for k in header])
