"""Experiment driver: scheme dispatch, CSV emission, sweeps, checkpoints.

Every scheme of a run is evaluated on the same per-seed request stream, so
scheme comparisons are paired. All output is deterministic: rerunning the
same config and seed reproduces the CSV byte for byte.
"""

from __future__ import annotations

import os
import statistics
from pathlib import Path

from ..dqn import save_params
from ..streams import build_request_stream
from .config import ExperimentConfig
from .records import CSV_COLUMNS

OUT_DIR_ENV = "FOGCACHE_OUT"

_SWEEP_PARAMS = {
    "M": "cache_size",
    "Z": "z_profiles",
    "K": "k_faps",
    "V": "requests_per_slot",
}


def _runners():
    # imported lazily: federated/baselines use harness.records at import time
    from .. import baselines, federated
    return {
        "federated": federated.run,
        "centralized": baselines.centralized_drl,
        "lfu": baselines.run_lfu,
        "apcc": baselines.run_apcc,
        "nucc": baselines.run_nucc,
    }


def resolve_out_dir(config: ExperimentConfig, out_dir=None) -> Path:
    """CLI flag beats the environment variable beats the config value."""
    if out_dir is not None:
        return Path(out_dir)
    env = os.environ.get(OUT_DIR_ENV)
    return Path(env) if env else Path(config.out_dir)


def collect_records(config: ExperimentConfig, with_checkpoints=False):
    """Run every (seed, scheme) pair; returns (records, checkpoints).

    checkpoints maps (scheme, seed, name) to a parameter list.
    """
    runners = _runners()
    records = []
    checkpoints = {}
    for seed in config.seeds:
        stream = build_request_stream(config, seed)
        for scheme in config.schemes:
            artifacts = runners[scheme](config, seed, stream)
            records.extend(artifacts.records)
            if with_checkpoints:
                for name, params in artifacts.checkpoints.items():
                    checkpoints[(scheme, seed, name)] = params
    records.sort(key=lambda r: (r.scheme, r.seed, r.slot))
    return records, checkpoints


def _format_cell(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_csv(records, path) -> None:
    """Fixed schema, '.' decimals, repr floats; no locale dependence."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [",".join(CSV_COLUMNS)]
    for r in records:
        lines.append(",".join(_format_cell(v) for v in (
            r.scheme, r.seed, r.slot, r.delay_ms, r.hit_rate,
            r.caching_fraction, r.local_caching_gain, r.n_cached,
            r.reward, r.loss)))
    path.write_text("\n".join(lines) + "\n")


def read_csv(path):
    """Rows of the metrics CSV as dicts with numeric fields converted."""
    lines = Path(path).read_text().splitlines()
    if not lines:
        raise ValueError(f"{path}: empty CSV")
    header = lines[0].split(",")
    if header != list(CSV_COLUMNS):
        raise ValueError(f"{path}: unexpected CSV header {header}")
    rows = []
    for line in lines[1:]:
        parts = line.split(",")
        rows.append({
            "scheme": parts[0],
            "seed": int(parts[1]),
            "slot": int(parts[2]),
            "delay_ms": float(parts[3]),
            "hit_rate": float(parts[4]),
            "caching_fraction": float(parts[5]),
            "local_caching_gain": float(parts[6]),
            "n_cached": int(parts[7]),
            "reward": float(parts[8]),
            "loss": float(parts[9]),
        })
    return rows


def run_experiment(config: ExperimentConfig, out_dir=None,
                   save_checkpoints=True):
    """Full experiment: metrics CSV plus final model checkpoints.

    Returns the path of the metrics CSV.
    """
    out = resolve_out_dir(config, out_dir)
    out.mkdir(parents=True, exist_ok=True)
    records, checkpoints = collect_records(config,
                                           with_checkpoints=save_checkpoints)
    csv_path = out / "metrics.csv"
    write_csv(records, csv_path)
    for (scheme, seed, name), params in checkpoints.items():
        save_params(out / f"{scheme}_seed{seed}_{name}.ckpt", params)
    return csv_path


def converged_window(records, window_frac: float):
    """Records in the last ``window_frac`` of slots (per scheme/seed)."""
    if not records:
        return []
    t_max = max(r.slot for r in records)
    cutoff = t_max - max(1, int(round(window_frac * t_max))) + 1
    return [r for r in records if r.slot >= cutoff]


def converged_delay_stats(records, window_frac: float):
    """{(scheme, seed): (mean delay, stddev delay)} over the converged window."""
    window = converged_window(records, window_frac)
    by_key = {}
    for r in window:
        by_key.setdefault((r.scheme, r.seed), []).append(r.delay_ms)
    return {key: (statistics.fmean(vals),
                  statistics.pstdev(vals) if len(vals) > 1 else 0.0)
            for key, vals in by_key.items()}


def seed_mean_delay(records, window_frac: float):
    """{scheme: mean over seeds of the converged-window mean delay}."""
    stats = converged_delay_stats(records, window_frac)
    by_scheme = {}
    for (scheme, _), (mean, _) in stats.items():
        by_scheme.setdefault(scheme, []).append(mean)
    return {scheme: statistics.fmean(means)
            for scheme, means in by_scheme.items()}


def sweep(config: ExperimentConfig, parameter: str, values,
          out_dir=None):
    """Run the experiment per parameter value; aggregate converged delays.

    ``parameter`` is one of M, Z, K, V (or the config field name). Writes
    ``sweep_<param>.csv`` (per-seed converged means) and
    ``sweep_<param>_summary.csv`` (mean and stddev over seeds); returns the
    summary path.
    """
    field = _SWEEP_PARAMS.get(parameter.upper(), parameter)
    if field not in {f for f in _SWEEP_PARAMS.values()}:
        raise ValueError(
            f"unknown sweep parameter {parameter!r}; "
            f"choose from {sorted(_SWEEP_PARAMS)}")
    out = resolve_out_dir(config, out_dir)
    out.mkdir(parents=True, exist_ok=True)
    per_seed_lines = ["parameter,value,scheme,seed,converged_delay_ms"]
    summary_lines = ["parameter,value,scheme,mean_delay_ms,std_delay_ms,n_seeds"]
    for value in values:
        cfg = config.replace(**{field: value})
        records, _ = collect_records(cfg)
        stats = converged_delay_stats(records, cfg.convergence_window)
        by_scheme = {}
        for (scheme, seed), (mean, _) in sorted(stats.items()):
            per_seed_lines.append(
                f"{parameter},{value},{scheme},{seed},{repr(mean)}")
            by_scheme.setdefault(scheme, []).append(mean)
        for scheme, means in sorted(by_scheme.items()):
            std = statistics.pstdev(means) if len(means) > 1 else 0.0
            summary_lines.append(
                f"{parameter},{value},{scheme},{repr(statistics.fmean(means))},"
                f"{repr(std)},{len(means)}")
    per_seed_path = out / f"sweep_{parameter}.csv"
    summary_path = out / f"sweep_{parameter}_summary.csv"
    per_seed_path.write_text("\n".join(per_seed_lines) + "\n")
    summary_path.write_text("\n".join(summary_lines) + "\n")
    return summary_path
