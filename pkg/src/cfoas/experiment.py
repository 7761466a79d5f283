"""Monte Carlo drops, SE statistics, parameter sweeps and output files."""

from __future__ import annotations

import csv
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .config import (
    STREAM_SHADOWING,
    SystemConfig,
    drop_topology,
    noise_power,
    rng_stream,
)
from .estimation import EstimationStats
from .propagation import large_scale_matrix
from .selection import build_plan
from .sinr import (
    APPROACHES,
    SinrInputs,
    downlink_sinr,
    full_power_allocation,
    spectral_efficiency,
    uplink_sinr,
)

PERCENTILE_METHOD = "linear"
DIRECTIONS = ("ul", "dl")
# (approach, direction) pairs reported by every drop
SERIES = tuple((a, "ul") for a in APPROACHES) + tuple(
    (a, "dl") for a in APPROACHES + ("mu-oas-noncoherent",))
SAMPLE_COLUMNS = ("drop", "user", "approach", "direction", "sinr", "se_bps_hz")
SWEEP_AXES = {"nu": "users_per_rb", "ms": "aps_per_user"}


@dataclass(frozen=True)
class DropRow:
    drop: int
    user: int
    approach: str
    direction: str
    sinr: float
    se: float


def drop_inputs(config: SystemConfig, drop_index: int):
    """Large-scale gains, estimate statistics and selection plan of one drop."""
    topology = drop_topology(config, drop_index)
    rng = rng_stream(config.seed, drop_index, STREAM_SHADOWING)
    beta = large_scale_matrix(topology, config, rng).beta
    sigma2 = noise_power(config)
    stats = EstimationStats.from_beta(beta, config.p_u, config.p_d, sigma2)
    plan = build_plan(beta, config)
    return beta, stats, plan, sigma2


def run_drop(config: SystemConfig, drop_index: int) -> list[DropRow]:
    """Per-user SINR and SE of every approach and direction on one drop.

    All approaches see the same topology and shadowing. The closed forms
    depend on channel statistics only, so no small-scale draw is needed.
    """
    beta, stats, plan, sigma2 = drop_inputs(config, drop_index)
    rows = []
    for approach in APPROACHES:
        inputs = SinrInputs(beta=beta, alpha=stats.alpha, psi=stats.psi,
                            power=full_power_allocation(approach, plan, stats.alpha),
                            sets=plan, noise_over_pu=sigma2 / config.p_u,
                            noise_over_pd=sigma2 / config.p_d)
        evaluations = [(approach, "ul", uplink_sinr), (approach, "dl", downlink_sinr)]
        if approach == "mu-oas":
            evaluations.append(("mu-oas-noncoherent", "dl", downlink_sinr))
        for name, direction, fn in evaluations:
            for k in range(config.num_users):
                gamma = fn(name, k, inputs)
                rows.append(DropRow(drop_index, k, name, direction, gamma,
                                    spectral_efficiency(gamma)))
    return rows


def _run_drop_star(args):
    return run_drop(*args)


def summarize(values) -> dict[str, float]:
    values = np.sort(np.asarray(values, dtype=float))
    pct = np.percentile(values, [50, 5, 95], method=PERCENTILE_METHOD)
    return {"median": float(pct[0]), "p5": float(pct[1]), "p95": float(pct[2]),
            "mean": float(values.mean()), "count": int(values.size)}


def empirical_cdf(values) -> tuple[np.ndarray, np.ndarray]:
    values = np.sort(np.asarray(values, dtype=float))
    return values, np.arange(1, values.size + 1) / values.size


@dataclass(frozen=True)
class SeReport:
    """All per-user samples of an experiment and their summary statistics."""

    rows: list = field(repr=False)
    config: SystemConfig = field(default_factory=SystemConfig)

    @property
    def seed(self) -> int:
        return self.config.seed

    def samples(self, approach: str, direction: str, key: str = "se") -> np.ndarray:
        return np.array([getattr(r, key) for r in self.rows
                         if r.approach == approach and r.direction == direction])

    @property
    def series(self) -> list[tuple[str, str]]:
        present = {(r.approach, r.direction) for r in self.rows}
        return [s for s in SERIES if s in present]

    @property
    def summary(self) -> dict[tuple[str, str], dict[str, float]]:
        return {s: summarize(self.samples(*s)) for s in self.series}

    def percentile(self, approach: str, direction: str, q: float) -> float:
        return float(np.percentile(self.samples(approach, direction), q,
                                   method=PERCENTILE_METHOD))


def run_experiment(config: SystemConfig, workers: int = 1, drops: int | None = None) -> SeReport:
    """Aggregate :func:`run_drop` over all drops (optionally in parallel).

    Each drop owns its random streams, so the result does not depend on the
    number of workers.
    """
    if drops is not None:
        config = config.replace(drops=drops)
    jobs = [(config, d) for d in range(config.drops)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            per_drop = list(pool.map(_run_drop_star, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    else:
        per_drop = [run_drop(*job) for job in jobs]
    rows = [row for drop_rows in per_drop for row in drop_rows]
    return SeReport(rows=rows, config=config)


@dataclass(frozen=True)
class SweepResult:
    """5th-percentile SE curves over one configuration axis."""

    axis: str
    values: list
    curves: dict = field(repr=False)

    def curve(self, approach: str, direction: str) -> np.ndarray:
        return np.asarray(self.curves[(approach, direction)])


def sweep(config: SystemConfig, axis: str, values, workers: int = 1,
          percentile: float = 5.0) -> SweepResult:
    """Rerun the experiment for each axis value with the same seed.

    ``axis="nu"`` varies the users per RB, ``axis="ms"`` the APs selected
    per user. Reusing the seed gives common random numbers across points.
    """
    if axis not in SWEEP_AXES:
        raise ValueError(f"axis must be one of {sorted(SWEEP_AXES)}")
    values = [int(v) for v in values]
    if not values:
        raise ValueError("sweep needs at least one value")
    curves: dict = {}
    for v in values:
        report = run_experiment(config.replace(**{SWEEP_AXES[axis]: v}), workers=workers)
        for s in report.series:
            curves.setdefault(s, []).append(report.percentile(*s, percentile))
    return SweepResult(axis=axis, values=values, curves=curves)


# --------------------------------------------------------------------------
# Output files
# --------------------------------------------------------------------------

def write_samples(report: SeReport, path: Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SAMPLE_COLUMNS)
        for r in report.rows:
            writer.writerow((r.drop, r.user, r.approach, r.direction, repr(r.sinr), repr(r.se)))


def write_cdf(report: SeReport, path: Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(("approach", "direction", "se", "cum_prob"))
        for approach, direction in report.series:
            se, prob = empirical_cdf(report.samples(approach, direction))
            for x, p in zip(se, prob):
                writer.writerow((approach, direction, repr(float(x)), repr(float(p))))


def summary_document(report: SeReport) -> dict:
    per_series: dict = {}
    for (approach, direction), stats in report.summary.items():
        per_series.setdefault(direction, {})[approach] = stats
    return {
        "percentile_method": f"{PERCENTILE_METHOD} interpolation between order statistics",
        "units": "bit/s/Hz",
        "seed": report.seed,
        "drops": report.config.drops,
        "samples_per_drop": report.config.num_users,
        "config": report.config.to_dict(),
        "summary": per_series,
    }


def write_report(report: SeReport, out_dir) -> dict[str, Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {"samples": out / "samples.csv", "summary": out / "summary.json",
             "cdf": out / "cdf.csv"}
    write_samples(report, paths["samples"])
    write_cdf(report, paths["cdf"])
    with open(paths["summary"], "w") as fh:
        json.dump(summary_document(report), fh, indent=2, sort_keys=True)
        fh.write("\n")
    return paths


def write_sweep(result: SweepResult, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow((result.axis, "approach", "direction", "p5_se_bps_hz"))
        for (approach, direction), curve in result.curves.items():
            for v, p in zip(result.values, curve):
                writer.writerow((v, approach, direction, repr(float(p))))
