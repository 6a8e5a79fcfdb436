"""Seeded Monte Carlo sweeps over noise level, dimension and band width,
with CSV output.
"""
from __future__ import annotations

import csv
import logging
import math
import statistics
import struct
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from .bounds import BOUND_APPLICABILITY, BoundReport, eval_bounds
from .graph import WeightedGraph, banded_graph, laplacians
from .solvers import SdpResult, SolverResult, solve_er, solve_er_normalized, solve_lsp, solve_sdp
from .synth import MeasurementSet, WeightScheme, apply_angular_noise, build_weights, random_signal

__all__ = [
    "DEFAULT_ALPHAS",
    "ExperimentConfig",
    "InstanceResult",
    "SweepRow",
    "emit_csv",
    "instance_seeds",
    "read_csv",
    "run_delta_sweep",
    "run_dim_sweep",
    "run_instance",
    "run_noise_sweep",
]

log = logging.getLogger(__name__)

METHODS = ("er", "lsp", "sdp")
DEFAULT_ALPHAS = tuple(float(a) for a in np.logspace(np.log10(0.01), np.log10(180.0), 25))
DELTA_SWEEP_ALPHAS = (0.01, 2.0, 40.0, 90.0)


@dataclass
class ExperimentConfig:
    d: int = 64
    delta: int = 16
    scheme: WeightScheme = WeightScheme.UNIT
    methods: tuple[str, ...] = METHODS
    alphas_deg: tuple[float, ...] = DEFAULT_ALPHAS
    dims: tuple[int, ...] = (64, 128, 256, 512)
    deltas: tuple[int, ...] = (2, 4, 8, 16, 24, 32)
    trials: int = 30
    seed: int = 0
    magnitude_noise_eps: float = 0.0
    out: Path | None = None
    dim_alpha_deg: float = 2.0
    delta_alphas_deg: tuple[float, ...] = DELTA_SWEEP_ALPHAS
    runtime_reps: int = 3

    def __post_init__(self):
        self.scheme = WeightScheme.parse(self.scheme)
        self.methods = tuple(m.lower() for m in self.methods)
        self.alphas_deg = tuple(float(a) for a in self.alphas_deg)
        self.dims = tuple(int(n) for n in self.dims)
        self.deltas = tuple(int(n) for n in self.deltas)
        self.delta_alphas_deg = tuple(float(a) for a in self.delta_alphas_deg)
        self.validate()

    def validate(self) -> None:
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if self.runtime_reps < 1:
            raise ValueError("runtime_reps must be at least 1")
        unknown = set(self.methods) - set(METHODS)
        if unknown or not self.methods:
            raise ValueError(f"methods must be a nonempty subset of {METHODS}, got {self.methods}")
        for name in ("alphas_deg", "dims", "deltas", "delta_alphas_deg"):
            if not getattr(self, name):
                raise ValueError(f"{name} must be nonempty")
        if any(a < 0 for a in self.alphas_deg + self.delta_alphas_deg) or self.dim_alpha_deg < 0:
            raise ValueError("noise levels must be nonnegative")
        if not 2 <= self.delta <= (self.d + 1) // 2:
            raise ValueError(f"delta={self.delta} invalid for d={self.d}")
        if not 0 <= self.magnitude_noise_eps < 1:
            raise ValueError("magnitude noise must lie in [0, 1)")

    def validate_dims(self) -> None:
        if any(n < 2 * self.delta - 1 for n in self.dims):
            raise ValueError(f"dims {self.dims} too small for delta={self.delta}")

    def validate_deltas(self) -> None:
        if any(not 2 <= dl <= (self.d + 1) // 2 for dl in self.deltas):
            raise ValueError(f"deltas {self.deltas} invalid for d={self.d}")


def _bits(value: float) -> int:
    return struct.unpack("<Q", struct.pack("<d", float(value)))[0]


def instance_seeds(master: int, values: Sequence[float], trial: int) -> tuple[int, int]:
    """Independent (signal, noise) seeds for one trial at one sweep point."""
    entropy = [int(master) & (2**64 - 1), *(_bits(v) for v in values), int(trial)]
    signal, noise = np.random.SeedSequence(entropy).spawn(2)
    return int(signal.generate_state(1, np.uint64)[0]), int(noise.generate_state(1, np.uint64)[0])


@dataclass
class InstanceResult:
    report: BoundReport
    results: dict
    runtimes: dict[str, float] = field(default_factory=dict)
    graph: WeightedGraph | None = None
    measurements: MeasurementSet | None = None


def _timed(fn: Callable, reps: int):
    times = []
    out = None
    for _ in range(reps):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return out, statistics.median(times)


def run_instance(
    d: int,
    delta: int,
    scheme,
    alpha_deg: float,
    seeds: tuple[int, int],
    methods: Iterable[str] = METHODS,
    *,
    magnitude_eps: float = 0.0,
    timing_reps: int = 0,
    keep_data: bool = False,
) -> InstanceResult:
    """Generate one instance, run the estimators and evaluate every bound.

    ER always runs: it supplies ``c_z`` and the LSP starting point. When the
    SDP runs too, GPM is restarted from its rounding and the better of the
    two torus points is kept. With
    ``timing_reps > 0`` each enabled method is timed as the median of that
    many repetitions. ``keep_data`` attaches the weighted graph and the
    measurements to the result.
    """
    scheme = WeightScheme.parse(scheme)
    methods = tuple(methods)
    signal_seed, noise_seed = seeds
    gt = random_signal(d, signal_seed)
    ms = apply_angular_noise(gt, banded_graph(d, delta), alpha_deg, noise_seed, magnitude_eps=magnitude_eps)
    g = build_weights(ms, scheme)
    lap = laplacians(g)
    reps = max(1, timing_reps)
    runtimes: dict[str, float] = {}

    er, runtimes["er"] = _timed(lambda: solve_er(g, ms.Xhat), reps)
    results: dict[str, SolverResult | SdpResult] = {"er": er}
    if scheme is WeightScheme.UNIT:
        results["er_normalized"] = solve_er_normalized(g, ms.Xhat)
    sdp = None
    if "sdp" in methods:
        sdp, runtimes["sdp"] = _timed(lambda: solve_sdp(g, ms.Xhat, certify=timing_reps == 0), reps)
        results["sdp"] = sdp
    if "lsp" in methods:
        lsp, runtimes["lsp"] = _timed(lambda: solve_lsp(g, ms.Xhat, er.x_round), reps)
        if sdp is not None:
            # GPM only finds local minima; a tight SDP often rounds to a
            # better torus point
            alt = solve_lsp(g, ms.Xhat, sdp.x_round)
            if alt.objective < lsp.objective - 1e-12 * (1.0 + abs(lsp.objective)):
                lsp = alt
        results["lsp"] = lsp
    if not timing_reps:
        runtimes = {}
    report = eval_bounds(g, scheme, ms, results, lap=lap)
    out = InstanceResult(report, results, {m: runtimes[m] for m in methods if m in runtimes})
    if keep_data:
        out.graph, out.measurements = g, ms
    return out


@dataclass
class SweepRow:
    """Means over ``trials`` instances at one sweep point."""

    keys: dict[str, float]
    errors: dict[str, float]
    bounds: dict[str, float | None]
    rank: float | None
    sup_norm: float
    runtimes: dict[str, tuple[float, float, float]] = field(default_factory=dict)
    instances: list[InstanceResult] = field(default_factory=list, repr=False)

    def columns(self) -> dict[str, object]:
        out: dict[str, object] = dict(self.keys)
        out.update({f"err_{m}": v for m, v in self.errors.items()})
        out.update(self.bounds)
        out["sdp_rank"] = self.rank
        out["sup_norm_z"] = self.sup_norm
        for m, (mean, median, std) in self.runtimes.items():
            out[f"time_{m}_mean"] = mean
            out[f"time_{m}_median"] = median
            out[f"time_{m}_std"] = std
        return out


def _mean(values):
    values = [v for v in values if v is not None]
    return float(np.mean(values)) if values else None


def _aggregate(keys, instances: list[InstanceResult], methods, scheme) -> SweepRow:
    reps = [inst.report for inst in instances]
    errors = {m: _mean(getattr(r, f"dist_{m}") for r in reps) for m in methods}
    bounds = {
        name: _mean(getattr(r, name) for r in reps)
        for name, ok in BOUND_APPLICABILITY.items()
        if scheme in ok
    }
    rank = _mean(r.sdp_rank for r in reps) if "sdp" in methods else None
    sup = _mean(r.sup_norm_z for r in reps)
    runtimes = {}
    for m in methods:
        times = [inst.runtimes[m] for inst in instances if m in inst.runtimes]
        if times:
            runtimes[m] = (float(np.mean(times)), float(np.median(times)), float(np.std(times)))
    return SweepRow(dict(keys), errors, bounds, rank, sup, runtimes, instances)


def _sweep_point(cfg: ExperimentConfig, keys: dict, d, delta, alpha, seed_values, timing_reps=0) -> SweepRow:
    instances = []
    for trial in range(cfg.trials):
        seeds = instance_seeds(cfg.seed, seed_values, trial)
        instances.append(
            run_instance(
                d,
                delta,
                cfg.scheme,
                alpha,
                seeds,
                cfg.methods,
                magnitude_eps=cfg.magnitude_noise_eps,
                timing_reps=timing_reps,
            )
        )
    return _aggregate(keys, instances, cfg.methods, cfg.scheme)


def run_noise_sweep(cfg: ExperimentConfig) -> list[SweepRow]:
    rows = []
    for alpha in cfg.alphas_deg:
        log.info("noise sweep: alpha=%g deg", alpha)
        rows.append(_sweep_point(cfg, {"alpha_deg": alpha}, cfg.d, cfg.delta, alpha, (alpha,)))
    return rows


def run_dim_sweep(cfg: ExperimentConfig) -> list[SweepRow]:
    cfg.validate_dims()
    rows = []
    for d in sorted(cfg.dims):
        log.info("dimension sweep: d=%d", d)
        rows.append(
            _sweep_point(
                cfg, {"d": d}, d, cfg.delta, cfg.dim_alpha_deg, (d, cfg.dim_alpha_deg), cfg.runtime_reps
            )
        )
    return rows


def run_delta_sweep(cfg: ExperimentConfig) -> list[SweepRow]:
    cfg.validate_deltas()
    rows = []
    for delta in cfg.deltas:
        for alpha in cfg.delta_alphas_deg:
            log.info("delta sweep: delta=%d alpha=%g deg", delta, alpha)
            rows.append(
                _sweep_point(cfg, {"delta": delta, "alpha_deg": alpha}, cfg.d, delta, alpha, (delta, alpha))
            )
    return rows


def _format(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        if math.isnan(value):
            return ""
        return format(value, ".17g")
    return str(value)


def emit_csv(rows: Sequence[SweepRow], path) -> Path:
    """Write rows as UTF-8 CSV with LF line endings and 17 significant digits."""
    if not rows:
        raise ValueError("no rows to write")
    header = list(rows[0].columns())
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            cols = row.columns()
            if list(cols) != header:
                raise ValueError("rows have inconsistent columns")
            writer.writerow([_format(cols[h]) for h in header])
    return path


def read_csv(path) -> list[dict[str, float | None]]:
    """Parse a file written by :func:`emit_csv`; blanks become ``None``."""
    with Path(path).open(encoding="utf-8", newline="") as fh:
        return [
            {k: (float(v) if v != "" else None) for k, v in rec.items()}
            for rec in csv.DictReader(fh)
        ]
