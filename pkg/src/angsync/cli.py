"""Command line front end for the experiment sweeps and single instances."""
from __future__ import annotations

import csv
import logging
import sys
from pathlib import Path

import click

from .graph import GraphError
from .harness import (
    DEFAULT_ALPHAS,
    ExperimentConfig,
    emit_csv,
    instance_seeds,
    run_delta_sweep,
    run_dim_sweep,
    run_instance,
    run_noise_sweep,
)
from .linalg import ConvergenceError
from .synth import WeightScheme

_SCHEMES = [s.value for s in WeightScheme]


def _floats(text: str | None):
    if text is None:
        return None
    try:
        return tuple(float(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise click.BadParameter(f"expected comma separated numbers, got {text!r}")


def _ints(text: str | None):
    if text is None:
        return None
    try:
        return tuple(int(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise click.BadParameter(f"expected comma separated integers, got {text!r}")


def _config(**kw) -> ExperimentConfig:
    given = {k: v for k, v in kw.items() if v is not None}
    try:
        return ExperimentConfig(**given)
    except ValueError as exc:
        raise click.UsageError(str(exc))


def _common(fn):
    options = [
        click.option("--d", "d", type=int, default=64, show_default=True, help="Signal dimension."),
        click.option("--delta", type=int, default=16, show_default=True, help="Band width of E_delta."),
        click.option("--methods", default="er,lsp,sdp", show_default=True, help="Subset of er,lsp,sdp."),
        click.option("--trials", type=int, default=30, show_default=True),
        click.option("--seed", type=int, default=0, show_default=True, help="Master seed."),
        click.option("--mag-eps", type=float, default=0.0, show_default=True,
                     help="Relative magnitude noise on |Y| entries."),
        click.option("--out", type=click.Path(dir_okay=False, path_type=Path), default=None,
                     help="CSV path; stdout when omitted."),
    ]
    for opt in reversed(options):
        fn = opt(fn)
    return fn


def _scheme_option(default: str):
    return click.option(
        "--scheme", type=click.Choice(_SCHEMES + ["squared_amplitude"], case_sensitive=False),
        default=default, show_default=True, help="Edge weight scheme.",
    )


def _write(rows, out: Path | None) -> None:
    if out is not None:
        emit_csv(rows, out)
        click.echo(f"wrote {len(rows)} rows to {out}", err=True)
        return
    header = list(rows[0].columns())
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        cols = row.columns()
        writer.writerow(["" if cols[h] is None else format(cols[h], ".17g") for h in header])


def _guarded(fn, *args):
    try:
        return fn(*args)
    except (GraphError, ConvergenceError, ValueError) as exc:
        raise click.ClickException(f"{type(exc).__name__}: {exc}")


@click.group()
@click.option("-v", "--verbose", is_flag=True, help="Log sweep progress to stderr.")
def main(verbose: bool) -> None:
    """Weighted angular synchronization experiments."""
    logging.basicConfig(level=logging.INFO if verbose else logging.WARNING, format="%(message)s")


@main.command("noise-sweep")
@_common
@_scheme_option("unit")
@click.option("--alphas", default=None, help="Noise levels in degrees (default: 25 log-spaced in [0.01, 180]).")
def noise_sweep(d, delta, methods, trials, seed, mag_eps, out, scheme, alphas):
    """Mean errors and bounds against the angular noise level."""
    cfg = _config(d=d, delta=delta, scheme=scheme, methods=methods.split(","), trials=trials,
                  seed=seed, magnitude_noise_eps=mag_eps, alphas_deg=_floats(alphas) or DEFAULT_ALPHAS)
    _write(_guarded(run_noise_sweep, cfg), out)


@main.command("dim-sweep")
@_common
@_scheme_option("unit")
@click.option("--dims", default="64,128,256,512", show_default=True)
@click.option("--alpha", type=float, default=2.0, show_default=True, help="Noise level in degrees.")
@click.option("--reps", type=int, default=3, show_default=True, help="Timing repetitions per instance.")
def dim_sweep(d, delta, methods, trials, seed, mag_eps, out, scheme, dims, alpha, reps):
    """Mean errors and runtimes against the dimension."""
    dims = _ints(dims)
    cfg = _config(d=min(dims), delta=delta, scheme=scheme, methods=methods.split(","), trials=trials,
                  seed=seed, magnitude_noise_eps=mag_eps, dims=dims, dim_alpha_deg=alpha,
                  runtime_reps=reps)
    _write(_guarded(run_dim_sweep, cfg), out)


@main.command("delta-sweep")
@_common
@_scheme_option("amplitude")
@click.option("--deltas", default="2,4,8,16,24,32", show_default=True)
@click.option("--alphas", default="0.01,2,40,90", show_default=True)
def delta_sweep(d, delta, methods, trials, seed, mag_eps, out, scheme, deltas, alphas):
    """Mean errors and bounds against the band width."""
    deltas = _ints(deltas)
    cfg = _config(d=d, delta=min(deltas), scheme=scheme, methods=methods.split(","), trials=trials,
                  seed=seed, magnitude_noise_eps=mag_eps, deltas=deltas,
                  delta_alphas_deg=_floats(alphas))
    _write(_guarded(run_delta_sweep, cfg), out)


@main.command("solve")
@click.option("--d", "d", type=int, default=64, show_default=True)
@click.option("--delta", type=int, default=16, show_default=True)
@_scheme_option("unit")
@click.option("--methods", default="er,lsp,sdp", show_default=True)
@click.option("--alpha", type=float, default=2.0, show_default=True, help="Noise level in degrees.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--mag-eps", type=float, default=0.0, show_default=True)
@click.option("--csv", "as_csv", is_flag=True, help="Print a two-column CSV instead of a table.")
def solve(d, delta, scheme, methods, alpha, seed, mag_eps, as_csv):
    """Run one instance and print its bound report."""
    cfg = _config(d=d, delta=delta, scheme=scheme, methods=methods.split(","), trials=1, seed=seed,
                  magnitude_noise_eps=mag_eps, alphas_deg=(alpha,), dims=(d,), deltas=(delta,))
    seeds = instance_seeds(cfg.seed, (alpha,), 0)
    inst = _guarded(
        lambda: run_instance(d, delta, cfg.scheme, alpha, seeds, cfg.methods, magnitude_eps=mag_eps)
    )
    flat = inst.report.as_dict()
    noise = flat.pop("noise")
    flat.update({f"noise_{k}": v for k, v in noise.items()})
    if as_csv:
        writer = csv.writer(sys.stdout, lineterminator="\n")
        writer.writerow(["field", "value"])
        for k, v in flat.items():
            writer.writerow([k, "" if v is None else (format(v, ".17g") if isinstance(v, float) else v)])
        return
    width = max(len(k) for k in flat)
    for k, v in flat.items():
        shown = "n/a" if v is None else (f"{v:.6g}" if isinstance(v, float) else str(v))
        click.echo(f"{k:<{width}}  {shown}")


if __name__ == "__main__":
    main()
