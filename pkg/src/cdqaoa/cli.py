"""Command line interface.

Exit codes: 0 success, 1 usage error, 2 validation failure (failed checks or
malformed input data), 3 optimization budget exhausted under --strict.
"""

from __future__ import annotations

import json
import math
import sys
from pathlib import Path

import click

from .analytics import threshold_crossing
from .harness import (
    ExperimentConfig,
    SpecFamily,
    emit_landscape,
    ensemble_stats,
    make_instance,
    read_records,
    reindex_by_parameters,
    run_experiment,
    validate as run_validation,
    write_stats,
)
from .model import Variant, spec_to_json
from .optimize import OptimizerConfig, Strategy

_FAMILIES = [f.value for f in SpecFamily]
_VARIANTS = [v.value for v in Variant]
_STRATEGIES = [s.value for s in Strategy]


class BudgetExhausted(Exception):
    """A run ended on its evaluation cap under --strict."""


class ValidationFailure(Exception):
    """Cross-validation checks did not pass."""


def _build_config(
    n, family, variant, p_max, instances, seed, threshold, starts, strategy, out, config
) -> ExperimentConfig:
    if config is not None:
        return ExperimentConfig.from_json(Path(config).read_text())
    variants = tuple(Variant(v) for v in variant) or (
        Variant.QAOA,
        Variant.QAOA_CD,
        Variant.QAOA_2CD,
    )
    strategies = None
    if strategy is not None:
        strategies = {v: Strategy(strategy) for v in variants}
    return ExperimentConfig(
        family=SpecFamily(family),
        n_sites=n,
        p_max=p_max,
        variants=variants,
        m_instances=instances,
        base_seed=seed,
        strategies=strategies,
        n_starts=starts,
        threshold=threshold,
        optimizer=OptimizerConfig(),
        output_dir=out,
    )


def _print_summary(config: ExperimentConfig, records) -> None:
    stats = ensemble_stats(records)
    for variant in config.variants:
        rows = [s for s in stats if s.variant == variant.value]
        means = [s.mean_residual for s in rows]
        cross = threshold_crossing(means, config.threshold)
        click.echo(
            f"{variant.value}: depths 1..{rows[-1].p}, "
            f"final mean residual {means[-1]:.3e}, "
            f"crossing at p={cross if cross is not None else '-'}"
        )


def _check_strict(records) -> None:
    exhausted = [r for r in records if r.status == "budget"]
    if exhausted:
        raise BudgetExhausted(
            f"{len(exhausted)} records hit the evaluation cap before converging"
        )


@click.group()
def cli() -> None:
    """Simulate and optimize counterdiabatic QAOA circuits on Ising chains."""


@cli.command("instance")
@click.option("--n", type=int, required=True, help="Number of sites.")
@click.option("--family", type=click.Choice(_FAMILIES), default="open-random")
@click.option("--seed", type=int, default=0)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
def instance_cmd(n, family, seed, out) -> None:
    """Write one problem instance as JSON ({n, boundary, couplings, seed})."""
    spec = make_instance(SpecFamily(family), n, seed)
    text = spec_to_json(spec)
    if out is None:
        click.echo(text)
    else:
        Path(out).write_text(text)
        click.echo(f"wrote {out}")


_run_options = [
    click.option("--n", type=int, default=10, help="Number of sites."),
    click.option("--family", type=click.Choice(_FAMILIES), default="open-random"),
    click.option("--variant", multiple=True, type=click.Choice(_VARIANTS)),
    click.option("--p-max", type=int, default=10),
    click.option("--seed", type=int, default=0),
    click.option("--threshold", type=float, default=1e-2),
    click.option("--starts", type=int, default=20),
    click.option("--strategy", type=click.Choice(_STRATEGIES), default=None),
    click.option("--out", type=click.Path(file_okay=False), default="runs"),
    click.option(
        "--config",
        type=click.Path(exists=True, dir_okay=False),
        default=None,
        help="JSON experiment config; overrides the other flags.",
    ),
    click.option("--strict", is_flag=True, help="Exit 3 if any run hit its cap."),
]


def _with_run_options(fn):
    for opt in reversed(_run_options):
        fn = opt(fn)
    return fn


@cli.command("sweep")
@_with_run_options
def sweep_cmd(n, family, variant, p_max, seed, threshold, starts, strategy, out, config, strict) -> None:
    """Depth sweep on a single instance."""
    cfg = _build_config(
        n, family, variant, p_max, 1, seed, threshold, starts, strategy, out, config
    )
    records = run_experiment(cfg)
    _print_summary(cfg, records)
    click.echo(f"wrote {Path(cfg.output_dir) / 'records.csv'}")
    if strict:
        _check_strict(records)


@cli.command("ensemble")
@_with_run_options
@click.option("--instances", type=int, default=None, help="Ensemble size.")
def ensemble_cmd(n, family, variant, p_max, seed, threshold, starts, strategy, out, config, strict, instances) -> None:
    """Depth sweep over an instance ensemble with summary statistics."""
    cfg = _build_config(
        n, family, variant, p_max, instances, seed, threshold, starts, strategy, out, config
    )
    records = run_experiment(cfg)
    out_dir = Path(cfg.output_dir)
    write_stats(ensemble_stats(records), out_dir / "stats.csv", by="p")
    write_stats(reindex_by_parameters(records), out_dir / "by_parameters.csv", by="n_p")
    _print_summary(cfg, records)
    click.echo(f"wrote {out_dir / 'records.csv'}")
    if strict:
        _check_strict(records)


@cli.command("landscape")
@click.option("--n", type=int, default=10)
@click.option("--family", type=click.Choice(_FAMILIES), default="ring-uniform")
@click.option("--variant", multiple=True, type=click.Choice(_VARIANTS))
@click.option("--seed", type=int, default=0)
@click.option("--grid-points", type=int, default=41)
@click.option("--out", type=click.Path(dir_okay=False), default="landscape.csv")
def landscape_cmd(n, family, variant, seed, grid_points, out) -> None:
    """Depth-1 (beta, gamma) cost grid CSV."""
    spec = make_instance(SpecFamily(family), n, seed)
    variants = tuple(Variant(v) for v in variant) or (
        Variant.QAOA_CD_2P,
        Variant.QAOA_CD,
    )
    grid = (
        (-math.pi / 2, math.pi / 2),
        (-math.pi / 2, math.pi / 2),
        grid_points,
        grid_points,
    )
    path = emit_landscape(spec, variants, grid, out, OptimizerConfig(seed=seed))
    click.echo(f"wrote {path}")


@cli.command("validate")
@click.option("--n", "sizes", multiple=True, type=int, default=(4, 6, 8))
@click.option("--trials", type=int, default=30)
@click.option("--seed", type=int, default=0)
def validate_cmd(sizes, trials, seed) -> None:
    """Cross-check the fermionic engine against the dense oracle."""
    report = run_validation(tuple(sizes), trials, seed)
    for c in report.checks:
        mark = "ok" if c.passed else "FAIL"
        click.echo(f"[{mark}] {c.name} n={c.n_sites} dev={c.max_abs_dev:.3e} tol={c.tolerance:.0e}")
    if not report.ok:
        raise ValidationFailure("validation checks failed")
    click.echo(f"all {len(report.checks)} checks passed")


@cli.command("report")
@click.option("--out", type=click.Path(file_okay=False), required=True,
              help="Run directory containing records.csv.")
def report_cmd(out) -> None:
    """Summarize a finished run directory into stats CSVs."""
    out_dir = Path(out)
    records_path = out_dir / "records.csv"
    if not records_path.exists():
        raise ValidationFailure(f"no records.csv under {out_dir}")
    try:
        records = read_records(records_path)
    except (ValueError, KeyError, json.JSONDecodeError) as exc:
        raise ValidationFailure(f"malformed records: {exc}") from exc
    write_stats(ensemble_stats(records), out_dir / "stats.csv", by="p")
    write_stats(reindex_by_parameters(records), out_dir / "by_parameters.csv", by="n_p")
    for s in ensemble_stats(records):
        click.echo(
            f"{s.variant} p={s.p} n_p={s.n_p} count={s.count} "
            f"mean={s.mean_residual:.6e} std={s.std_residual:.6e}"
        )
    click.echo(f"wrote {out_dir / 'stats.csv'} and {out_dir / 'by_parameters.csv'}")


def main(argv: list[str] | None = None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.UsageError as exc:
        exc.show(file=sys.stderr)
        return 1
    except click.ClickException as exc:
        exc.show(file=sys.stderr)
        return 1
    except click.Abort:
        click.echo("aborted", err=True)
        return 1
    except ValidationFailure as exc:
        click.echo(f"validation failure: {exc}", err=True)
        return 2
    except ValueError as exc:
        click.echo(f"invalid input: {exc}", err=True)
        return 2
    except BudgetExhausted as exc:
        click.echo(f"budget exhausted: {exc}", err=True)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
