"""Command-line front end.

    partnum exact 100
    partnum estimate rh1 100 --round
    partnum fit c1-grid --out fit.json
    partnum report rh1 --range 1:1000 --out rh1.csv
    partnum repro --emit-tables out/

Exit codes: 0 success, 1 reproduction failure, 2 usage error,
3 fit divergence.
"""

from __future__ import annotations

import json
import os
import sys

import click
from mpmath import mp

from . import repro as repro_mod
from .analysis import CSV_DIGITS, emit_csv, scan
from .coefficients import EstimatorKind, load_registry, paper_registry, save_registry
from .errors import DomainError, FitDivergedError, PartnumError, RangeError
from .estimators import estimate, round_half_up
from .exact import build_table, load_table_json, save_table_json
from .fitting import (
    DEFAULT_GRID,
    FitModel,
    GridConfig,
    fit_c2prime_piecewise,
    fit_c3_cubic,
    fit_c5,
    fit_odd_c2_cubics,
    fit_ratio_line,
    fit_t0_and_c4,
    fit_result_to_dict,
    grid_refine,
    iterate_c1_fit,
)
from .precision import DEFAULT_DPS, MIN_DPS
from .series import DIFF_GRID, SHIFT_GRID, build_c1_series, build_c2_series

CACHE_ENV = "PARTNUM_CACHE_DIR"

KIND_NAMES = [k.value for k in EstimatorKind]


def _parse_range(text: str) -> tuple[int, int, int]:
    parts = text.split(":")
    if len(parts) not in (2, 3):
        raise click.UsageError(f"range must be lo:hi or lo:hi:step, got {text!r}")
    try:
        lo, hi = int(parts[0]), int(parts[1])
        step = int(parts[2]) if len(parts) == 3 else 1
    except ValueError:
        raise click.UsageError(f"range parts must be integers: {text!r}") from None
    if step < 1:
        raise click.UsageError("range step must be >= 1")
    if hi < lo:
        raise click.UsageError("range must have hi >= lo")
    return lo, hi, step


def _apply_config(ctx: click.Context) -> None:
    """Fill parameters left at their defaults from the --config JSON file."""
    config_path = ctx.obj.get("config") if ctx.obj else None
    if not config_path:
        return
    with open(config_path, "r", encoding="utf-8") as fh:
        config = json.load(fh)
    section = config.get(ctx.command.name, {})
    flat = {**{k: v for k, v in config.items() if not isinstance(v, dict)}, **section}
    for param in ctx.command.params:
        key = param.name
        if key in flat and ctx.get_parameter_source(key) == click.core.ParameterSource.DEFAULT:
            ctx.params[key] = param.type_cast_value(ctx, flat[key])


def _cache_dir(explicit: str | None) -> str:
    if explicit:
        return explicit
    env = os.environ.get(CACHE_ENV)
    if env:
        return env
    return os.path.join(os.path.expanduser("~"), ".cache", "partnum")


def _load_table(max_n: int, cache_dir: str | None):
    directory = _cache_dir(cache_dir)
    path = os.path.join(directory, f"partition_table_{max_n}.json")
    if os.path.exists(path):
        try:
            return load_table_json(path)
        except (ValueError, KeyError):
            pass  # stale or foreign file: rebuild
    table = build_table(max_n)
    try:
        os.makedirs(directory, exist_ok=True)
        save_table_json(table, path)
    except OSError:
        pass  # cache is best effort
    return table


def _registry(coeffs_path: str | None):
    if coeffs_path:
        return load_registry(coeffs_path)
    return paper_registry()


precision_option = click.option(
    "--precision",
    type=click.IntRange(min=MIN_DPS),
    default=DEFAULT_DPS,
    show_default=True,
    help=f"Working precision in significant decimal digits (>= {MIN_DPS}).",
)
cache_option = click.option(
    "--cache-dir",
    type=click.Path(file_okay=False),
    default=None,
    help=f"Partition-table cache directory (default ${CACHE_ENV} or ~/.cache/partnum).",
)
coeffs_option = click.option(
    "--coeffs",
    "coeffs_path",
    type=click.Path(exists=True, dir_okay=False),
    default=None,
    help="Coefficient registry JSON (default: the published constants).",
)


@click.group()
@click.option("--config", type=click.Path(exists=True, dir_okay=False), default=None,
              help="JSON file with default values for command flags.")
@click.pass_context
def cli(ctx, config):
    """Exact partition numbers, their estimators, and the fits behind them."""
    ctx.ensure_object(dict)
    ctx.obj["config"] = config


@cli.command("exact")
@click.argument("n", type=int, required=False)
@click.option("--range", "range_spec", default=None, help="Range lo:hi[:step] instead of a single n.")
@click.option("--format", "fmt", type=click.Choice(["plain", "csv", "json"]), default="plain",
              show_default=True)
@cache_option
@click.pass_context
def cmd_exact(ctx, n, range_spec, fmt, cache_dir):
    """Print exact p(n) as decimal integers."""
    _apply_config(ctx)
    n, range_spec, fmt, cache_dir = (
        ctx.params["n"], ctx.params["range_spec"], ctx.params["fmt"], ctx.params["cache_dir"]
    )
    if (n is None) == (range_spec is None):
        raise click.UsageError("give exactly one of N or --range")
    lo, hi, step = (n, n, 1) if n is not None else _parse_range(range_spec)
    if lo < 0:
        raise click.UsageError("n must be >= 0")
    table = _load_table(hi, cache_dir)
    values = [(m, table.p(m)) for m in range(lo, hi + 1, step)]
    if fmt == "plain":
        for _, v in values:
            click.echo(v)
    elif fmt == "csv":
        click.echo("n,p")
        for m, v in values:
            click.echo(f"{m},{v}")
    else:
        click.echo(json.dumps({str(m): str(v) for m, v in values}, indent=2))


@cli.command("estimate")
@click.argument("kind", type=click.Choice(KIND_NAMES))
@click.argument("n", type=int, required=False)
@click.option("--range", "range_spec", default=None, help="Range lo:hi[:step] instead of a single n.")
@click.option("--round", "rounded", is_flag=True, help="Round to the nearest integer.")
@precision_option
@coeffs_option
@click.pass_context
def cmd_estimate(ctx, kind, n, range_spec, rounded, precision, coeffs_path):
    """Evaluate one estimator of p(n)."""
    _apply_config(ctx)
    rounded, precision, coeffs_path = (
        ctx.params["rounded"], ctx.params["precision"], ctx.params["coeffs_path"]
    )
    if (n is None) == (range_spec is None):
        raise click.UsageError("give exactly one of N or --range")
    lo, hi, step = (n, n, 1) if n is not None else _parse_range(range_spec)
    registry = _registry(coeffs_path)
    succeeded = 0
    for m in range(lo, hi + 1, step):
        try:
            value = estimate(kind, m, registry, dps=precision)
        except (DomainError, RangeError) as exc:
            click.echo(f"{m}: {type(exc).__name__}: {exc}")
            continue
        succeeded += 1
        if rounded:
            click.echo(f"{round_half_up(value)}" if lo == hi else f"{m}: {round_half_up(value)}")
        else:
            text = mp.nstr(value, CSV_DIGITS)
            click.echo(text if lo == hi else f"{m}: {text}")
    if succeeded == 0:
        sys.exit(1)


def _series_for(table, name, n_values, precision):
    if name in ("c1-iterate", "c1-grid"):
        return build_c1_series(table, n_values=n_values or SHIFT_GRID, dps=precision)
    return build_c2_series(table, n_values=n_values or SHIFT_GRID, dps=precision)


def _depth_needed(n_values) -> int:
    return max(n_values) if n_values else 8000


PIPELINES = (
    "c1-iterate",
    "c1-grid",
    "c2-grid",
    "ratio-line",
    "c3-cubic",
    "c4-t0",
    "c5",
    "c2prime",
    "odd-c2-cubics",
    "all",
)


@cli.command("fit")
@click.argument("pipeline", type=click.Choice(PIPELINES))
@click.option("--range", "range_spec", default=None,
              help="Dataset range lo:hi:step (pipeline-specific default).")
@click.option("--init-c2", default="2.5", show_default=True, help="Iteration start shift.")
@click.option("--init-e2", default="0.5", show_default=True, help="Iteration start exponent.")
@click.option("--max-iter", type=int, default=200, show_default=True)
@click.option("--fix-e2", is_flag=True, help="Hold the exponent fixed during iteration.")
@click.option("--double-a", is_flag=True, help="Re-derive the scale twice per pass (implies --fix-e2).")
@click.option("--grid", "grid_spec", default=None,
              help="Grid config lo:hi:step:digits for the scan pipelines.")
@click.option("--out", "out_path", type=click.Path(dir_okay=False), default=None,
              help="Write the fit result JSON here.")
@click.option("--registry-out", type=click.Path(dir_okay=False), default=None,
              help="With 'all': write a refit coefficient registry JSON.")
@precision_option
@cache_option
@click.pass_context
def cmd_fit(ctx, pipeline, range_spec, init_c2, init_e2, max_iter, fix_e2, double_a,
            grid_spec, out_path, registry_out, precision, cache_dir):
    """Run a coefficient-fitting pipeline and print its summary."""
    _apply_config(ctx)
    p = ctx.params
    (range_spec, init_c2, init_e2, max_iter, fix_e2, double_a, grid_spec, out_path,
     registry_out, precision, cache_dir) = (
        p["range_spec"], p["init_c2"], p["init_e2"], p["max_iter"], p["fix_e2"],
        p["double_a"], p["grid_spec"], p["out_path"], p["registry_out"],
        p["precision"], p["cache_dir"],
    )
    n_values = None
    if range_spec:
        lo, hi, step = _parse_range(range_spec)
        n_values = tuple(range(lo, hi + 1, step))
    grid = DEFAULT_GRID
    if grid_spec:
        parts = grid_spec.split(":")
        if len(parts) != 4:
            raise click.UsageError("grid must be lo:hi:step:digits")
        grid = GridConfig(parts[0], parts[1], parts[2], int(parts[3]))

    if pipeline == "all":
        _fit_all(registry_out, out_path, precision, cache_dir)
        return

    table = _load_table(_depth_needed(n_values) if pipeline not in ("c2prime", "odd-c2-cubics") else 100,
                        cache_dir)
    results: dict[str, object] = {}
    try:
        if pipeline == "c1-iterate":
            series = _series_for(table, pipeline, n_values, precision)
            results[pipeline] = iterate_c1_fit(
                series, init_c2=init_c2, init_e2=init_e2, max_iter=max_iter,
                fix_e2=fix_e2, double_a=double_a, dps=precision,
            )
        elif pipeline == "c1-grid":
            series = _series_for(table, pipeline, n_values, precision)
            results[pipeline] = grid_refine(series, FitModel.SHIFTED_POWER, grid, dps=precision)
        elif pipeline == "c2-grid":
            series = _series_for(table, pipeline, n_values, precision)
            results[pipeline] = grid_refine(series, FitModel.SHIFTED_SQRT, grid, dps=precision)
        elif pipeline == "ratio-line":
            results[pipeline] = fit_ratio_line(table, n_values=n_values or SHIFT_GRID, dps=precision)
        elif pipeline == "c3-cubic":
            results[pipeline] = fit_c3_cubic(table, n_values=n_values or DIFF_GRID, dps=precision)
        elif pipeline == "c4-t0":
            kwargs = {"t0_grid": grid} if grid_spec else {}
            results[pipeline] = fit_t0_and_c4(
                table, n_values=n_values or DIFF_GRID, dps=precision, **kwargs
            )
        elif pipeline == "c5":
            results[pipeline] = fit_c5(table, n_values=n_values or DIFF_GRID, dps=precision)
        elif pipeline == "c2prime":
            odd, even = fit_c2prime_piecewise(table, dps=precision)
            results["c2prime-odd"], results["c2prime-even"] = odd, even
        elif pipeline == "odd-c2-cubics":
            registry = paper_registry()
            part_a, part_b = fit_odd_c2_cubics(table, registry[EstimatorKind.RH1], dps=precision)
            results["odd-c2-cubic-a"], results["odd-c2-cubic-b"] = part_a, part_b
    except FitDivergedError as exc:
        click.echo(f"fit diverged: {exc}", err=True)
        sys.exit(3)

    doc = {name: fit_result_to_dict(fit) for name, fit in results.items()}
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=2)
            fh.write("\n")
    diverged = False
    for name, fit in results.items():
        coeff_text = " ".join(
            f"{k}={mp.nstr(v, 12)}" for k, v in sorted(fit.coefficients.items())
        )
        flag = " DIVERGED" if fit.diverged else ""
        click.echo(f"{name}: {coeff_text} avg_error={mp.nstr(fit.avg_error, 10)}{flag}")
        diverged = diverged or fit.diverged
    if diverged:
        for name, fit in results.items():
            if fit.diverged:
                click.echo(f"-- trace of {name} --", err=True)
                for idx, coeffs, err in fit.trace:
                    coeff_text = " ".join(f"{k}={mp.nstr(v, 10)}" for k, v in sorted(coeffs.items()))
                    click.echo(f"  iter {idx}: {coeff_text} avg_error={mp.nstr(err, 8)}", err=True)
        sys.exit(3)


def _fit_all(registry_out, out_path, precision, cache_dir):
    table = _load_table(repro_mod.TABLE_DEPTH, cache_dir)
    ctx = repro_mod.ReproContext(table=table, dps=precision)
    fits = {
        "c1-grid": ctx.fit_c1_grid,
        "c2-grid": ctx.fit_c2_grid,
        "ratio-line": ctx.fit_ratio,
        "c3-cubic": ctx.fit_c3_result,
        "c4-t0": ctx.fit_t0_c4,
        "c5": ctx.fit_c5_result,
        "c2prime-odd": ctx.fit_c2prime[0],
        "c2prime-even": ctx.fit_c2prime[1],
    }
    for name, fit in fits.items():
        coeff_text = " ".join(f"{k}={mp.nstr(v, 12)}" for k, v in sorted(fit.coefficients.items()))
        click.echo(f"{name}: {coeff_text} avg_error={mp.nstr(fit.avg_error, 10)}")
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            json.dump({name: fit_result_to_dict(fit) for name, fit in fits.items()}, fh, indent=2)
            fh.write("\n")
    if registry_out:
        save_registry(repro_mod.refit_registry(ctx), registry_out)
        click.echo(f"refit registry written to {registry_out}")


@cli.command("report")
@click.argument("kind", type=click.Choice(KIND_NAMES))
@click.option("--range", "range_spec", required=True, help="Scan range lo:hi[:step].")
@click.option("--round", "rounded", is_flag=True, help="Compare rounded estimates.")
@click.option("--out", "out_path", type=click.Path(dir_okay=False), default=None,
              help="CSV destination (default: stdout).")
@click.option("--json", "as_json", is_flag=True, help="Emit a JSON mirror instead of CSV.")
@precision_option
@cache_option
@coeffs_option
@click.pass_context
def cmd_report(ctx, kind, range_spec, rounded, out_path, as_json, precision, cache_dir, coeffs_path):
    """Relative-error report of one estimator against exact values."""
    _apply_config(ctx)
    p = ctx.params
    range_spec, rounded, out_path, as_json, precision, cache_dir, coeffs_path = (
        p["range_spec"], p["rounded"], p["out_path"], p["as_json"],
        p["precision"], p["cache_dir"], p["coeffs_path"],
    )
    lo, hi, step = _parse_range(range_spec)
    table = _load_table(hi, cache_dir)
    report = scan(table, kind, (lo, hi, step), _registry(coeffs_path), rounded=rounded, dps=precision)
    if as_json:
        rows = []
        for row in report.rows:
            if row.ok:
                rows.append({
                    "n": row.n,
                    "estimate": str(row.estimate) if isinstance(row.estimate, int)
                    else mp.nstr(row.estimate, CSV_DIGITS),
                    "exact": str(row.exact),
                    "rel_error": mp.nstr(row.rel_error, CSV_DIGITS),
                    "abs_rel_error": mp.nstr(row.abs_rel_error, CSV_DIGITS),
                })
            else:
                rows.append({"n": row.n, "error": row.error, "exact": str(row.exact)})
        text = json.dumps({"estimator": kind, "rounded": rounded, "rows": rows}, indent=2) + "\n"
        if out_path:
            with open(out_path, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            click.echo(text, nl=False)
    elif out_path:
        emit_csv(report, out_path)
    else:
        emit_csv(report, sys.stdout)


@cli.command("repro")
@click.option("--only", type=click.Choice(["thresholds", "fits"]), default=None,
              help="Run a subset of the checks.")
@click.option("--emit-tables", "tables_dir", type=click.Path(file_okay=False), default=None,
              help="Also write the error-table CSVs into this directory.")
@precision_option
@cache_option
@click.pass_context
def cmd_repro(ctx, only, tables_dir, precision, cache_dir):
    """Check every published claim against this implementation."""
    _apply_config(ctx)
    only, tables_dir, precision, cache_dir = (
        ctx.params["only"], ctx.params["tables_dir"], ctx.params["precision"], ctx.params["cache_dir"]
    )
    table = _load_table(repro_mod.TABLE_DEPTH, cache_dir)
    rctx = repro_mod.ReproContext(table=table, dps=precision)
    results = repro_mod.run_all(rctx, only=only)
    width = max(len(r.check_id) for r in results)
    failures = 0
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        click.echo(f"[{status}] {r.check_id:<{width}}  (criterion {r.criterion}) {r.description}")
        if not r.passed:
            click.echo(f"       {r.detail}")
            failures += 1
    click.echo(f"\n{len(results) - failures}/{len(results)} checks passed")
    if tables_dir:
        written = repro_mod.emit_tables(rctx, tables_dir)
        click.echo(f"wrote {len(written)} CSV files to {tables_dir}")
    if failures:
        sys.exit(1)


def main():
    try:
        cli(obj={})
    except PartnumError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)


if __name__ == "__main__":
    main()
