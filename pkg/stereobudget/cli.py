import click
import logging
import math
from pathlib import Path

from stereobudget import __version__
from stereobudget.core import report
from stereobudget.core.error_model import coverage_half_angle
from stereobudget.core.errors import ConfigError, DomainError, OracleError, SweepError
from stereobudget.core.projection import LensProjection
from stereobudget.core.scenario import ScenarioConfig, bundled_scenario_text, load_config
from stereobudget.core.sweep import SweepResult, run_sweep

EXIT_CONFIG_ERROR = 2
EXIT_DOMAIN_ERROR = 3
EXIT_IO_ERROR = 4

MODEL_CHOICES = ["pinhole", "fisheye", "both"]


def _load_or_exit(ctx, config_path: str) -> ScenarioConfig:
    config_path = Path(config_path).resolve()

    if not config_path.exists():
        click.secho(f"❌ Config not found: {config_path}", fg="red", err=True)
        ctx.exit(EXIT_CONFIG_ERROR)

    try:
        return load_config(config_path)
    except ConfigError as e:
        click.secho(f"❌ Invalid config {config_path.name}:", fg="red", err=True)
        for error in e.errors:
            click.secho(f"   - {error}", fg="red", err=True)
        ctx.exit(EXIT_CONFIG_ERROR)
    except DomainError as e:
        click.secho(f"❌ Invalid config {config_path.name}: {e}", fg="red", err=True)
        ctx.exit(EXIT_CONFIG_ERROR)
    except OSError as e:
        click.secho(f"❌ Failed to read config: {e}", fg="red", err=True)
        ctx.exit(EXIT_IO_ERROR)


def _models(config: ScenarioConfig, model: str | None) -> list[LensProjection]:
    if model is None:
        return [config.rig.projection]
    if model == "both":
        # configured model first so its focal length is the one both curves share
        return [config.rig.projection, config.rig.projection.other]
    return [LensProjection(model)]


def _run_or_exit(ctx, config: ScenarioConfig, models, **kwargs) -> list[SweepResult]:
    try:
        return [run_sweep(config, projection=m, **kwargs) for m in models]
    except (SweepError, OracleError, DomainError) as e:
        click.secho(f"❌ {e}", fg="red", err=True)
        ctx.exit(EXIT_DOMAIN_ERROR)


def _print_summary(results: list[SweepResult], err: bool) -> None:
    click.secho("\n📊 Summary", fg="cyan", bold=True, err=err)
    for result in results:
        s = result.summary
        line = (
            f" - {result.model.value}: max range error {s.max_analytic_range_error_m * 100:.3f} cm "
            f"at {math.degrees(s.bearing_at_max_rad):.2f} deg"
        )
        if s.max_oracle_deviation is not None:
            line += f", max oracle deviation {s.max_oracle_deviation:.3e}"
        if s.failed_rows:
            line += f", {s.failed_rows} failed rows"
        click.secho(line, err=err)
        if result.monte_carlo is not None:
            mc = result.monte_carlo
            click.secho(
                f"   Monte Carlo: std {mc.std_range_m * 100:.4f} cm over {mc.sample_count} samples "
                f"(seed {mc.seed}, {mc.rejected_count} rejected)",
                err=err,
            )


@click.group()
@click.version_option(
    __version__,
    prog_name="stereobudget",
    message=f"%(prog)s %(version)s (csv schema {report.CSV_SCHEMA_VERSION})",
)
@click.option("--verbose", "-v", is_flag=True, help="Enable debug logging")
def cli(verbose):
    """stereobudget - depth and range error budgets for pinhole and fisheye stereo rigs"""
    if verbose:
        logging.basicConfig(level=logging.DEBUG, format="%(levelname)s %(name)s: %(message)s")


@cli.command()
@click.option("--output", "output_path", default="scenario.json", show_default=True)
@click.option("--force", is_flag=True, help="Overwrite an existing file")
@click.pass_context
def init(ctx, output_path, force):
    """Write the bundled 4K fisheye scenario to start from"""
    output_path = Path(output_path)
    if output_path.exists() and not force:
        click.secho(f"⚠️ {output_path} already exists (use --force to overwrite)", fg="yellow")
        ctx.exit(EXIT_IO_ERROR)
    try:
        output_path.write_text(bundled_scenario_text(), encoding="utf-8")
    except OSError as e:
        click.secho(f"❌ Failed to write {output_path}: {e}", fg="red")
        ctx.exit(EXIT_IO_ERROR)
    click.secho(f"✅ Wrote scenario to {output_path}", fg="green")


@cli.command()
@click.option("--config", "config_path", required=True)
@click.option("--csv", "csv_path", default=None, help="Write the sweep table here")
@click.option("--svg", "svg_path", default=None, help="Write the range error plot here")
@click.option("--model", type=click.Choice(MODEL_CHOICES), default=None,
              help="Projection(s) to evaluate; defaults to the config's")
@click.pass_context
def sweep(ctx, config_path, csv_path, svg_path, model):
    """
    Evaluate the error budget over the configured sweep
    """
    config = _load_or_exit(ctx, config_path)
    results = _run_or_exit(ctx, config, _models(config, model))

    # with no output files the CSV goes to stdout, so status lines move to stderr
    to_stdout = csv_path is None and svg_path is None
    try:
        if to_stdout:
            click.echo(report.csv_text(results), nl=False)
        if csv_path is not None:
            with open(csv_path, "w", encoding="utf-8", newline="") as f:
                report.emit_csv(results, f)
            click.secho(f"✅ Wrote {csv_path}", fg="green")
        if svg_path is not None:
            with open(svg_path, "wb") as f:
                report.emit_plot(results, f)
            click.secho(f"✅ Wrote {svg_path}", fg="green")
    except OSError as e:
        click.secho(f"❌ Failed to write output: {e}", fg="red", err=True)
        ctx.exit(EXIT_IO_ERROR)
    except DomainError as e:
        click.secho(f"❌ {e}", fg="red", err=True)
        ctx.exit(EXIT_DOMAIN_ERROR)

    _print_summary(results, err=to_stdout)


@cli.command()
@click.option("--config", "config_path", required=True)
@click.option("--mc", is_flag=True, help="Also run the Monte Carlo check at the grid midpoint")
@click.option("--model", type=click.Choice(MODEL_CHOICES), default=None)
@click.pass_context
def validate(ctx, config_path, mc, model):
    """
    Compare the closed-form range error with the exact-geometry oracle
    """
    config = _load_or_exit(ctx, config_path)
    if mc and config.validation.monte_carlo is None:
        click.secho("⚠️ No validation.monte_carlo block in config; skipping Monte Carlo", fg="yellow")
    results = _run_or_exit(ctx, config, _models(config, model), validate=True, monte_carlo=mc)

    for result in results:
        deviation = result.summary.max_oracle_deviation
        name = result.model.value
        if deviation is None:
            click.secho(f"⚠️ {name}: no oracle values", fg="yellow")
            continue
        worst = max(
            (r for r in result.rows if r.oracle_relative_deviation is not None),
            key=lambda r: r.oracle_relative_deviation,
        )
        click.secho(
            f"✅ {name}: max relative deviation {deviation:.6e} "
            f"at {result.variable}={worst.sweep_value:g}",
            fg="green",
        )
        if result.monte_carlo is not None:
            midpoint = result.rows[len(result.rows) // 2]
            line = f"   Monte Carlo std {result.monte_carlo.std_range_m:.6e} m"
            if midpoint.oracle_range_error_m is not None:
                line += f" vs oracle {midpoint.oracle_range_error_m:.6e} m at {result.variable}={midpoint.sweep_value:g}"
            click.secho(line)


@cli.command()
@click.option("--config", "config_path", required=True)
@click.option("--budget-cm", type=float, required=True, help="Range error budget in centimetres")
@click.pass_context
def coverage(ctx, config_path, budget_cm):
    """
    Half-angle within which the analytic range error stays inside a budget
    """
    config = _load_or_exit(ctx, config_path)
    rig = config.stereo_rig()
    query = config.query

    click.secho(f"📐 Depth {query.depth_m:g} m, disparity error {query.disparity_error_px:g} px, "
                f"budget {budget_cm:g} cm", fg="cyan", bold=True)
    for projection in (rig.projection, rig.projection.other):
        try:
            angle = coverage_half_angle(rig.with_projection(projection), query.depth_m,
                                        query.disparity_error_px, budget_cm / 100)
        except DomainError as e:
            click.secho(f"❌ {e}", fg="red", err=True)
            ctx.exit(EXIT_DOMAIN_ERROR)
        if angle is None:
            click.secho(f" - {projection.value}: budget exceeded even on axis", fg="yellow")
        else:
            click.secho(f" - {projection.value}: within ±{math.degrees(angle):.2f} deg")


if __name__ == "__main__":
    cli()
