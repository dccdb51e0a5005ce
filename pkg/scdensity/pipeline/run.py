import logging
import pathlib
import sys

import click

from scdensity.errors import SemiclassicalError
from scdensity.pipeline.config import build_run_config, flag_overrides
from scdensity.pipeline.evaluate import Evaluator
from scdensity.pipeline.pipeline import SemiclassicalPipeline
from scdensity.semiclassical.grids import Kind

DEFAULT_CONFIG = pathlib.Path("config") / "config.yaml"


def run_options(func):
    options = [
        click.option("--config", "config_path", type=click.Path(dir_okay=False),
                     help="YAML or flat key=value config; defaults to ./config/config.yaml if present."),
        click.option("--out", type=click.Path(dir_okay=False), help="CSV destination (stdout if omitted)."),
        click.option("--grid-points", type=int, help="Number of grid points."),
        click.option("--methods", help="Comma-separated subset of uniform,tf,exact,langer_sum."),
        click.option("--gamma", help="Comma-separated gamma values such as 1,1/2,1/4."),
        click.argument("overrides", nargs=-1),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def init_pipeline(config_path, overrides, **flags) -> SemiclassicalPipeline:
    if config_path is None and DEFAULT_CONFIG.is_file():
        config_path = DEFAULT_CONFIG
    cfg = build_run_config(config_path, overrides, flag_overrides(**flags))
    pipeline = SemiclassicalPipeline(cfg)
    pipeline.init_logging()
    return pipeline


def execute(command, config_path, overrides, **flags):
    try:
        pipeline = init_pipeline(config_path, overrides, **flags)
        command(pipeline)
    except SemiclassicalError as e:
        logging.getLogger(__name__).debug("Run failed", exc_info=True)
        click.echo(e.describe(), err=True)
        sys.exit(e.exit_code)


@click.group()
def main():
    """Uniform semiclassical densities of fermions in one dimension."""


@main.command()
@run_options
def density(config_path, overrides, **flags):
    """Particle density profiles n(x) of the configured methods."""
    def command(pipeline):
        frame, footer = pipeline.profile_table(Kind.DENSITY)
        pipeline.write_csv(frame, footer)
    execute(command, config_path, overrides, **flags)


@main.command()
@run_options
def ked(config_path, overrides, **flags):
    """Kinetic-energy density profiles t(x) of the configured methods."""
    def command(pipeline):
        frame, footer = pipeline.profile_table(Kind.KED)
        pipeline.write_csv(frame, footer)
    execute(command, config_path, overrides, **flags)


@main.command()
@run_options
def compare(config_path, overrides, **flags):
    """Per-region errors of each method against the exact oracle."""
    def command(pipeline):
        report = Evaluator(pipeline).compare()
        footer = {}
        for method, values in report.integrals.items():
            footer.update({f"{key} {method}": value for key, value in values.items()})
        pipeline.write_csv(report.errors, footer)
        click.echo(report.summary(), err=True)
    execute(command, config_path, overrides, **flags)


@main.command(name="gamma-scan")
@run_options
def gamma_scan(config_path, overrides, **flags):
    """Error metrics along hbar -> gamma hbar, N -> N / gamma."""
    def command(pipeline):
        pipeline.write_csv(Evaluator(pipeline).gamma_scan())
    execute(command, config_path, overrides, **flags)


@main.command()
@run_options
def spectrum(config_path, overrides, **flags):
    """WKB levels against the exact eigenvalues."""
    def command(pipeline):
        pipeline.write_csv(pipeline.spectrum())
    execute(command, config_path, overrides, **flags)


if __name__ == "__main__":
    main()
