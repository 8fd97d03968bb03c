import logging
from pathlib import Path

import click

from app.commands.common import CliContext, model_option, output_path, parse_families, parse_grid
from app.core.errors import ConfigError
from app.models.bounds import BoundFamily
from app.models.tilted import FSobolevFunction
from app.services.bounds_service import BoundsService
from app.services.model_service import ModelService
from app.services.results_service import ResultsService
from app.services.spectral_service import SpectralService
from app.services.tilted_service import TiltedService

logger = logging.getLogger(__name__)

BOUND_COLUMNS = ["u", "family", "rate", "prefactor", "bound", "branch", "notes"]
RATE_COLUMNS = ["u", "lambda0_star", "argmax_r", "finite_flag"]
DEFAULT_FAMILIES = "general,perturbation,poincare,bernstein_general"


@click.command()
@model_option
@click.option("--t", "horizon", type=float, required=True, help="Horizonte t.")
@click.option("--u-grid", "u_grid", required=True, help="Grilla lo:hi:n de umbrales.")
@click.option("--families", default=DEFAULT_FAMILIES, show_default=True, help="all o lista separada por comas.")
@click.option("--tail", type=click.Choice(["upper", "lower", "two-sided"]), default="upper", show_default=True)
@click.option("--fsobolev-constant", type=click.FloatRange(min=0, min_open=True), default=None,
              help="C de la desigualdad log-Sobolev F = C·log.")
@click.option("--assume-fsobolev", is_flag=True, help="Usar F sin verificarla.")
@click.option("--poincare-constant", type=click.FloatRange(min=0, min_open=True), default=None)
@click.option("--out", "out_file", type=click.Path(dir_okay=False, path_type=Path), default=None)
@click.pass_obj
def bounds(obj: CliContext, model_path, horizon, u_grid, families, tail, fsobolev_constant,
           assume_fsobolev, poincare_constant, out_file):
    """
    Evalúa las familias de cotas sobre una grilla de u y escribe el CSV.
    """
    model = ModelService.load_model(model_path)
    grid = parse_grid(u_grid)
    selected = parse_families(families)
    options = {"poincare_constant": poincare_constant}
    if BoundFamily.fsobolev in selected:
        if fsobolev_constant is None:
            raise ConfigError("La familia fsobolev requiere --fsobolev-constant")
        options["fs"] = FSobolevFunction.log_sobolev(fsobolev_constant)
        options["assume"] = assume_fsobolev

    sd = SpectralService.spectral_decomposition(model.q, model.pi)
    evaluate = {
        "upper": BoundsService.bound,
        "lower": BoundsService.lower_tail,
        "two-sided": BoundsService.two_sided,
    }[tail]

    rows = []
    for family in selected:
        for u in grid:
            point = evaluate(model, horizon, u, family, sd, **options)
            rows.append({
                "u": point.u, "family": point.family.value, "rate": point.rate,
                "prefactor": point.prefactor, "bound": point.bound,
                "branch": point.branch, "notes": ";".join(point.notes),
            })
        logger.info(f"Familia {family.value}: {len(grid)} puntos")
    path = ResultsService.write_table(output_path(obj, out_file, "bounds.csv"), BOUND_COLUMNS, rows, obj.timestamp)
    click.echo(str(path))


@click.command()
@model_option
@click.option("--u-grid", "u_grid", required=True, help="Grilla lo:hi:n de umbrales.")
@click.option("--out", "out_file", type=click.Path(dir_okay=False, path_type=Path), default=None)
@click.pass_obj
def rate(obj: CliContext, model_path, u_grid, out_file):
    """
    λ₀*(u) sobre una grilla de u.
    """
    model = ModelService.load_model(model_path)
    sd = SpectralService.spectral_decomposition(model.q, model.pi)
    results = TiltedService.lambda0_star_curve(sd, model.f, model.pi, parse_grid(u_grid))
    rows = [
        {"u": c.u, "lambda0_star": c.value, "argmax_r": c.argmax_r, "finite_flag": c.finite}
        for c in results
    ]
    path = ResultsService.write_table(output_path(obj, out_file, "rate.csv"), RATE_COLUMNS, rows, obj.timestamp)
    click.echo(str(path))
