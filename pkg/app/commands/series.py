import click

from app.commands.common import model_option, parse_grid
from app.schemas.report_schema import SeriesErrorRow, SeriesReport
from app.services.bounds_service import BoundsService
from app.services.model_service import ModelService
from app.services.series_service import SeriesService
from app.services.spectral_service import SpectralService
from app.services.tilted_service import TiltedService


@click.command()
@model_option
@click.option("--order", type=click.IntRange(min=1), default=4, show_default=True)
@click.option("--r-grid", "r_grid", default=None, help="Grilla lo:hi:n de r; por defecto [0.01, 0.1]·λ₁/(2‖f‖∞).")
def series(model_path, order, r_grid):
    """
    Coeficientes de la serie de perturbación de λ₀(r) y error de las sumas parciales.
    """
    model = ModelService.load_model(model_path)
    sd = SpectralService.spectral_decomposition(model.q, model.pi)
    coefficients = SeriesService.lambda0_coefficients(sd, model.f, model.pi, order, labels=model.labels)
    params = BoundsService.bound_parameters(model, sd)

    if r_grid is None:
        scale = params.gap / (2.0 * params.f_sup) if params.f_sup > 0 else 1.0
        grid = [scale * k / 100.0 for k in range(1, 11)]
    else:
        grid = parse_grid(r_grid)

    rows = []
    for r in grid:
        partial = SeriesService.partial_sum(coefficients, r)
        exact = TiltedService.lambda0(sd, model.f, model.pi, r)
        rows.append(SeriesErrorRow(r=r, partial_sum=partial, lambda0=exact, error=abs(partial - exact)))

    report = SeriesReport(
        order=order,
        coefficients=coefficients.coeffs,
        coefficient_bounds=[SeriesService.coefficient_bound(n, params) for n in range(1, order + 1)],
        rows=rows,
    )
    click.echo(report.model_dump_json(indent=2))
