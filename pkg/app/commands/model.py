import logging

import click

from app.commands.common import model_option
from app.schemas.report_schema import SpectrumReport, ValidationReport
from app.services.markov_service import MarkovService
from app.services.model_service import ModelService
from app.services.spectral_service import SpectralService

logger = logging.getLogger(__name__)


@click.command()
@model_option
def validate(model_path):
    """
    Valida un archivo de modelo e imprime π, f centrado y ν.
    """
    model = ModelService.load_model(model_path)
    report = ValidationReport(
        states=model.labels,
        n=model.n,
        irreducible=True,
        reversible=MarkovService.check_detailed_balance(model.q, model.pi),
        pi=model.pi.weights.tolist(),
        f_centered=model.f.values.tolist(),
        nu=model.nu.weights.tolist(),
    )
    click.echo(report.model_dump_json(indent=2))


@click.command()
@model_option
def spectrum(model_path):
    """
    Autovalores del generador simetrizado, brecha espectral, σ̂² y Var_π(f) en JSON.
    """
    model = ModelService.load_model(model_path)
    sd = SpectralService.spectral_decomposition(model.q, model.pi)
    report = SpectrumReport(
        states=model.labels,
        eigenvalues=sd.eigenvalues.tolist(),
        gap=sd.gap,
        sigma_hat_sq=SpectralService.sigma_hat_sq(sd, model.f, model.pi),
        var_pi=SpectralService.variance_pi(model.f, model.pi),
        pi=model.pi.weights.tolist(),
        reversible=MarkovService.check_detailed_balance(model.q, model.pi),
    )
    click.echo(report.model_dump_json(indent=2))
