import logging
from pathlib import Path

import click

from app.commands.common import CliContext, model_option, output_path
from app.core.config import settings
from app.core.errors import ZeroHorizonError
from app.services.model_service import ModelService
from app.services.results_service import ResultsService
from app.services.simulation_service import SimulationService

logger = logging.getLogger(__name__)

COLUMNS = ["u", "t", "n", "hits", "p_hat", "ci_lo", "ci_hi"]


@click.command()
@model_option
@click.option("--t", "horizon", type=float, required=True, help="Horizonte t.")
@click.option("--u", "thresholds", type=float, multiple=True, required=True, help="Umbral u (repetible).")
@click.option("--samples", type=click.IntRange(min=1), default=10000, show_default=True)
@click.option("--seed", type=int, default=None, help="Semilla; por defecto la global o la del modelo.")
@click.option("--out", "out_file", type=click.Path(dir_okay=False, path_type=Path), default=None)
@click.pass_obj
def simulate(obj: CliContext, model_path, horizon, thresholds, samples, seed, out_file):
    """
    Estima P_ν(A_t/t ≥ u) por simulación y escribe el CSV.
    """
    model = ModelService.load_model(model_path)
    if horizon <= 0:
        raise ZeroHorizonError()
    seed = next(s for s in (seed, obj.seed, model.seed, settings.MJP_SEED) if s is not None)
    integrals = SimulationService.sample_time_integrals(model, horizon, samples, seed, obj.resolved_threads())
    rows = []
    for u in thresholds:
        tail = SimulationService.tail_from_integrals(integrals, horizon, u, model.f.sup_norm)
        rows.append(
            {"u": u, "t": horizon, "n": tail.n_samples, "hits": tail.hits,
             "p_hat": tail.p_hat, "ci_lo": tail.ci_lo, "ci_hi": tail.ci_hi}
        )
        logger.info(f"u={u}: p̂={tail.p_hat} ({tail.interval})")
    path = ResultsService.write_table(output_path(obj, out_file, "simulate.csv"), COLUMNS, rows, obj.timestamp)
    click.echo(str(path))
