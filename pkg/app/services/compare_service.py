import logging
import math
from pathlib import Path
from typing import Any, Dict, List, Optional

from app.core.config import settings
from app.core.errors import ConfigError, DominationError
from app.models.bounds import BoundFamily
from app.models.tilted import FSobolevFunction
from app.schemas.config_schema import RunConfig
from app.schemas.report_schema import CompareSummary, SharpnessRow
from app.services.bounds_service import BoundsService
from app.services.markov_service import MarkovService
from app.services.model_service import ModelService
from app.services.results_service import ResultsService
from app.services.simulation_service import SimulationService
from app.services.spectral_service import SpectralService
from app.services.tilted_service import TiltedService

logger = logging.getLogger(__name__)

TABLE_NAME = "compare.csv"
SUMMARY_NAME = "compare_summary.json"
BASE_COLUMNS = ["u", "t", "n", "hits", "p_hat", "ci_lo", "ci_hi"]


def compare_columns(families: List[BoundFamily]) -> List[str]:
    return (
        BASE_COLUMNS
        + [f"bound_{fam.value}" for fam in families]
        + [f"dominated_{fam.value}" for fam in families]
        + ["lambda0_star", "sharpness_gap"]
    )


def _bound_options(config: RunConfig) -> Dict[str, Any]:
    options: Dict[str, Any] = {"poincare_constant": config.poincare_constant}
    if BoundFamily.fsobolev in config.families:
        if config.fsobolev_constant is None:
            raise ConfigError("La familia fsobolev requiere --fsobolev-constant")
        options["fs"] = FSobolevFunction.log_sobolev(config.fsobolev_constant)
        options["assume"] = config.assume_fsobolev
    return options


class CompareService:

    @staticmethod
    def run_compare(config: RunConfig, threads: Optional[int] = None) -> CompareSummary:
        """
        Una fila por celda (u, t): estimación Monte Carlo con su intervalo, cada cota pedida
        y si la domina. Cada celda se escribe apenas termina; con `resume` se saltan las
        celdas ya presentes en el CSV.

        Todas las celdas de un mismo t comparten las mismas trayectorias (misma semilla),
        así que el resultado no depende del orden ni de reanudar.
        """
        model = ModelService.load_model(config.model, tol=config.tolerances.get("row_sum"))
        seed = next(s for s in (config.seed, model.seed, settings.MJP_SEED) if s is not None)
        threads = threads or config.threads or settings.MJP_THREADS
        families = list(config.families)
        columns = compare_columns(families)
        options = _bound_options(config)

        sd = SpectralService.spectral_decomposition(model.q, model.pi)
        stars = {u: TiltedService.lambda0_star(sd, model.f, model.pi, u).value for u in config.u_grid}

        out_dir = Path(config.out)
        table = out_dir / TABLE_NAME
        done = set()
        if config.resume and table.exists():
            done = {(float(row["u"]), float(row["t"])) for row in ResultsService.read_table(table)}
            logger.info(f"Reanudando: {len(done)} celdas ya calculadas en {table}")
        else:
            ResultsService.start_table(table, columns, timestamp=config.timestamp)

        for t in config.t_values:
            pending = [u for u in config.u_grid if (u, t) not in done]
            if not pending:
                continue
            integrals = SimulationService.sample_time_integrals(model, t, config.samples, seed, threads)
            for u in pending:
                tail = SimulationService.tail_from_integrals(integrals, t, u, model.f.sup_norm)
                row: Dict[str, Any] = {
                    "u": u, "t": t, "n": tail.n_samples, "hits": tail.hits,
                    "p_hat": tail.p_hat, "ci_lo": tail.ci_lo, "ci_hi": tail.ci_hi,
                }
                for fam in families:
                    point = BoundsService.bound(model, t, u, fam, sd, **options)
                    row[f"bound_{fam.value}"] = point.bound
                    row[f"dominated_{fam.value}"] = tail.p_hat <= point.bound + 3.0 * tail.ci_half_width
                row["lambda0_star"] = stars[u]
                row["sharpness_gap"] = stars[u] + math.log(tail.p_hat) / t if tail.p_hat > 0 else math.nan
                ResultsService.append_row(table, columns, row)
                done.add((u, t))
                logger.info(f"Celda u={u}, t={t}: p̂={tail.p_hat}")

        summary = CompareService.summarize(table, config, families, seed, model)
        ResultsService.write_json(out_dir / SUMMARY_NAME, summary)
        if config.strict and not summary.all_dominated:
            failed = [fam for fam, ok in summary.domination.items() if not ok]
            raise DominationError(f"Cotas no dominantes: {', '.join(failed)}")
        return summary

    @staticmethod
    def summarize(table: Path, config: RunConfig, families: List[BoundFamily], seed: int, model) -> CompareSummary:
        rows = ResultsService.read_table(table)
        domination = {
            fam.value: all(row[f"dominated_{fam.value}"] == "true" for row in rows) for fam in families
        }
        reversible = MarkovService.check_detailed_balance(model.q, model.pi)
        sharpness = []
        if reversible:
            for row in rows:
                p_hat, t = float(row["p_hat"]), float(row["t"])
                log_rate = math.log(p_hat) / t if p_hat > 0 else None
                star = float(row["lambda0_star"])
                sharpness.append(
                    SharpnessRow(
                        u=float(row["u"]),
                        t=t,
                        lambda0_star=star,
                        log_p_over_t=log_rate,
                        gap=star + log_rate if log_rate is not None else None,
                    )
                )
        return CompareSummary(
            model=str(config.model),
            seed=seed,
            samples=config.samples,
            t_values=config.t_values,
            u_grid=config.u_grid,
            families=[fam.value for fam in families],
            cells=len(rows),
            domination=domination,
            all_dominated=all(domination.values()),
            reversible=reversible,
            sharpness=sharpness,
        )
