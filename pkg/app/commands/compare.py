from pathlib import Path

import click
from click.core import ParameterSource

from app.commands.common import CliContext, parse_families, parse_grid
from app.services.compare_service import CompareService
from app.services.model_service import ModelService


@click.command()
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False, path_type=Path), default=None,
              help="Configuración JSON/TOML; los flags tienen prioridad.")
@click.option("--model", "model_path", type=click.Path(exists=True, dir_okay=False, path_type=Path), default=None)
@click.option("--t", "t_values", type=float, multiple=True, help="Horizonte t (repetible).")
@click.option("--u-grid", "u_grid", default=None, help="Grilla lo:hi:n de umbrales.")
@click.option("--families", default=None, help="all o lista separada por comas.")
@click.option("--samples", type=click.IntRange(min=1), default=None)
@click.option("--fsobolev-constant", type=click.FloatRange(min=0, min_open=True), default=None)
@click.option("--assume-fsobolev", is_flag=True, default=None)
@click.option("--poincare-constant", type=click.FloatRange(min=0, min_open=True), default=None)
@click.option("--strict", is_flag=True, default=None, help="Salir con código 4 si alguna cota no domina.")
@click.option("--resume", is_flag=True, default=None, help="Saltar celdas ya presentes en el CSV.")
@click.pass_obj
def compare(obj: CliContext, config_path, model_path, t_values, u_grid, families, samples,
            fsobolev_constant, assume_fsobolev, poincare_constant, strict, resume):
    """
    Compara las cotas con la cola empírica en cada celda (u, t).
    """
    values = ModelService.read_config(config_path) if config_path else {}
    flags = {
        "model": model_path,
        "t_values": list(t_values) or None,
        "u_grid": parse_grid(u_grid) if u_grid else None,
        "families": parse_families(families) if families else None,
        "samples": samples,
        "seed": obj.seed,
        "threads": obj.threads,
        "fsobolev_constant": fsobolev_constant,
        "assume_fsobolev": assume_fsobolev,
        "poincare_constant": poincare_constant,
        "strict": strict,
        "resume": resume,
    }
    values.update({key: value for key, value in flags.items() if value is not None})
    # --out y --no-timestamp globales solo cuentan si se pasaron
    ctx = click.get_current_context()
    root = ctx.find_root()
    if root.get_parameter_source("out") != ParameterSource.DEFAULT or "out" not in values:
        values["out"] = obj.out
    if not obj.timestamp:
        values["timestamp"] = False

    config = ModelService.build_config(values)
    summary = CompareService.run_compare(config, threads=obj.threads)
    click.echo(summary.model_dump_json(indent=2))
