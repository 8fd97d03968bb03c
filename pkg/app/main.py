import logging
from pathlib import Path

import click

from app.commands.bounds import bounds, rate
from app.commands.common import CliContext
from app.commands.compare import compare
from app.commands.model import spectrum, validate
from app.commands.series import series
from app.commands.simulate import simulate
from app.core.config import settings
from app.core.errors import MJPError

logger = logging.getLogger(__name__)


class MJPGroup(click.Group):
    """
    Traduce los errores del dominio a códigos de salida: 2 validación, 3 numérico, 4 dominación.
    """

    def invoke(self, ctx: click.Context):
        try:
            return super().invoke(ctx)
        except MJPError as e:
            logger.error(e.detail)
            click.echo(f"Error: {e.detail}", err=True)
            ctx.exit(e.exit_code)


@click.group(cls=MJPGroup)
@click.option("--seed", type=int, default=None, help="Semilla global (por defecto MJP_SEED).")
@click.option("--threads", type=click.IntRange(min=1), default=None, help="Hilos de simulación (por defecto MJP_THREADS).")
@click.option("--out", type=click.Path(file_okay=False, path_type=Path), default=Path("results"), show_default=True)
@click.option("--no-timestamp", is_flag=True, help="Omitir la línea de fecha en los CSV.")
@click.option("--log-level", default=None, help="Nivel de logging (por defecto MJP_LOG_LEVEL).")
@click.pass_context
def cli(ctx: click.Context, seed, threads, out, no_timestamp, log_level):
    """
    Cotas de concentración para promedios temporales de procesos de saltos de Markov.
    """
    logging.basicConfig(
        level=(log_level or settings.MJP_LOG_LEVEL).upper(),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    ctx.obj = CliContext(seed=seed, threads=threads, out=out, timestamp=not no_timestamp)


cli.add_command(validate)
cli.add_command(spectrum)
cli.add_command(simulate)
cli.add_command(rate)
cli.add_command(series)
cli.add_command(bounds)
cli.add_command(compare)


if __name__ == "__main__":
    cli()
