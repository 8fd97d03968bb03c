from pathlib import Path
from typing import List, Optional

import click
import numpy as np
from pydantic import BaseModel

from app.core.config import settings
from app.models.bounds import BoundFamily

model_option = click.option(
    "--model", "model_path", required=True, type=click.Path(exists=True, dir_okay=False, path_type=Path),
    help="Archivo de modelo (.json o .toml).",
)


class CliContext(BaseModel):
    """
    Opciones globales compartidas por los subcomandos.
    """
    seed: Optional[int] = None
    threads: Optional[int] = None
    out: Path = Path("results")
    timestamp: bool = True

    def resolved_threads(self) -> int:
        return self.threads or settings.MJP_THREADS


def parse_grid(text: str) -> List[float]:
    """
    'lo:hi:n' → n puntos equiespaciados en [lo, hi]. Un único número también es válido.
    """
    parts = text.split(":")
    try:
        if len(parts) == 1:
            return [float(parts[0])]
        if len(parts) != 3:
            raise ValueError
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise click.BadParameter(f"grilla inválida '{text}', use lo:hi:n")
    if n < 1:
        raise click.BadParameter("la grilla necesita al menos un punto")
    if hi < lo:
        raise click.BadParameter("la grilla debe ser ascendente (lo ≤ hi)")
    return np.linspace(lo, hi, n).tolist()


def parse_families(text: str) -> List[BoundFamily]:
    if text.strip() == "all":
        return list(BoundFamily)
    try:
        return [BoundFamily(name.strip()) for name in text.split(",") if name.strip()]
    except ValueError:
        valid = ", ".join(f.value for f in BoundFamily)
        raise click.BadParameter(f"familias válidas: all o una lista de {valid}")


def output_path(ctx: CliContext, explicit: Optional[Path], default_name: str) -> Path:
    return explicit if explicit is not None else ctx.out / default_name
