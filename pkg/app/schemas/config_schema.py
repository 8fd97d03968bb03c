from pathlib import Path
from typing import Dict, List, Optional

from pydantic import BaseModel, Field, field_validator

from app.models.bounds import BoundFamily

DEFAULT_FAMILIES = [
    BoundFamily.general,
    BoundFamily.perturbation,
    BoundFamily.poincare,
    BoundFamily.bernstein_general,
]
TOLERANCE_KEYS = {"row_sum"}


class RunConfig(BaseModel):
    """
    Configuración de una corrida de `compare`. Los flags de la CLI tienen prioridad sobre estos valores.
    """
    model: Path
    t_values: List[float]
    u_grid: List[float]
    families: List[BoundFamily] = DEFAULT_FAMILIES
    samples: int = Field(10000, ge=1)
    seed: Optional[int] = None
    out: Path = Path("results")
    threads: Optional[int] = Field(None, ge=1)
    fsobolev_constant: Optional[float] = Field(None, gt=0)
    assume_fsobolev: bool = False
    poincare_constant: Optional[float] = Field(None, gt=0)
    strict: bool = False
    resume: bool = False
    timestamp: bool = True
    tolerances: Dict[str, float] = {}

    @field_validator("u_grid")
    @classmethod
    def _check_u_grid(cls, value: List[float]) -> List[float]:
        if not value:
            raise ValueError("la grilla de u no puede estar vacía")
        if any(b < a for a, b in zip(value, value[1:])):
            raise ValueError("la grilla de u debe estar en orden ascendente")
        # compare evalúa solo la cola superior
        if value[0] < 0:
            raise ValueError(f"la grilla de u debe ser no negativa, se recibió u = {value[0]}")
        return value

    @field_validator("t_values")
    @classmethod
    def _check_t_values(cls, value: List[float]) -> List[float]:
        if not value:
            raise ValueError("se necesita al menos un horizonte t")
        if any(t <= 0 for t in value):
            raise ValueError("los horizontes t deben ser positivos")
        return value

    @field_validator("tolerances")
    @classmethod
    def _check_tolerances(cls, value: Dict[str, float]) -> Dict[str, float]:
        unknown = set(value) - TOLERANCE_KEYS
        if unknown:
            raise ValueError(f"tolerancias desconocidas: {sorted(unknown)}")
        return value
