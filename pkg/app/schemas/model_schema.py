from pydantic import BaseModel, model_validator
from typing import List, Optional


class ModelFile(BaseModel):
    """
    Formato de archivo de modelo (JSON o TOML). Las etiquetas se asignan a índices en orden de aparición.
    """
    states: List[str]
    q: List[List[float]]  # por filas
    f: List[float]
    nu: Optional[List[float]] = None  # por defecto, masa puntual en el primer estado
    seed: Optional[int] = None

    @model_validator(mode="after")
    def _check_lengths(self):
        n = len(self.states)
        if len(set(self.states)) != n:
            raise ValueError("las etiquetas de `states` deben ser distintas")
        if len(self.q) != n or any(len(row) != n for row in self.q):
            raise ValueError(f"`q` debe ser una matriz {n}x{n}")
        if len(self.f) != n:
            raise ValueError(f"`f` debe tener {n} entradas")
        if self.nu is not None and len(self.nu) != n:
            raise ValueError(f"`nu` debe tener {n} entradas")
        return self
