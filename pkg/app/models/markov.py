from typing import List, Optional

import numpy as np

from app.models.base import ArrayModel

CENTERING_TOL = 1e-12


class QMatrix(ArrayModel):
    """
    Generador de un proceso de saltos de Markov: tasas fuera de la diagonal
    no negativas y filas que suman cero.
    """
    rates: np.ndarray

    @property
    def n(self) -> int:
        return self.rates.shape[0]

    @property
    def exit_rates(self) -> np.ndarray:
        # q_x = -q_xx
        return -np.diag(self.rates)


class ProbDist(ArrayModel):
    weights: np.ndarray

    @property
    def n(self) -> int:
        return self.weights.shape[0]

    @property
    def strictly_positive(self) -> bool:
        return bool(self.weights.min() > 0)


class Observable(ArrayModel):
    values: np.ndarray
    centered: bool = False

    @property
    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))

    @property
    def positive_part_norm(self) -> float:
        return float(np.max(np.maximum(self.values, 0.0)))


class MJPModel(ArrayModel):
    """
    Modelo completo: generador, distribución invariante, observable centrado
    y distribución inicial.
    """
    q: QMatrix
    pi: ProbDist
    f: Observable
    nu: ProbDist
    labels: List[str]
    seed: Optional[int] = None

    @property
    def n(self) -> int:
        return self.q.n
