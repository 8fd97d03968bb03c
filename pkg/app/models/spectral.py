import numpy as np

from app.models.base import ArrayModel
from app.models.markov import ProbDist


class SpectralData(ArrayModel):
    """
    Descomposición π-ortonormal del generador simetrizado (L + L*)/2.

    - eigenvalues: orden descendente, eigenvalues[0] = 0 exacto
    - eigvecs: columnas π-ortonormales, eigvecs[:, 0] = 1
    - projector0: matriz de la proyección sobre span(1), P[x, y] = π_y
    - resolvent: resolvente reducida S en la base de coordenadas
    """
    pi: ProbDist
    sym: np.ndarray
    eigenvalues: np.ndarray
    eigvecs: np.ndarray
    gap: float
    projector0: np.ndarray
    resolvent: np.ndarray

    @property
    def n(self) -> int:
        return self.sym.shape[0]
