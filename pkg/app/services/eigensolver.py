import logging
import math
from typing import Tuple

import numpy as np

from app.core.errors import NumericalError

logger = logging.getLogger(__name__)

JACOBI_TOL = 1e-13
MAX_SWEEPS = 100


def _off_norm(a: np.ndarray) -> float:
    return math.sqrt(max(0.0, float(np.sum(a * a) - np.sum(np.diag(a) ** 2))))


def jacobi_eigh(matrix: np.ndarray, tol: float = JACOBI_TOL, max_sweeps: int = MAX_SWEEPS) -> Tuple[np.ndarray, np.ndarray]:
    """
    Autovalores y autovectores de una matriz simétrica por rotaciones de Jacobi
    con barridos cíclicos. Para cuando la norma de Frobenius fuera de la diagonal
    baja de tol·max(1, ‖A‖_F).

    Devuelve (autovalores en orden descendente, autovectores ortonormales en columnas).
    """
    a = np.array(matrix, dtype=float, copy=True)
    n = a.shape[0]
    a = (a + a.T) / 2.0
    v = np.eye(n)
    threshold = tol * max(1.0, float(np.linalg.norm(a)))

    sweep = 0
    while _off_norm(a) >= threshold:
        if sweep >= max_sweeps:
            raise NumericalError(f"Jacobi no convergió en {max_sweeps} barridos")
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = (1.0 if theta >= 0 else -1.0) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c

                col_p, col_q = a[:, p].copy(), a[:, q].copy()
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
                row_p, row_q = a[p, :].copy(), a[q, :].copy()
                a[p, :] = c * row_p - s * row_q
                a[q, :] = s * row_p + c * row_q
                a[p, q] = a[q, p] = 0.0

                vec_p, vec_q = v[:, p].copy(), v[:, q].copy()
                v[:, p] = c * vec_p - s * vec_q
                v[:, q] = s * vec_p + c * vec_q
        sweep += 1

    logger.debug(f"Jacobi: {sweep} barridos para n={n}")
    eigenvalues = np.diag(a).copy()
    order = np.argsort(eigenvalues)[::-1]
    return eigenvalues[order], v[:, order]
