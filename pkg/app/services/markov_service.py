import logging
import math
from typing import Optional, Sequence

import numpy as np
from scipy.sparse.csgraph import connected_components

from app.core.config import settings
from app.core.errors import (
    ModelValidationError,
    NegativeRateError,
    NonFiniteRateError,
    NonSquareError,
    NotIrreducibleError,
    RowSumViolationError,
    SingularSystemError,
    StateSpaceTooSmallError,
)
from app.models.markov import CENTERING_TOL, MJPModel, Observable, ProbDist, QMatrix

logger = logging.getLogger(__name__)

# Orden fijo de la serie de Taylor en la exponencial escalada (‖A‖ ≤ 1 tras escalar)
TAYLOR_ORDER = 18
EXACT_CENTER_TOL = 1e-14


class MarkovService:

    @staticmethod
    def validate_q_matrix(raw, tol: Optional[float] = None) -> QMatrix:
        """
        Valida una matriz de tasas y la normaliza: la diagonal se recalcula como
        menos la suma de las tasas fuera de la diagonal.
        """
        tol = settings.MJP_ROW_SUM_TOL if tol is None else tol
        rates = np.array(raw, dtype=float)
        if rates.ndim != 2 or rates.shape[0] != rates.shape[1]:
            raise NonSquareError(rates.shape)
        n = rates.shape[0]
        if n < 2:
            raise StateSpaceTooSmallError(n)
        if not np.all(np.isfinite(rates)):
            raise NonFiniteRateError()

        off = ~np.eye(n, dtype=bool)
        bad = np.argwhere(off & (rates < -tol))
        if bad.size:
            x, y = (int(v) for v in bad[0])
            raise NegativeRateError(x, y, float(rates[x, y]))

        row_sums = rates.sum(axis=1)
        for x in range(n):
            if abs(row_sums[x]) > tol:
                raise RowSumViolationError(x, float(row_sums[x]))

        # Tasas negativas dentro de la tolerancia se llevan a 0
        normalized = np.where(off, np.maximum(rates, 0.0), 0.0)
        np.fill_diagonal(normalized, -normalized.sum(axis=1))
        return QMatrix(rates=normalized)

    @staticmethod
    def is_irreducible(q: QMatrix) -> bool:
        """
        True si el grafo {(x, y): x ≠ y, q_xy > 0} es fuertemente conexo.
        """
        adjacency = (q.rates > 0) & ~np.eye(q.n, dtype=bool)
        n_components, _ = connected_components(adjacency, directed=True, connection="strong")
        return n_components == 1

    @staticmethod
    def invariant_distribution(q: QMatrix) -> ProbDist:
        """
        Resuelve πᵀQ = 0, Σπ = 1 reemplazando la última ecuación de Qᵀπ = 0 por la normalización.
        """
        if not MarkovService.is_irreducible(q):
            raise NotIrreducibleError()
        system = q.rates.T.copy()
        system[-1, :] = 1.0
        rhs = np.zeros(q.n)
        rhs[-1] = 1.0
        try:
            pi = np.linalg.solve(system, rhs)
        except np.linalg.LinAlgError as e:
            raise SingularSystemError() from e
        if not np.all(np.isfinite(pi)) or pi.min() <= 0:
            raise SingularSystemError()
        pi = pi / pi.sum()
        return ProbDist(weights=pi)

    @staticmethod
    def matrix_exponential(a: np.ndarray) -> np.ndarray:
        """
        exp(A) por escalamiento y cuadrado: s = ⌈log₂ ‖A‖∞⌉ cuadrados y una serie
        de Taylor de orden fijo sobre A / 2^s.
        """
        a = np.asarray(a, dtype=float)
        n = a.shape[0]
        norm = np.linalg.norm(a, ord=np.inf)
        squarings = max(0, math.ceil(math.log2(norm))) if norm > 0 else 0
        scaled = a / 2.0 ** squarings

        # Horner sobre los coeficientes 1/k!
        result = np.eye(n) / math.factorial(TAYLOR_ORDER)
        for k in range(TAYLOR_ORDER - 1, -1, -1):
            result = scaled @ result + np.eye(n) / math.factorial(k)

        for _ in range(squarings):
            result = result @ result
        return result

    @staticmethod
    def transition_matrix(q: QMatrix, t: float) -> np.ndarray:
        """
        P(t) = exp(tQ). Entradas mayores que -1e-12 y negativas se fijan en 0.
        """
        if t < 0:
            raise ModelValidationError(f"El tiempo debe ser no negativo, se recibió t = {t}")
        if t == 0:
            return np.eye(q.n)
        p = MarkovService.matrix_exponential(t * q.rates)
        p[(p < 0) & (p >= -1e-12)] = 0.0
        return p

    @staticmethod
    def check_detailed_balance(q: QMatrix, pi: ProbDist, tol: float = 1e-12) -> bool:
        flux = pi.weights[:, None] * q.rates
        return bool(np.max(np.abs(flux - flux.T)) <= tol)

    @staticmethod
    def center_observable(f: Observable, pi: ProbDist) -> Observable:
        """
        Devuelve f - π(f)·1. Un observable ya centrado (|π(f)| ≤ 1e-14) se devuelve sin cambios.
        """
        mean = float(pi.weights @ f.values)
        if abs(mean) <= EXACT_CENTER_TOL:
            return Observable(values=f.values, centered=True)
        centered = f.values - mean
        return Observable(values=centered, centered=abs(float(pi.weights @ centered)) <= CENTERING_TOL)

    @staticmethod
    def build_model(
        q: QMatrix,
        f,
        nu=None,
        labels: Optional[Sequence[str]] = None,
        seed: Optional[int] = None,
    ) -> MJPModel:
        """
        Arma un MJPModel validado: irreducibilidad, π, f centrado y ν (por defecto δ en el primer estado).
        """
        pi = MarkovService.invariant_distribution(q)
        values = np.array(f, dtype=float)
        if values.shape != (q.n,) or not np.all(np.isfinite(values)):
            raise ModelValidationError(f"El observable debe tener {q.n} entradas finitas")
        observable = MarkovService.center_observable(Observable(values=values), pi)

        if nu is None:
            nu_weights = np.zeros(q.n)
            nu_weights[0] = 1.0
        else:
            nu_weights = np.array(nu, dtype=float)
            if nu_weights.shape != (q.n,) or np.any(nu_weights < 0):
                raise ModelValidationError("ν debe ser un vector de probabilidad con una entrada por estado")
            if abs(nu_weights.sum() - 1.0) > 1e-12:
                raise ModelValidationError(f"ν debe sumar 1, suma {nu_weights.sum()}")

        labels = list(labels) if labels is not None else [str(x) for x in range(q.n)]
        model = MJPModel(q=q, pi=pi, f=observable, nu=ProbDist(weights=nu_weights), labels=labels, seed=seed)
        logger.debug(f"Modelo construido: n={q.n}, π={pi.weights}")
        return model

    @staticmethod
    def negate_observable(model: MJPModel) -> MJPModel:
        """
        Mismo modelo con f → -f (cola inferior).
        """
        flipped = Observable(values=-model.f.values, centered=model.f.centered)
        return model.model_copy(update={"f": flipped})
