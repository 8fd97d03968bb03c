import logging
import math
from typing import List, Optional, Sequence

import numpy as np

from app.core.errors import NotCenteredError, OrderTooLargeError, OutOfRangeError
from app.models.bounds import BoundParameters
from app.models.markov import ProbDist
from app.models.series import SeriesCoefficients
from app.models.spectral import SpectralData
from app.services.combinatorics_service import CombinatoricsService
from app.services.spectral_service import SIGMA_CENTER_TOL, Vector, as_values

logger = logging.getLogger(__name__)

MAX_ORDER = 10


class SeriesService:

    @staticmethod
    def lambda0_coefficients(
        sd: SpectralData,
        f: Vector,
        pi: ProbDist,
        order: int,
        labels: Optional[Sequence[str]] = None,
    ) -> SeriesCoefficients:
        """
        Coeficientes de λ₀(r) = Σ λ₀⁽ⁿ⁾ rⁿ por la fórmula de trazas

            λ₀⁽ⁿ⁾ = ((-1)ⁿ / n) Σ_{k₁+…+kₙ = n-1} Tr(M_f S⁽ᵏ¹⁾ ⋯ M_f S⁽ᵏⁿ⁾),

        con S⁽⁰⁾ = -pr y S⁽ᵏ⁾ = Sᵏ. Las trazas de cada composición se suman con math.fsum.
        """
        if order > MAX_ORDER:
            raise OrderTooLargeError(order, MAX_ORDER)
        if order < 1:
            raise OutOfRangeError(f"El orden debe ser ≥ 1, se recibió {order}")
        values = as_values(f)
        mean = float(pi.weights @ values)
        if abs(mean) > SIGMA_CENTER_TOL:
            raise NotCenteredError(mean)

        tilt = np.diag(values)
        # tilt·S⁽ᵏ⁾ para k = 0..order-1
        factors = [tilt @ -sd.projector0]
        power = np.eye(sd.n)
        for _ in range(1, order):
            power = power @ sd.resolvent
            factors.append(tilt @ power)

        coeffs: List[float] = []
        for n in range(1, order + 1):
            traces = []
            for composition in CombinatoricsService.weak_compositions(n - 1, n):
                product = factors[composition[0]]
                for k in composition[1:]:
                    product = product @ factors[k]
                traces.append(float(np.trace(product)))
            coeffs.append((-1) ** n / n * math.fsum(traces))
            logger.debug(f"λ₀⁽{n}⁾ = {coeffs[-1]} ({len(traces)} composiciones)")

        return SeriesCoefficients(coeffs=coeffs, order=order, labels=list(labels or []))

    @staticmethod
    def partial_sum(coefficients: SeriesCoefficients, r: float, order: Optional[int] = None) -> float:
        order = coefficients.order if order is None else order
        return math.fsum(coefficients.coefficient(n) * r ** n for n in range(1, order + 1))

    @staticmethod
    def coefficient_bound(n: int, params: BoundParameters) -> float:
        """
        Cota por coeficiente: β_n (‖f‖∞/λ₁)ⁿ σ̂²λ₁² / (2‖f‖∞²).
        """
        if params.f_sup == 0:
            return 0.0
        scale = params.sigma_hat_sq * params.gap ** 2 / (2.0 * params.f_sup ** 2)
        return CombinatoricsService.beta_n(n) * (params.f_sup / params.gap) ** n * scale
