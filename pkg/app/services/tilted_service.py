import logging
import math
from typing import Callable, List, Sequence

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.special import logsumexp

from app.core.errors import DimensionTooLargeError, InfeasibleSliceError, ModelValidationError, NonFiniteError
from app.models.markov import ProbDist, QMatrix
from app.models.spectral import SpectralData
from app.models.tilted import BernsteinParams, ConjugateResult, TiltedEval
from app.services.markov_service import MarkovService
from app.services.optimize import golden_section_max
from app.services.spectral_service import SpectralService, Vector, as_values

logger = logging.getLogger(__name__)

# Tope del corchete adaptativo: R ≤ 1e6·(1 + 1/‖f‖∞)
BRACKET_CAP = 1e6
DOMAIN_SHRINK = 1e-9
SLICE_TOL = 1e-12
VARIATIONAL_GRID = 4001


def _exceeds_max(values: np.ndarray, u: float) -> bool:
    return u > float(values.max()) + SLICE_TOL * max(1.0, float(np.max(np.abs(values))))


def _infinite(u: float) -> ConjugateResult:
    return ConjugateResult(u=u, value=math.inf, argmax_r=None, converged=True, finite=False)


class TiltedService:

    @staticmethod
    def tilted_matrix(sd: SpectralData, f: Vector, r: float) -> np.ndarray:
        """
        D^{1/2}(sym + r·M_f)D^{-1/2}, simétrica en el sentido usual.
        """
        root = np.sqrt(sd.pi.weights)
        b = root[:, None] * sd.sym / root[None, :]
        b = (b + b.T) / 2.0
        return b + r * np.diag(as_values(f))

    @staticmethod
    def lambda0(sd: SpectralData, f: Vector, pi: ProbDist, r: float) -> float:
        """
        Mayor autovalor del operador inclinado simetrizado (L + L*)/2 + r·M_f.
        """
        return float(np.linalg.eigvalsh(TiltedService.tilted_matrix(sd, f, r))[-1])

    @staticmethod
    def evaluate(sd: SpectralData, f: Vector, pi: ProbDist, r: float) -> TiltedEval:
        return TiltedEval(r=r, lambda0=TiltedService.lambda0(sd, f, pi, r))

    @staticmethod
    def feynman_kac_norm(q: QMatrix, pi: ProbDist, f: Vector, r: float, t: float) -> float:
        """
        ‖exp(t(Q + r·diag f))‖ como operador en L²(π).
        """
        if t < 0:
            raise ModelValidationError(f"El tiempo debe ser no negativo, se recibió t = {t}")
        if t == 0:
            return 1.0
        generator = q.rates + r * np.diag(as_values(f))
        semigroup = MarkovService.matrix_exponential(t * generator)
        return SpectralService.pi_operator_norm(semigroup, pi)

    @staticmethod
    def chi2_prefactor(nu: ProbDist, pi: ProbDist) -> float:
        """
        ‖dν/dπ‖₂ = √(Σ ν_x² / π_x).
        """
        return max(1.0, math.sqrt(float(np.sum(nu.weights ** 2 / pi.weights))))

    @staticmethod
    def fenchel_conjugate(
        g: Callable[[float], float],
        u: float,
        r_max: float = math.inf,
        cap: float = BRACKET_CAP,
    ) -> ConjugateResult:
        """
        sup_{r ∈ [0, R)} (r·u - G(r)) para G convexa con G(0) = 0.

        El corchete empieza en r = 1 y se duplica mientras el objetivo crezca.
        Si el tope se alcanza con el objetivo todavía creciendo, el resultado
        lleva boundary=True y converged=False.
        """
        def objective(r: float) -> float:
            value = g(r)
            if not math.isfinite(value):
                raise NonFiniteError(r)
            return r * u - value

        limit = cap if math.isinf(r_max) else min(cap, r_max * (1.0 - DOMAIN_SHRINK))

        lower, a = 0.0, 0.0
        b = min(1.0, limit)
        h_a, h_b = objective(a), objective(b)
        while h_b > h_a and b < limit:
            lower, a, h_a = a, b, h_b
            b = min(2.0 * b, limit)
            h_b = objective(b)
        boundary = b >= limit and h_b >= h_a
        logger.debug(f"Corchete del conjugado para u={u}: [{lower}, {b}], boundary={boundary}")

        if boundary:
            logger.warning(f"El conjugado en u={u} alcanzó el tope r={limit}; se informa el mejor valor encontrado")
            return ConjugateResult(
                u=u, value=max(0.0, h_b), argmax_r=b, converged=False, finite=True, boundary=True
            )

        found = golden_section_max(objective, lower, b)
        return ConjugateResult(
            u=u,
            value=max(0.0, found.maximum),
            argmax_r=found.argmax,
            converged=found.converged,
        )

    @staticmethod
    def sub_gamma_cumulant(bp: BernsteinParams, r: float) -> float:
        """
        r²v / (2(1 - rc)) en [0, 1/c); +∞ fuera del dominio.
        """
        if bp.c > 0 and r * bp.c >= 1.0:
            return math.inf
        return r * r * bp.v / (2.0 * (1.0 - r * bp.c))

    @staticmethod
    def bernstein_conjugate(bp: BernsteinParams, u: float) -> float:
        """
        Transformada de Legendre de la cota sub-gamma:
        2u² / (v(1 + √(1 + 2uc/v))²). Con c = 0 se reduce a u²/(2v).
        """
        if u <= 0:
            return 0.0
        if bp.v == 0:
            return u / bp.c if bp.c > 0 else math.inf
        if bp.c == 0:
            return u * u / (2.0 * bp.v)
        return 2.0 * u * u / (bp.v * (1.0 + math.sqrt(1.0 + 2.0 * u * bp.c / bp.v)) ** 2)

    @staticmethod
    def bernstein_conjugate_expanded(bp: BernsteinParams, u: float) -> float:
        # (v/c²)(1 + uc/v - √(1 + 2uc/v)); pierde precisión para uc/v pequeño
        x = u * bp.c / bp.v
        return (bp.v / bp.c ** 2) * (1.0 + x - math.sqrt(1.0 + 2.0 * x))

    @staticmethod
    def lambda0_star(sd: SpectralData, f: Vector, pi: ProbDist, u: float) -> ConjugateResult:
        """
        λ₀*(u) = sup_{r ≥ 0} (r·u - λ₀(r)). Infinito para u > max f.
        """
        values = as_values(f)
        if _exceeds_max(values, u):
            return _infinite(u)
        f_sup = float(np.max(np.abs(values)))
        cap = BRACKET_CAP * (1.0 + 1.0 / f_sup) if f_sup > 0 else BRACKET_CAP
        b = TiltedService.tilted_matrix(sd, values, 0.0)
        tilt = np.diag(values)

        def lam(r: float) -> float:
            return float(np.linalg.eigvalsh(b + r * tilt)[-1])

        return TiltedService.fenchel_conjugate(lam, u, cap=cap)

    @staticmethod
    def lambda0_star_curve(sd: SpectralData, f: Vector, pi: ProbDist, u_grid: Sequence[float]) -> List[ConjugateResult]:
        return [TiltedService.lambda0_star(sd, f, pi, float(u)) for u in u_grid]

    @staticmethod
    def rate_function_variational(q: QMatrix, pi: ProbDist, f: Vector, u: float) -> float:
        """
        I(u) = inf{-⟨Lg, g⟩_π : ‖g‖₂ = 1, ⟨M_f g, g⟩_π = u} por búsqueda directa sobre la esfera.
        Solo para n ∈ {2, 3}.
        """
        values = as_values(f)
        n = q.n
        if n > 3:
            raise DimensionTooLargeError(n, 3)
        lo, hi = float(values.min()), float(values.max())
        tol = SLICE_TOL * max(1.0, float(np.max(np.abs(values))))
        if u < lo - tol or u > hi + tol:
            raise InfeasibleSliceError(u, lo, hi)
        u = min(max(u, lo), hi)

        # En coordenadas h = D^{1/2} g el objetivo es -hᵀBh sobre la esfera unidad
        b = SpectralService.symmetrized_similarity(q, pi)
        if hi - lo <= tol:
            return max(0.0, -float(np.linalg.eigvalsh(b)[-1]))

        def energy(h: np.ndarray) -> float:
            return -float(h @ b @ h)

        if n == 2:
            cos_sq = min(1.0, max(0.0, (u - values[1]) / (values[0] - values[1])))
            c, s = math.sqrt(cos_sq), math.sqrt(1.0 - cos_sq)
            points = [np.array([sc * c, ss * s]) for sc in (1.0, -1.0) for ss in (1.0, -1.0)]
            return max(0.0, min(energy(h) for h in points))

        # n = 3: h = (sinθ cosφ, sinθ sinφ, cosθ) con h ≥ 0; la restricción fija sin²θ
        def along(phi: float) -> float:
            a = values[0] * math.cos(phi) ** 2 + values[1] * math.sin(phi) ** 2
            if abs(a - values[2]) <= 1e-15:
                if abs(u - values[2]) > tol:
                    return math.inf
                s = 0.0
            else:
                s = (u - values[2]) / (a - values[2])
            if s < -1e-15 or s > 1.0 + 1e-15:
                return math.inf
            s = min(max(s, 0.0), 1.0)
            sin_t = math.sqrt(s)
            h = np.array([sin_t * math.cos(phi), sin_t * math.sin(phi), math.sqrt(1.0 - s)])
            return energy(h)

        grid = np.linspace(0.0, math.pi / 2, VARIATIONAL_GRID)
        a = values[0] * np.cos(grid) ** 2 + values[1] * np.sin(grid) ** 2
        with np.errstate(divide="ignore", invalid="ignore"):
            s = (u - values[2]) / (a - values[2])
        feasible = np.isfinite(s) & (s >= -1e-15) & (s <= 1.0 + 1e-15)
        s = np.clip(np.where(feasible, s, 0.0), 0.0, 1.0)
        h = np.column_stack([np.sqrt(s) * np.cos(grid), np.sqrt(s) * np.sin(grid), np.sqrt(1.0 - s)])
        energies = np.where(feasible, -np.einsum("ij,jk,ik->i", h, b, h), math.inf)
        best = int(np.argmin(energies))
        best_value = float(energies[best])
        if not math.isfinite(best_value):
            raise InfeasibleSliceError(u, lo, hi)

        left, right = grid[max(best - 1, 0)], grid[min(best + 1, len(grid) - 1)]
        refined = minimize_scalar(along, bounds=(left, right), method="bounded", options={"xatol": 1e-12})
        if refined.success and math.isfinite(refined.fun):
            best_value = min(best_value, float(refined.fun))
        return max(0.0, best_value)

    @staticmethod
    def cramer_transform_static(pi: ProbDist, f: Vector, u: float) -> ConjugateResult:
        """
        Transformada de Cramér de f(X₀) con X₀ ~ π: sup_{r ≥ 0} (r·u - log π(e^{r f})).
        """
        values = as_values(f)
        if _exceeds_max(values, u):
            return _infinite(u)
        f_sup = float(np.max(np.abs(values)))
        cap = BRACKET_CAP * (1.0 + 1.0 / f_sup) if f_sup > 0 else BRACKET_CAP
        weights = pi.weights

        def log_mgf(r: float) -> float:
            return float(logsumexp(r * values, b=weights))

        return TiltedService.fenchel_conjugate(log_mgf, u, cap=cap)
