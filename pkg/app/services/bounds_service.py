import logging
import math
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np
from scipy.optimize import minimize

from app.core.errors import (
    ConstantObservableError,
    DimensionTooLargeError,
    FSobolevNotVerifiedError,
    InfeasibleSliceError,
    ModelValidationError,
    OutOfRangeError,
    PoincareConstantError,
)
from app.models.bounds import (
    BoundCurve,
    BoundFamily,
    BoundParameters,
    BoundPoint,
    FSobolevCheck,
    FSobolevVerdict,
    IidSumBound,
    InfoRepresentationReport,
)
from app.models.markov import MJPModel, ProbDist, QMatrix
from app.models.spectral import SpectralData
from app.models.tilted import BernsteinParams, FSobolevFunction
from app.services.combinatorics_service import CombinatoricsService
from app.services.markov_service import MarkovService
from app.services.spectral_service import SpectralService
from app.services.tilted_service import SLICE_TOL, TiltedService

logger = logging.getLogger(__name__)

VIOLATION_TOL = 1e-8
ALPHA_CHECK_TOL = 1e-6
SWEEP_POINTS = 20000
INFO_GRID = 10000
DEFAULT_RESTARTS = 20

RateFunction = Callable[[float], float]


def _spectral(model: MJPModel, sd: Optional[SpectralData]) -> SpectralData:
    return sd if sd is not None else SpectralService.spectral_decomposition(model.q, model.pi)


def _point(
    family: BoundFamily,
    model: MJPModel,
    t: float,
    u: float,
    rate: float,
    branch: str = "",
    notes: Optional[List[str]] = None,
    diagnostics: Optional[Dict[str, float]] = None,
) -> BoundPoint:
    """
    Arma el punto con bound = min(1, prefactor·e^{-t·rate}); el valor sin recortar queda en raw_bound.
    """
    if t <= 0:
        raise ModelValidationError(f"El horizonte debe ser positivo, se recibió t = {t}")
    rate = max(0.0, rate)
    prefactor = TiltedService.chi2_prefactor(model.nu, model.pi)
    raw = 0.0 if math.isinf(rate) else prefactor * math.exp(-t * rate)
    return BoundPoint(
        family=family,
        u=u,
        t=t,
        rate=rate,
        prefactor=prefactor,
        bound=min(1.0, raw),
        raw_bound=raw,
        branch=branch,
        notes=notes or [],
        diagnostics=diagnostics or {},
    )


def _check_upper(u: float) -> None:
    if u < 0:
        raise OutOfRangeError(f"La cota superior requiere u ≥ 0, se recibió u = {u}; use lower_tail")


def _entropy_term(fs: FSobolevFunction, x: np.ndarray) -> np.ndarray:
    # x·F(x) con el límite 0 en x = 0
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    positive = x > 0
    out[positive] = x[positive] * fs.func(x[positive])
    return out


def _sobolev_violation(q: QMatrix, pi: ProbDist, fs: FSobolevFunction, g: np.ndarray) -> np.ndarray:
    """
    π(g²F(g²)) - (-⟨Lg, g⟩_π) para filas g con ‖g‖_π = 1.
    """
    g = np.atleast_2d(g)
    w = pi.weights
    left = np.sum(w * _entropy_term(fs, g * g), axis=1)
    energy = -np.sum(w * g * (g @ q.rates.T), axis=1)
    return left - energy


class BoundsService:

    @staticmethod
    def bound_parameters(model: MJPModel, sd: Optional[SpectralData] = None) -> BoundParameters:
        sd = _spectral(model, sd)
        f = model.f
        var_pi = SpectralService.variance_pi(f, model.pi)
        return BoundParameters(
            sigma_hat_sq=SpectralService.sigma_hat_sq(sd, f, model.pi),
            sigma_tilde_sq=2.0 * var_pi / sd.gap,
            gap=sd.gap,
            f_sup=f.sup_norm,
            f_plus_sup=f.positive_part_norm,
            var_pi=var_pi,
            f_max=float(f.values.max()),
            f_min=float(f.values.min()),
        )

    # --- familias de cotas ---

    @staticmethod
    def bound_general(model: MJPModel, t: float, u: float, sd: Optional[SpectralData] = None) -> BoundPoint:
        """
        P_ν(A_t/t ≥ u) ≤ ‖dν/dπ‖₂ · exp(-t·λ₀*(u)).
        """
        _check_upper(u)
        sd = _spectral(model, sd)
        conj = TiltedService.lambda0_star(sd, model.f, model.pi, u)
        notes = []
        if not conj.finite:
            notes.append("infinite_rate")
        if conj.boundary:
            notes.append("boundary")
        diagnostics = {"argmax_r": conj.argmax_r} if conj.argmax_r is not None else {}
        return _point(BoundFamily.general, model, t, u, conj.value, notes=notes, diagnostics=diagnostics)

    @staticmethod
    def bound_perturbation(model: MJPModel, t: float, u: float, sd: Optional[SpectralData] = None) -> BoundPoint:
        """
        Cota de dos ramas por teoría de perturbaciones. Rama (a) con u ≤ 2σ̂²λ₁/‖f‖∞,
        rama (b) lineal en u en otro caso.
        """
        _check_upper(u)
        params = BoundsService.bound_parameters(model, sd)
        if params.f_sup == 0:
            raise ConstantObservableError()
        v, gap, f_sup = params.sigma_hat_sq, params.gap, params.f_sup
        threshold = 2.0 * v * gap / f_sup
        bp = BernsteinParams(v=v, c=2.0 * f_sup / gap)
        r0 = (1.0 / bp.c) * (1.0 - 1.0 / math.sqrt(1.0 + 2.0 * u * bp.c / v)) if v > 0 else 0.0

        if u <= threshold:
            branch, rate = "a", TiltedService.bernstein_conjugate(bp, u)
        else:
            branch, rate = "b", (gap / (3.0 * f_sup)) * (u - gap * v / (2.0 * f_sup))
        diagnostics = {"r0": r0, "r0_limit": gap / (3.0 * f_sup), "threshold": threshold}
        return _point(BoundFamily.perturbation, model, t, u, rate, branch=branch, diagnostics=diagnostics)

    @staticmethod
    def bound_poincare(
        model: MJPModel,
        t: float,
        u: float,
        constant: Optional[float] = None,
        sd: Optional[SpectralData] = None,
    ) -> BoundPoint:
        """
        Cota tipo Bernstein a partir de la desigualdad de Poincaré con constante C
        (por defecto C = 1/λ₁): v = 2·Var_π(f)·C, c = ‖f‖∞·C.
        """
        _check_upper(u)
        params = BoundsService.bound_parameters(model, sd)
        minimum = 1.0 / params.gap
        constant = minimum if constant is None else constant
        if constant < minimum * (1.0 - 1e-12):
            raise PoincareConstantError(constant, minimum)

        bp = BernsteinParams(v=2.0 * params.var_pi * constant, c=params.f_sup * constant)
        rate = TiltedService.bernstein_conjugate(bp, u)
        # Forma sin u bajo la raíz, solo como diagnóstico
        display_rate = (
            2.0 * u * u / (bp.v * (1.0 + math.sqrt(1.0 + 2.0 * bp.c / bp.v)) ** 2) if bp.v > 0 else math.inf
        )
        diagnostics = {"sigma_tilde_sq": bp.v, "scale": bp.c, "constant": constant, "display_form_rate": display_rate}
        return _point(
            BoundFamily.poincare, model, t, u, rate, notes=["u_under_square_root"], diagnostics=diagnostics
        )

    @staticmethod
    def bernstein_general_params(model: MJPModel, sd: Optional[SpectralData] = None) -> BernsteinParams:
        params = BoundsService.bound_parameters(model, sd)
        return BernsteinParams(v=params.sigma_hat_sq, c=params.f_plus_sup / params.gap)

    @staticmethod
    def bound_bernstein_general(model: MJPModel, t: float, u: float, sd: Optional[SpectralData] = None) -> BoundPoint:
        """
        Cota de Bernstein general: α(u) = 2u² / (σ̂²(1 + √(1 + 2‖f⁺‖∞u/(λ₁σ̂²)))²),
        aplicada a través de bound_via_alpha.
        """
        _check_upper(u)
        sd = _spectral(model, sd)
        bp = BoundsService.bernstein_general_params(model, sd)
        return BoundsService.bound_via_alpha(
            model, t, u,
            lambda x: TiltedService.bernstein_conjugate(bp, x),
            family=BoundFamily.bernstein_general,
            sd=sd,
        )

    @staticmethod
    def check_f_sobolev(
        model: MJPModel,
        fs: FSobolevFunction,
        n_restarts: int = DEFAULT_RESTARTS,
        seed: Optional[int] = None,
    ) -> FSobolevCheck:
        """
        Busca g con ‖g‖_π = 1 que viole π(g²F(g²)) ≤ -⟨Lg, g⟩_π.

        Con n = 2 se barre la circunferencia y el veredicto puede ser `holds`.
        Con n ≥ 3 se optimiza localmente desde varios arranques; sin violación el
        veredicto es `inconclusive`.
        """
        q, pi = model.q, model.pi
        root = np.sqrt(pi.weights)

        if model.n == 2:
            theta = np.linspace(0.0, 2.0 * math.pi, SWEEP_POINTS, endpoint=False)
            g = np.column_stack([np.cos(theta), np.sin(theta)]) / root[None, :]
            violations = _sobolev_violation(q, pi, fs, g)
            worst = int(np.argmax(violations))
            if violations[worst] > VIOLATION_TOL:
                return FSobolevCheck(
                    verdict=FSobolevVerdict.violated,
                    max_violation=float(violations[worst]),
                    witness=g[worst].tolist(),
                )
            return FSobolevCheck(verdict=FSobolevVerdict.holds, max_violation=float(violations[worst]))

        def negative_violation(h: np.ndarray) -> float:
            norm = float(np.linalg.norm(h))
            if norm == 0:
                return 0.0
            return -float(_sobolev_violation(q, pi, fs, h / norm / root)[0])

        rng = np.random.default_rng(model.seed if seed is None else seed)
        starts = [np.eye(model.n)[x] + 0.01 for x in range(model.n)]
        starts += [np.abs(rng.standard_normal(model.n)) for _ in range(n_restarts)]

        best_value, best_g = -math.inf, None
        for start in starts:
            found = minimize(negative_violation, start, method="L-BFGS-B")
            h = found.x / np.linalg.norm(found.x)
            value = -float(found.fun)
            if value > best_value:
                best_value, best_g = value, h / root
        logger.debug(f"F-Sobolev: máxima violación {best_value} en {len(starts)} arranques")

        if best_value > VIOLATION_TOL:
            return FSobolevCheck(
                verdict=FSobolevVerdict.violated, max_violation=best_value, witness=best_g.tolist()
            )
        return FSobolevCheck(verdict=FSobolevVerdict.inconclusive, max_violation=best_value)

    @staticmethod
    def fsobolev_cumulant(model: MJPModel, fs: FSobolevFunction) -> RateFunction:
        """
        r ↦ F(π(F⁻¹(r·f))).
        """
        values, weights = model.f.values, model.pi.weights
        if fs.composite is not None:
            return lambda r: fs.composite(r, values, weights)
        return lambda r: float(fs.func(np.array(float(weights @ fs.inverse(r * values)))))

    @staticmethod
    def fsobolev_domain(model: MJPModel, fs: FSobolevFunction) -> float:
        """
        r_f = F(0) / min f; infinito cuando F(0) = -∞.
        """
        f_min = float(model.f.values.min())
        if math.isinf(fs.at_zero) or f_min >= 0:
            return math.inf
        return fs.at_zero / f_min

    @staticmethod
    def bound_fsobolev(
        model: MJPModel,
        t: float,
        u: float,
        fs: FSobolevFunction,
        assume: bool = False,
        n_restarts: int = DEFAULT_RESTARTS,
    ) -> BoundPoint:
        """
        rate = sup_{r ∈ [0, r_f)} (r·u - F(π(F⁻¹(r·f)))).
        Sin `assume`, la desigualdad se verifica antes y solo `holds` es aceptado.
        """
        _check_upper(u)
        notes = []
        if assume:
            notes.append("assumed")
        else:
            check = BoundsService.check_f_sobolev(model, fs, n_restarts)
            if check.verdict != FSobolevVerdict.holds:
                raise FSobolevNotVerifiedError(check.verdict.value)

        r_f = BoundsService.fsobolev_domain(model, fs)
        values = model.f.values
        if math.isinf(r_f) and u > float(values.max()) + SLICE_TOL * max(1.0, model.f.sup_norm):
            return _point(BoundFamily.fsobolev, model, t, u, math.inf, notes=notes + ["infinite_rate"])

        f_sup = model.f.sup_norm
        cap = 1e6 * (1.0 + 1.0 / f_sup) if f_sup > 0 else 1e6
        conj = TiltedService.fenchel_conjugate(BoundsService.fsobolev_cumulant(model, fs), u, r_max=r_f, cap=cap)
        if conj.boundary:
            notes.append("boundary")
        diagnostics = {"r_f": r_f}
        if conj.argmax_r is not None:
            diagnostics["argmax_r"] = conj.argmax_r
        return _point(BoundFamily.fsobolev, model, t, u, conj.value, notes=notes, diagnostics=diagnostics)

    # --- información de Donsker-Varadhan ---

    @staticmethod
    def donsker_varadhan_info(q: QMatrix, pi: ProbDist, beta) -> float:
        """
        I(β|π) = -⟨L√(dβ/dπ), √(dβ/dπ)⟩_π.
        """
        weights = beta.weights if isinstance(beta, ProbDist) else np.asarray(beta, dtype=float)
        value = float(BoundsService._info_rows(q, pi, weights[None, :])[0])
        return max(0.0, value)

    @staticmethod
    def _info_rows(q: QMatrix, pi: ProbDist, betas: np.ndarray) -> np.ndarray:
        g = np.sqrt(np.maximum(betas, 0.0) / pi.weights[None, :])
        return -np.sum(pi.weights * g * (g @ q.rates.T), axis=1)

    @staticmethod
    def _slice_endpoints(values: np.ndarray, u: float) -> List[np.ndarray]:
        """
        Extremos del segmento {β ≥ 0, Σβ = 1, β(f) = u} en el símplex de 3 estados:
        intersecciones de la recta con las aristas.
        """
        points = []
        for i, j in ((0, 1), (0, 2), (1, 2)):
            fi, fj = values[i], values[j]
            if abs(fi - fj) <= SLICE_TOL:
                if abs(u - fi) <= SLICE_TOL:
                    points += [np.eye(3)[i], np.eye(3)[j]]
                continue
            s = (u - fj) / (fi - fj)
            if -SLICE_TOL <= s <= 1.0 + SLICE_TOL:
                s = min(max(s, 0.0), 1.0)
                beta = np.zeros(3)
                beta[i], beta[j] = s, 1.0 - s
                points.append(beta)
        return points

    @staticmethod
    def verify_info_representation(
        model: MJPModel,
        u: float,
        grid_density: int = INFO_GRID,
        sd: Optional[SpectralData] = None,
    ) -> InfoRepresentationReport:
        """
        Ínfimo por fuerza bruta de I(β|π) sobre {β : β(f) = u}, comparado con λ₀*(u).
        """
        n = model.n
        if n > 3:
            raise DimensionTooLargeError(n, 3)
        values = model.f.values
        lo, hi = float(values.min()), float(values.max())
        tol = SLICE_TOL * max(1.0, model.f.sup_norm)
        if u < lo - tol or u > hi + tol:
            raise InfeasibleSliceError(u, lo, hi)
        u = min(max(u, lo), hi)

        if n == 2:
            if hi - lo <= tol:
                betas = model.pi.weights[None, :]
            else:
                b0 = (u - values[1]) / (values[0] - values[1])
                betas = np.array([[b0, 1.0 - b0]])
        else:
            ends = BoundsService._slice_endpoints(values, u)
            first = ends[0]
            last = max(ends, key=lambda p: float(np.linalg.norm(p - first)))
            s = np.linspace(0.0, 1.0, grid_density)[:, None]
            betas = (1.0 - s) * first[None, :] + s * last[None, :]

        info = BoundsService._info_rows(model.q, model.pi, betas)
        best = int(np.argmin(info))
        info_inf = max(0.0, float(info[best]))
        star = TiltedService.lambda0_star(_spectral(model, sd), model.f, model.pi, u).value
        return InfoRepresentationReport(
            u=u,
            info_inf=info_inf,
            lambda0_star=star,
            gap=abs(info_inf - star),
            argmin_beta=betas[best].tolist(),
        )

    @staticmethod
    def bound_via_alpha(
        model: MJPModel,
        t: float,
        u: float,
        alpha: RateFunction,
        family: BoundFamily = BoundFamily.general,
        sd: Optional[SpectralData] = None,
    ) -> BoundPoint:
        """
        Cota con una función α que cumpla α(β(f)) ≤ I(β|π). Para n ≤ 3 la condición
        se contrasta con el ínfimo por fuerza bruta en el punto u.
        """
        rate = max(0.0, alpha(u))
        notes = []
        values = model.f.values
        if model.n <= 3 and values.min() <= u <= values.max():
            report = BoundsService.verify_info_representation(model, u, sd=sd)
            if rate > report.info_inf + ALPHA_CHECK_TOL:
                logger.warning(f"α({u}) = {rate} supera el ínfimo de la información {report.info_inf}")
                notes.append("alpha_condition_violated")
        return _point(family, model, t, u, rate, notes=notes)

    # --- colas inferiores, dos colas, réplicas ---

    @staticmethod
    def bound(model: MJPModel, t: float, u: float, family: BoundFamily, sd: Optional[SpectralData] = None, **options) -> BoundPoint:
        """
        Despacha a la familia pedida. Opciones: `fs` y `assume` (fsobolev), `poincare_constant` (poincare).
        """
        family = BoundFamily(family)
        if family == BoundFamily.general:
            return BoundsService.bound_general(model, t, u, sd)
        if family == BoundFamily.perturbation:
            return BoundsService.bound_perturbation(model, t, u, sd)
        if family == BoundFamily.poincare:
            return BoundsService.bound_poincare(model, t, u, options.get("poincare_constant"), sd)
        if family == BoundFamily.bernstein_general:
            return BoundsService.bound_bernstein_general(model, t, u, sd)
        fs = options.get("fs")
        if fs is None:
            raise ModelValidationError("La familia fsobolev necesita una función F")
        return BoundsService.bound_fsobolev(model, t, u, fs, assume=options.get("assume", False))

    @staticmethod
    def lower_tail(model: MJPModel, t: float, u: float, family: BoundFamily, sd: Optional[SpectralData] = None, **options) -> BoundPoint:
        """
        P_ν(A_t/t ≤ u) para u ≤ 0: la familia aplicada a -f en el umbral -u.
        """
        if u > 0:
            raise OutOfRangeError(f"La cola inferior requiere u ≤ 0, se recibió u = {u}")
        flipped = MarkovService.negate_observable(model)
        point = BoundsService.bound(flipped, t, -u, family, sd, **options)
        return point.model_copy(update={"u": u, "notes": point.notes + ["lower_tail"]})

    @staticmethod
    def two_sided(model: MJPModel, t: float, u: float, family: BoundFamily, sd: Optional[SpectralData] = None, **options) -> BoundPoint:
        """
        P_ν(|A_t/t| ≥ u) ≤ cota superior en u + cota inferior en -u.
        """
        _check_upper(u)
        sd = _spectral(model, sd)
        upper = BoundsService.bound(model, t, u, family, sd, **options)
        lower = BoundsService.lower_tail(model, t, -u, family, sd, **options)
        raw = upper.raw_bound + lower.raw_bound
        return BoundPoint(
            family=upper.family,
            u=u,
            t=t,
            rate=min(upper.rate, lower.rate),
            prefactor=upper.prefactor,
            bound=min(1.0, raw),
            raw_bound=raw,
            branch="two_sided",
            notes=upper.notes + lower.notes,
            diagnostics={"upper_bound": upper.raw_bound, "lower_bound": lower.raw_bound},
        )

    @staticmethod
    def iid_sum_bound(
        rate_fn: RateFunction,
        n_replicas: int,
        u: float,
        t: float = 1.0,
        prefactor: float = 1.0,
    ) -> IidSumBound:
        """
        Promedio de n copias independientes de A_t/t: la tasa se multiplica por n y
        cada réplica aporta su propio factor ‖dν/dπ‖₂.
        """
        if n_replicas < 1:
            raise OutOfRangeError(f"n_replicas debe ser ≥ 1, se recibió {n_replicas}")
        rate = n_replicas * max(0.0, rate_fn(u))
        exponent = 0.0 if math.isinf(rate) else math.exp(-t * rate)
        return IidSumBound(
            n_replicas=n_replicas,
            u=u,
            rate=rate,
            bound=min(1.0, prefactor ** n_replicas * exponent),
            bound_single_prefactor=min(1.0, prefactor * exponent),
            notes=["product_prefactor"],
        )

    @staticmethod
    def bound_curve(
        model: MJPModel,
        t: float,
        u_grid: Sequence[float],
        family: BoundFamily,
        sd: Optional[SpectralData] = None,
        **options,
    ) -> BoundCurve:
        sd = _spectral(model, sd)
        points = [BoundsService.bound(model, t, float(u), family, sd, **options) for u in u_grid]
        return BoundCurve(
            family=BoundFamily(family),
            t=t,
            points=points,
            parameters=BoundsService.bound_parameters(model, sd),
            branches=sorted({p.branch for p in points if p.branch}),
        )

    # --- cotas superiores de λ₀(r) ---

    @staticmethod
    def lambda0_bound_phi(params: BoundParameters, r: float) -> float:
        """
        (σ̂²λ₁²/(2‖f‖∞²))·Φ(‖f‖∞ r/λ₁) para r ∈ [0, λ₁/(3‖f‖∞)].
        """
        x = params.f_sup * r / params.gap
        scale = params.sigma_hat_sq * params.gap ** 2 / (2.0 * params.f_sup ** 2)
        return scale * CombinatoricsService.phi(x)

    @staticmethod
    def lambda0_bound_phi_relaxed(params: BoundParameters, r: float) -> float:
        """
        Forma relajada con Φ(x) ≤ x²/(1 - 2x): σ̂²r² / (2(1 - 2‖f‖∞r/λ₁)).
        """
        x = params.f_sup * r / params.gap
        if x >= 0.5:
            return math.inf
        return params.sigma_hat_sq * r * r / (2.0 * (1.0 - 2.0 * x))

    @staticmethod
    def lambda0_bound_bernstein(params: BoundParameters, r: float) -> float:
        return TiltedService.sub_gamma_cumulant(
            BernsteinParams(v=params.sigma_hat_sq, c=params.f_plus_sup / params.gap), r
        )

    @staticmethod
    def lambda0_bound_poincare(params: BoundParameters, r: float, constant: Optional[float] = None) -> float:
        constant = 1.0 / params.gap if constant is None else constant
        return TiltedService.sub_gamma_cumulant(
            BernsteinParams(v=2.0 * params.var_pi * constant, c=params.f_sup * constant), r
        )

    @staticmethod
    def lambda0_bound_fsobolev(model: MJPModel, fs: FSobolevFunction, r: float) -> float:
        return BoundsService.fsobolev_cumulant(model, fs)(r)
