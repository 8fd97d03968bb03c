import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Tuple

import numpy as np
from scipy.special import logsumexp

from app.core.config import settings
from app.core.errors import ModelValidationError, ZeroHorizonError
from app.models.markov import MJPModel, Observable, ProbDist, QMatrix
from app.models.simulation import JumpStatistics, LogMgfEstimate, TailEstimate, Trajectory

logger = logging.getLogger(__name__)

Z_95 = 1.96
TAIL_EPS = 1e-12


def _cdf_rows(probs: np.ndarray) -> np.ndarray:
    """
    CDF por filas. A partir de la última entrada positiva la CDF vale 1.0 exacto.
    """
    probs = np.atleast_2d(probs)
    cdf = np.cumsum(probs, axis=1)
    for row in range(cdf.shape[0]):
        positive = np.flatnonzero(probs[row] > 0)
        if positive.size:
            cdf[row, positive[-1]:] = 1.0
    return cdf


def _jump_cdf(q: QMatrix) -> np.ndarray:
    rates = np.where(np.eye(q.n, dtype=bool), 0.0, q.rates)
    exit_rates = q.exit_rates
    probs = np.divide(rates, exit_rates[:, None], out=np.zeros_like(rates), where=exit_rates[:, None] > 0)
    return _cdf_rows(probs)


def _draw(cdf: np.ndarray, uniforms: np.ndarray) -> np.ndarray:
    # Índice de la primera entrada de la CDF mayor que el uniforme
    return np.minimum((uniforms[:, None] >= cdf).sum(axis=1), cdf.shape[1] - 1)


def _block_rng(seed: int, block: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(block,)))


def _blocks(n_samples: int, block_size: int) -> List[Tuple[int, int]]:
    count = math.ceil(n_samples / block_size)
    return [(k, min(block_size, n_samples - k * block_size)) for k in range(count)]


def _tail_interval(hits: int, n: int) -> Tuple[float, float, float, str]:
    p = hits / n
    if 0 < hits < n:
        half = Z_95 * math.sqrt(p * (1.0 - p) / n)
        return half, max(0.0, p - half), min(1.0, p + half), "normal"

    # Wilson en los extremos, donde el intervalo normal colapsa a un punto
    z2 = Z_95 * Z_95
    denom = 1.0 + z2 / n
    center = (p + z2 / (2.0 * n)) / denom
    margin = Z_95 * math.sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom
    lo, hi = max(0.0, center - margin), min(1.0, center + margin)
    return (hi - lo) / 2.0, lo, hi, "wilson"


class SimulationService:

    @staticmethod
    def sample_trajectory(model: MJPModel, horizon: float, rng: np.random.Generator) -> Trajectory:
        """
        Simula el proceso hasta el horizonte: tiempos de permanencia Exp(q_x) por
        inversión, -log(1 - U)/q_x, y saltos a y ≠ x con probabilidad q_xy / q_x.
        """
        if horizon < 0:
            raise ModelValidationError(f"El horizonte debe ser no negativo, se recibió {horizon}")
        jump_cdf = _jump_cdf(model.q)
        exit_rates = model.q.exit_rates

        state = int(_draw(_cdf_rows(model.nu.weights), rng.random(1))[0])
        times, states = [0.0], [state]
        clock = 0.0
        while True:
            rate = exit_rates[state]
            if rate <= 0:
                break
            clock += -math.log1p(-rng.random()) / rate
            if clock >= horizon:
                break
            state = int(_draw(jump_cdf[state:state + 1], rng.random(1))[0])
            times.append(clock)
            states.append(state)

        return Trajectory(
            entry_times=np.array(times),
            states=np.array(states, dtype=int),
            horizon=float(horizon),
        )

    @staticmethod
    def time_average(traj: Trajectory, f: Observable) -> float:
        """
        A_t / t calculado exactamente sobre los segmentos de la trayectoria.
        """
        if traj.horizon == 0:
            raise ZeroHorizonError()
        return float(np.sum(f.values[traj.states] * traj.segment_lengths) / traj.horizon)

    @staticmethod
    def occupation_fractions(traj: Trajectory, n: int) -> np.ndarray:
        if traj.horizon == 0:
            raise ZeroHorizonError()
        occupation = np.bincount(traj.states, weights=traj.segment_lengths, minlength=n)
        return occupation / traj.horizon

    @staticmethod
    def jump_statistics(traj: Trajectory, n: int) -> JumpStatistics:
        """
        Tiempos de permanencia completos por estado (el último segmento queda
        truncado por el horizonte y no se cuenta) y conteos de transiciones de la cadena de saltos.
        """
        lengths = traj.segment_lengths
        holding: List[List[float]] = [[] for _ in range(n)]
        for state, length in zip(traj.states[:-1], lengths[:-1]):
            holding[int(state)].append(float(length))

        counts = np.zeros((n, n), dtype=int)
        np.add.at(counts, (traj.states[:-1], traj.states[1:]), 1)
        return JumpStatistics(holding_times=holding, transition_counts=counts)

    @staticmethod
    def _block_integrals(model: MJPModel, t: float, size: int, rng: np.random.Generator, start: ProbDist) -> np.ndarray:
        """
        A_t para un bloque de trayectorias simuladas en paralelo vectorial. No se guarda la trayectoria.
        """
        jump_cdf = _jump_cdf(model.q)
        exit_rates = model.q.exit_rates
        f = model.f.values

        states = _draw(_cdf_rows(start.weights), rng.random(size))
        clock = np.zeros(size)
        integral = np.zeros(size)
        active = np.arange(size)
        while active.size:
            x = states[active]
            with np.errstate(divide="ignore"):
                hold = -np.log1p(-rng.random(active.size)) / exit_rates[x]
            end = np.minimum(clock[active] + hold, t)
            integral[active] += f[x] * (end - clock[active])
            clock[active] = end

            active = active[end < t]
            if active.size:
                states[active] = _draw(jump_cdf[states[active]], rng.random(active.size))
        return integral

    @staticmethod
    def sample_time_integrals(
        model: MJPModel,
        t: float,
        n_samples: int,
        seed: int,
        threads: Optional[int] = None,
        start: Optional[ProbDist] = None,
        block_size: Optional[int] = None,
    ) -> np.ndarray:
        """
        Muestras independientes de A_t = ∫₀ᵗ f(X_s) ds.

        Cada bloque usa su propio generador derivado de (seed, índice de bloque),
        así que el resultado no depende del número de hilos. El tamaño de bloque
        (MJP_BLOCK_SIZE) sí forma parte de la clave de reproducibilidad junto con la semilla.
        """
        if n_samples < 1:
            raise ModelValidationError(f"n_samples debe ser ≥ 1, se recibió {n_samples}")
        if t < 0:
            raise ModelValidationError(f"El horizonte debe ser no negativo, se recibió {t}")
        threads = threads or settings.MJP_THREADS
        block_size = block_size or settings.MJP_BLOCK_SIZE
        start = start or model.nu
        blocks = _blocks(n_samples, block_size)

        def run(block: Tuple[int, int]) -> np.ndarray:
            index, size = block
            return SimulationService._block_integrals(model, t, size, _block_rng(seed, index), start)

        if threads <= 1 or len(blocks) == 1:
            results = [run(block) for block in blocks]
        else:
            with ThreadPoolExecutor(max_workers=threads) as ex:
                results = list(ex.map(run, blocks))
        logger.debug(f"{n_samples} trayectorias simuladas en {len(blocks)} bloques, t={t}")
        return np.concatenate(results)

    @staticmethod
    def empirical_tail(
        model: MJPModel,
        t: float,
        u: float,
        n_samples: int,
        seed: int,
        threads: Optional[int] = None,
    ) -> TailEstimate:
        """
        Estima P_ν(A_t/t ≥ u) con intervalo al 95 %.
        """
        if t <= 0:
            raise ZeroHorizonError()
        integrals = SimulationService.sample_time_integrals(model, t, n_samples, seed, threads)
        return SimulationService.tail_from_integrals(integrals, t, u, model.f.sup_norm)

    @staticmethod
    def tail_from_integrals(integrals: np.ndarray, t: float, u: float, f_sup: float) -> TailEstimate:
        """
        Cuenta A_t/t ≥ u - 1e-12·max(1, ‖f‖∞) sobre muestras ya simuladas.
        """
        if t <= 0:
            raise ZeroHorizonError()
        eps = TAIL_EPS * max(1.0, f_sup)
        n = int(integrals.size)
        hits = int(np.count_nonzero(integrals / t >= u - eps))
        half, lo, hi, interval = _tail_interval(hits, n)
        return TailEstimate(
            u=u,
            t=t,
            n_samples=n,
            hits=hits,
            p_hat=hits / n,
            ci_half_width=half,
            ci_lo=lo,
            ci_hi=hi,
            interval=interval,
        )

    @staticmethod
    def empirical_variance_rate(
        model: MJPModel,
        t: float,
        n_samples: int,
        seed: int,
        threads: Optional[int] = None,
    ) -> float:
        """
        Var_π(A_t)/t con arranque estacionario ν = π.
        """
        if n_samples < 2:
            raise ModelValidationError("Se necesitan al menos 2 muestras para estimar una varianza")
        if t <= 0:
            raise ZeroHorizonError()
        integrals = SimulationService.sample_time_integrals(model, t, n_samples, seed, threads, start=model.pi)
        return float(np.var(integrals, ddof=1) / t)

    @staticmethod
    def empirical_log_mgf(
        model: MJPModel,
        t: float,
        r: float,
        n_samples: int,
        seed: int,
        threads: Optional[int] = None,
    ) -> LogMgfEstimate:
        if n_samples < 2:
            raise ModelValidationError("Se necesitan al menos 2 muestras para estimar la función generatriz")
        integrals = SimulationService.sample_time_integrals(model, t, n_samples, seed, threads)
        exponents = r * integrals
        value = float(logsumexp(exponents) - math.log(n_samples))
        weights = np.exp(exponents - exponents.max())
        std_error = float(np.std(weights, ddof=1) / (math.sqrt(n_samples) * weights.mean()))
        return LogMgfEstimate(r=r, t=t, n_samples=n_samples, value=value, std_error=std_error)
