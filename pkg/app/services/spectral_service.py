import logging
from typing import Union

import numpy as np

from app.core.errors import DegenerateGapError, NotCenteredError, NotIrreducibleError
from app.models.markov import Observable, ProbDist, QMatrix
from app.models.spectral import SpectralData
from app.services.eigensolver import jacobi_eigh
from app.services.markov_service import MarkovService

logger = logging.getLogger(__name__)

SIGMA_CENTER_TOL = 1e-10

Vector = Union[Observable, np.ndarray]


def as_values(f: Vector) -> np.ndarray:
    return f.values if isinstance(f, Observable) else np.asarray(f, dtype=float)


def _spectral_sum(sd_eigvecs: np.ndarray, pi: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """
    Σ_k w_k·pr_k con pr_k g = ⟨g, e_k⟩_π e_k, es decir Σ_k w_k e_k e_kᵀ D.
    """
    return (sd_eigvecs * weights[None, :]) @ sd_eigvecs.T * pi[None, :]


class SpectralService:

    @staticmethod
    def adjoint_generator(q: QMatrix, pi: ProbDist) -> np.ndarray:
        """
        L*(x, y) = π_y q_yx / π_x, el adjunto de L en L²(π).
        """
        w = pi.weights
        return w[None, :] * q.rates.T / w[:, None]

    @staticmethod
    def pi_inner(pi: ProbDist, g, h) -> float:
        return float(np.sum(np.asarray(g) * np.asarray(h) * pi.weights))

    @staticmethod
    def variance_pi(f: Vector, pi: ProbDist) -> float:
        values = as_values(f)
        mean = float(pi.weights @ values)
        return float(pi.weights @ (values - mean) ** 2)

    @staticmethod
    def pi_operator_norm(a: np.ndarray, pi: ProbDist) -> float:
        """
        Norma de operador de A en L²(π): mayor valor singular de D^{1/2} A D^{-1/2}.
        """
        root = np.sqrt(pi.weights)
        return float(np.linalg.norm(root[:, None] * a / root[None, :], 2))

    @staticmethod
    def symmetrized_similarity(q: QMatrix, pi: ProbDist) -> np.ndarray:
        """
        B = D^{1/2}·(L + L*)/2·D^{-1/2}, simétrica en el sentido usual.
        """
        root = np.sqrt(pi.weights)
        a = root[:, None] * q.rates / root[None, :]
        return (a + a.T) / 2.0

    @staticmethod
    def spectral_decomposition(q: QMatrix, pi: ProbDist) -> SpectralData:
        """
        Descompone el generador simetrizado. El núcleo span(1) se deflaciona primero
        para que el autovalor 0 quede fijado exactamente.
        """
        if not MarkovService.is_irreducible(q):
            raise NotIrreducibleError()
        w = pi.weights
        n = q.n
        root = np.sqrt(w)
        sym = (q.rates + SpectralService.adjoint_generator(q, pi)) / 2.0
        b = SpectralService.symmetrized_similarity(q, pi)

        # Base ortonormal del complemento de √π
        basis, _ = np.linalg.qr(np.column_stack([root, np.eye(n)]))
        complement = basis[:, 1:]
        reduced = complement.T @ b @ complement
        values, vectors = jacobi_eigh(reduced)

        if values[0] >= -1e-12:
            raise DegenerateGapError(float(values[0]))

        eigenvalues = np.concatenate([[0.0], values])
        h = np.column_stack([root, complement @ vectors])
        eigvecs = h / root[:, None]

        weights = np.zeros(n)
        weights[1:] = 1.0 / values
        resolvent = _spectral_sum(eigvecs, w, weights)

        gap = float(-values[0])
        logger.debug(f"Espectro simetrizado: {eigenvalues}, brecha={gap}")
        return SpectralData(
            pi=pi,
            sym=sym,
            eigenvalues=eigenvalues,
            eigvecs=eigvecs,
            gap=gap,
            projector0=np.tile(w, (n, 1)),
            resolvent=resolvent,
        )

    @staticmethod
    def reduced_resolvent(sd: SpectralData) -> np.ndarray:
        """
        S = Σ_{k≥1} pr_k / λ_k.
        """
        weights = np.zeros(sd.n)
        weights[1:] = 1.0 / sd.eigenvalues[1:]
        return _spectral_sum(sd.eigvecs, sd.pi.weights, weights)

    @staticmethod
    def resolvent_power(sd: SpectralData, r: float) -> np.ndarray:
        """
        Ŝ^r = Σ_{k≥1} (-λ_k)^{-r} pr_k, con Ŝ = -S.
        """
        weights = np.zeros(sd.n)
        weights[1:] = (-sd.eigenvalues[1:]) ** (-r)
        return _spectral_sum(sd.eigvecs, sd.pi.weights, weights)

    @staticmethod
    def sigma_hat_sq(sd: SpectralData, f: Vector, pi: ProbDist) -> float:
        """
        Varianza asintótica σ̂² = -2⟨Sf, f⟩_π.
        """
        values = as_values(f)
        mean = float(pi.weights @ values)
        if abs(mean) > SIGMA_CENTER_TOL:
            raise NotCenteredError(mean)
        value = -2.0 * SpectralService.pi_inner(pi, sd.resolvent @ values, values)
        return max(0.0, value)
