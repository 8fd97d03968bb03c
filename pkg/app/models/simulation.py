import numpy as np
from pydantic import BaseModel, Field

from app.models.base import ArrayModel


class Trajectory(ArrayModel):
    """
    Trayectoria constante a trozos: X_t = states[k] en [entry_times[k], entry_times[k+1]).
    """
    entry_times: np.ndarray
    states: np.ndarray
    horizon: float

    @property
    def segment_lengths(self) -> np.ndarray:
        return np.diff(np.append(self.entry_times, self.horizon))


class TailEstimate(BaseModel):
    u: float
    t: float
    n_samples: int = Field(ge=1)
    hits: int = Field(ge=0)
    p_hat: float = Field(ge=0.0, le=1.0)
    ci_half_width: float
    ci_lo: float
    ci_hi: float
    interval: str  # "normal" o "wilson"


class JumpStatistics(ArrayModel):
    holding_times: list
    transition_counts: np.ndarray


class LogMgfEstimate(BaseModel):
    """
    Estimación Monte Carlo de log E_ν[exp(r·A_t)] con su error estándar (método delta).
    """
    r: float
    t: float
    n_samples: int = Field(ge=2)
    value: float
    std_error: float
