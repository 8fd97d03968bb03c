from enum import Enum
from typing import Dict, List, Optional

from pydantic import BaseModel, Field


class BoundFamily(str, Enum):
    general = "general"
    perturbation = "perturbation"
    poincare = "poincare"
    fsobolev = "fsobolev"
    bernstein_general = "bernstein_general"


class FSobolevVerdict(str, Enum):
    holds = "holds"
    violated = "violated"
    inconclusive = "inconclusive"


class BoundParameters(BaseModel):
    sigma_hat_sq: float
    sigma_tilde_sq: float
    gap: float
    f_sup: float
    f_plus_sup: float
    var_pi: float
    f_max: float
    f_min: float


class BoundPoint(BaseModel):
    """
    Un punto de una curva de cotas: P(A_t/t ≥ u) ≤ min(1, prefactor·exp(-t·rate)).
    """
    family: BoundFamily
    u: float
    t: float
    rate: float = Field(ge=0.0)
    prefactor: float
    bound: float = Field(ge=0.0, le=1.0)
    raw_bound: float
    branch: str = ""
    notes: List[str] = []
    diagnostics: Dict[str, float] = {}


class BoundCurve(BaseModel):
    family: BoundFamily
    t: float
    points: List[BoundPoint]
    parameters: BoundParameters
    branches: List[str] = []


class FSobolevCheck(BaseModel):
    verdict: FSobolevVerdict
    max_violation: float
    witness: Optional[List[float]] = None


class InfoRepresentationReport(BaseModel):
    u: float
    info_inf: float
    lambda0_star: float
    gap: float
    argmin_beta: List[float]


class IidSumBound(BaseModel):
    n_replicas: int = Field(ge=1)
    u: float
    rate: float
    bound: float
    bound_single_prefactor: float
    notes: List[str] = []
