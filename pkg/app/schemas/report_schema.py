from typing import Dict, List, Optional

from pydantic import BaseModel, ConfigDict


class Report(BaseModel):
    # inf se escribe como Infinity en el JSON
    model_config = ConfigDict(ser_json_inf_nan="constants")


class ValidationReport(Report):
    states: List[str]
    n: int
    irreducible: bool
    reversible: bool
    pi: List[float]
    f_centered: List[float]
    nu: List[float]


class SpectrumReport(Report):
    states: List[str]
    eigenvalues: List[float]
    gap: float
    sigma_hat_sq: float
    var_pi: float
    pi: List[float]
    reversible: bool


class SeriesErrorRow(Report):
    r: float
    partial_sum: float
    lambda0: float
    error: float


class SeriesReport(Report):
    order: int
    coefficients: List[float]
    coefficient_bounds: List[float]
    rows: List[SeriesErrorRow]


class SharpnessRow(Report):
    u: float
    t: float
    lambda0_star: float
    log_p_over_t: Optional[float]
    gap: Optional[float]


class CompareSummary(Report):
    model: str
    seed: int
    samples: int
    t_values: List[float]
    u_grid: List[float]
    families: List[str]
    cells: int
    domination: Dict[str, bool]
    all_dominated: bool
    reversible: bool
    sharpness: List[SharpnessRow] = []
