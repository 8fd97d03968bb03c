import math
from typing import Callable, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy.special import logsumexp


class TiltedEval(BaseModel):
    r: float
    lambda0: float


class ConjugateResult(BaseModel):
    """
    Resultado de un conjugado de Fenchel sup_r (r·u - G(r)).
    """
    u: float
    value: float = Field(ge=0.0)
    argmax_r: Optional[float] = None
    converged: bool = True
    finite: bool = True
    boundary: bool = False


class BernsteinParams(BaseModel):
    v: float = Field(ge=0.0)  # factor de varianza
    c: float = Field(ge=0.0)  # parámetro de escala


class FSobolevFunction(BaseModel):
    """
    Función F creciente y cóncava con F(1) = 0, junto con su inversa y el límite F(0).

    `composite`, si se da, evalúa r ↦ F(π(F⁻¹(r·f))) de forma estable.
    """
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    name: str
    func: Callable[[np.ndarray], np.ndarray]
    inverse: Callable[[np.ndarray], np.ndarray]
    at_zero: float
    composite: Optional[Callable[[float, np.ndarray, np.ndarray], float]] = None

    def scaled(self, factor: float) -> "FSobolevFunction":
        return FSobolevFunction(
            name=f"{factor}*{self.name}",
            func=lambda x: factor * self.func(x),
            inverse=lambda y: self.inverse(y / factor),
            at_zero=factor * self.at_zero,
            composite=(
                (lambda r, f, pi: factor * self.composite(r / factor, f, pi))
                if self.composite is not None else None
            ),
        )

    @classmethod
    def log_sobolev(cls, constant: float) -> "FSobolevFunction":
        """
        F = C·log. Entonces F(π(F⁻¹(r f))) = C·log π(exp(r f / C)).
        """
        def composite(r: float, f: np.ndarray, pi: np.ndarray) -> float:
            return constant * float(logsumexp(r * f / constant, b=pi))

        return cls(
            name=f"{constant}*log",
            func=lambda x: constant * np.log(x),
            inverse=lambda y: np.exp(y / constant),
            at_zero=-math.inf,
            composite=composite,
        )
