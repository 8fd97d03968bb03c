from typing import List, Tuple

from pydantic import BaseModel


class SeriesCoefficients(BaseModel):
    """
    Coeficientes λ₀⁽¹⁾..λ₀⁽ᴺ⁾ de la serie de perturbación de λ₀(r).
    coeffs[k] corresponde al orden k + 1.
    """
    coeffs: List[float]
    order: int
    labels: List[str] = []

    def coefficient(self, n: int) -> float:
        return self.coeffs[n - 1]


class CompositionClass(BaseModel):
    representative: Tuple[int, ...]
    size: int
    zeros: int
    adjacent_zeros: bool
