import math
from typing import Callable, NamedTuple

INV_PHI = (math.sqrt(5) - 1) / 2
INV_PHI_SQUARE = (3 - math.sqrt(5)) / 2

GOLDEN_TOL = 1e-11
MAX_ITERATIONS = 400


class GoldenResult(NamedTuple):
    argmax: float
    maximum: float
    iterations: int
    converged: bool


def golden_section_max(
    func: Callable[[float], float],
    lo: float,
    hi: float,
    tol: float = GOLDEN_TOL,
    max_iterations: int = MAX_ITERATIONS,
) -> GoldenResult:
    """
    Búsqueda de sección áurea del máximo de una función unimodal en [lo, hi].

    Los extremos también se evalúan: si alguno supera al punto interior
    encontrado, se devuelve ese extremo.
    """
    lo, hi = min(lo, hi), max(lo, hi)
    f_lo, f_hi = func(lo), func(hi)
    a, b = lo, hi
    h = b - a
    threshold = tol * max(1.0, abs(lo), abs(hi))
    if h <= threshold:
        best = (lo, f_lo) if f_lo >= f_hi else (hi, f_hi)
        return GoldenResult(best[0], best[1], 0, True)

    c = a + INV_PHI_SQUARE * h
    d = a + INV_PHI * h
    yc, yd = func(c), func(d)

    iteration = 0
    while h > threshold and iteration < max_iterations:
        if yc > yd:
            b, d, yd = d, c, yc
            h = INV_PHI * h
            c = a + INV_PHI_SQUARE * h
            yc = func(c)
        else:
            a, c, yc = c, d, yd
            h = INV_PHI * h
            d = a + INV_PHI * h
            yd = func(d)
        iteration += 1

    x_best, y_best = (c, yc) if yc >= yd else (d, yd)
    if f_lo > y_best:
        x_best, y_best = lo, f_lo
    if f_hi > y_best:
        x_best, y_best = hi, f_hi
    return GoldenResult(x_best, y_best, iteration, iteration < max_iterations)
