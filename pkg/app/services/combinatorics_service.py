import logging
import math
from collections import Counter
from itertools import combinations
from typing import Dict, Iterator, List, Tuple

from app.core.errors import DomainError, NumericalError, OutOfRangeError, TooLargeError
from app.models.series import CompositionClass

logger = logging.getLogger(__name__)

MAX_ENUMERATION = 14
PHI_RADIUS = 1.0 / 3.0


def canonical_rotation(parts: Tuple[int, ...]) -> Tuple[int, ...]:
    """
    Representante canónico de la clase de rotación: la rotación lexicográficamente mínima.
    """
    return min(parts[i:] + parts[:i] for i in range(len(parts)))


def has_adjacent_zeros(parts: Tuple[int, ...]) -> bool:
    # adyacencia cíclica
    n = len(parts)
    return any(parts[i] == 0 and parts[(i + 1) % n] == 0 for i in range(n))


class CombinatoricsService:

    @staticmethod
    def motzkin(count: int) -> List[int]:
        """
        m_0..m_N por la recurrencia m_n = m_{n-1} + Σ_{i+j=n-2} m_i m_j,
        que sale de comparar coeficientes en m(x) = 1 + x·m(x) + (x·m(x))².
        """
        if count < 0:
            raise OutOfRangeError(f"N debe ser no negativo, se recibió {count}")
        m = [1]
        for n in range(1, count + 1):
            m.append(m[n - 1] + sum(m[i] * m[n - 2 - i] for i in range(n - 1)))
        return m

    @staticmethod
    def motzkin_binomial(n: int) -> int:
        """
        m_n = Σ_k C(n, 2k)·(2k)!/(k!(k+1)!).
        """
        return sum(math.comb(n, 2 * k) * math.comb(2 * k, k) // (k + 1) for k in range(n // 2 + 1))

    @staticmethod
    def beta(n: int, m: int) -> int:
        """
        Número de clases de rotación de composiciones débiles de n-1 en n partes
        con m ceros no adyacentes: C(n-1, m)·C(n-1-m, n-2m)/(n-1).

        Se comprueba contra la forma alternativa (1/m)·C(n-m-1, m-1)·C(n-2, n-m-1).
        Para m > ⌊n/2⌋ vale 0.
        """
        if n < 2:
            raise OutOfRangeError(f"β(n, m) requiere n ≥ 2, se recibió n = {n}")
        if m < 1:
            raise OutOfRangeError(f"β(n, m) requiere m ≥ 1, se recibió m = {m}")
        if m > n // 2:
            return 0

        numerator = math.comb(n - 1, m) * math.comb(n - 1 - m, n - 2 * m)
        alternate = math.comb(n - m - 1, m - 1) * math.comb(n - 2, n - m - 1)
        if numerator % (n - 1) or alternate % m or numerator // (n - 1) != alternate // m:
            raise NumericalError(f"Las dos formas de β({n}, {m}) no coinciden")
        return numerator // (n - 1)

    @staticmethod
    def beta_n(n: int) -> int:
        return sum(CombinatoricsService.beta(n, m) for m in range(1, n // 2 + 1))

    @staticmethod
    def phi(x: float) -> float:
        """
        Φ(x) = ((1-x)/2)(1 - √(1 - 4x²/(1-x)²)) = Σ_{n≥2} β_n xⁿ en [0, 1/3].
        """
        if x < 0 or x > PHI_RADIUS + 1e-15:
            raise DomainError(f"Φ está definida en [0, 1/3], se recibió x = {x}")
        x = min(x, PHI_RADIUS)
        radicand = max(0.0, 1.0 - 4.0 * x * x / (1.0 - x) ** 2)
        return (1.0 - x) / 2.0 * (1.0 - math.sqrt(radicand))

    @staticmethod
    def weak_compositions(total: int, parts: int) -> Iterator[Tuple[int, ...]]:
        """
        Todas las tuplas de `parts` enteros no negativos que suman `total` (estrellas y barras).
        """
        for bars in combinations(range(total + parts - 1), parts - 1):
            previous = -1
            composition = []
            for bar in bars:
                composition.append(bar - previous - 1)
                previous = bar
            composition.append(total + parts - 2 - previous)
            yield tuple(composition)

    @staticmethod
    def enumerate_classes(n: int) -> List[CompositionClass]:
        """
        Clases de rotación de las composiciones débiles de n-1 en n partes.
        Como mcd(n, n-1) = 1, cada clase tiene exactamente n elementos.
        """
        if n < 2:
            raise OutOfRangeError(f"enumerate_classes requiere n ≥ 2, se recibió {n}")
        if n > MAX_ENUMERATION:
            raise TooLargeError(n, MAX_ENUMERATION)

        sizes = Counter(canonical_rotation(c) for c in CombinatoricsService.weak_compositions(n - 1, n))
        classes = []
        for representative in sorted(sizes):
            size = sizes[representative]
            if size != n:
                raise NumericalError(f"La clase {representative} tiene {size} elementos, se esperaban {n}")
            classes.append(
                CompositionClass(
                    representative=representative,
                    size=size,
                    zeros=representative.count(0),
                    adjacent_zeros=has_adjacent_zeros(representative),
                )
            )
        logger.debug(f"n={n}: {len(classes)} clases de rotación")
        return classes

    @staticmethod
    def zero_census(n: int) -> Dict[int, int]:
        """
        Número de clases con m ceros, ninguno adyacente, para cada m.
        """
        census: Dict[int, int] = Counter()
        for cls in CombinatoricsService.enumerate_classes(n):
            if not cls.adjacent_zeros:
                census[cls.zeros] += 1
        return dict(census)
