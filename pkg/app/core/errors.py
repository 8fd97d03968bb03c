class MJPError(Exception):
    """
    Error base del proyecto. Cada subclase declara el código de salida que usa la CLI.
    """
    exit_code: int = 1

    def __init__(self, detail: str):
        super().__init__(detail)
        self.detail = detail


# --- Errores de validación (código 2) ---

class ModelValidationError(MJPError):
    exit_code = 2


class NonSquareError(ModelValidationError):
    def __init__(self, shape):
        super().__init__(f"La matriz Q debe ser cuadrada, se recibió forma {tuple(shape)}")


class StateSpaceTooSmallError(ModelValidationError):
    def __init__(self, n: int):
        super().__init__(f"Se necesitan al menos 2 estados, se recibieron {n}")


class NonFiniteRateError(ModelValidationError):
    def __init__(self):
        super().__init__("La matriz Q contiene entradas no finitas")


class NegativeRateError(ModelValidationError):
    def __init__(self, x: int, y: int, value: float):
        self.x, self.y, self.value = x, y, value
        super().__init__(f"Tasa negativa q[{x}][{y}] = {value}")


class RowSumViolationError(ModelValidationError):
    def __init__(self, x: int, row_sum: float):
        self.x, self.row_sum = x, row_sum
        super().__init__(f"La fila {x} de Q suma {row_sum} (debe sumar 0)")


class NotIrreducibleError(ModelValidationError):
    def __init__(self):
        super().__init__("La cadena no es irreducible")


class NotCenteredError(ModelValidationError):
    def __init__(self, mean: float):
        super().__init__(f"El observable no está centrado: π(f) = {mean}")


class ConstantObservableError(ModelValidationError):
    def __init__(self):
        super().__init__("El observable centrado es idénticamente cero")


class ZeroHorizonError(ModelValidationError):
    def __init__(self):
        super().__init__("El horizonte de la trayectoria es 0")


class DimensionTooLargeError(ModelValidationError):
    def __init__(self, n: int, limit: int):
        super().__init__(f"Dimensión {n} mayor que el límite {limit} de este oráculo")


class InfeasibleSliceError(ModelValidationError):
    def __init__(self, u: float, lo: float, hi: float):
        super().__init__(f"u = {u} fuera de [min f, max f] = [{lo}, {hi}]")


class OutOfRangeError(ModelValidationError):
    pass


class DomainError(ModelValidationError):
    pass


class OrderTooLargeError(ModelValidationError):
    def __init__(self, order: int, limit: int):
        super().__init__(f"Orden {order} mayor que el máximo permitido {limit}")


class TooLargeError(ModelValidationError):
    def __init__(self, n: int, limit: int):
        super().__init__(f"n = {n} mayor que el límite de enumeración {limit}")


class FSobolevNotVerifiedError(ModelValidationError):
    def __init__(self, verdict: str):
        super().__init__(
            f"La desigualdad F-Sobolev no está verificada (veredicto: {verdict}); use assume para forzarla"
        )


class PoincareConstantError(ModelValidationError):
    def __init__(self, constant: float, minimum: float):
        super().__init__(f"La constante de Poincaré {constant} es menor que 1/λ₁ = {minimum}")


class ModelParseError(ModelValidationError):
    def __init__(self, field: str, reason: str):
        self.field = field
        super().__init__(f"Error al leer el modelo en '{field}': {reason}")


class ConfigError(ModelValidationError):
    pass


# --- Errores numéricos (código 3) ---

class NumericalError(MJPError):
    exit_code = 3


class SingularSystemError(NumericalError):
    def __init__(self):
        super().__init__("Sistema singular al calcular la distribución invariante")


class DegenerateGapError(NumericalError):
    def __init__(self, second: float):
        super().__init__(f"Brecha espectral degenerada: segundo autovalor = {second}")


class NonFiniteError(NumericalError):
    def __init__(self, r: float):
        super().__init__(f"La función devolvió un valor no finito en r = {r}")


# --- Fallo de dominación (código 4) ---

class DominationError(MJPError):
    exit_code = 4
