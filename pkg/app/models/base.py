import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator


def frozen_array(value, dtype=float) -> np.ndarray:
    """
    Copia el valor a un arreglo de numpy de solo lectura.
    """
    arr = np.array(value, dtype=dtype, copy=True)
    arr.flags.writeable = False
    return arr


class ArrayModel(BaseModel):
    """
    Base para los tipos de dominio que guardan arreglos de numpy.
    Los campos ndarray se copian y se marcan como solo lectura al construir.
    """
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    @field_validator("*", mode="before")
    @classmethod
    def _freeze_arrays(cls, value):
        if isinstance(value, np.ndarray):
            return frozen_array(value, dtype=value.dtype)
        return value
