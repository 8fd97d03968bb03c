import json
import logging
try:
    import tomllib
except ImportError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path
from typing import Any, Dict, Optional, Union

from pydantic import ValidationError

from app.core.errors import ConfigError, ModelParseError, NegativeRateError
from app.models.markov import MJPModel
from app.schemas.config_schema import RunConfig
from app.schemas.model_schema import ModelFile
from app.services.markov_service import MarkovService

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def _read_document(path: Path) -> Dict[str, Any]:
    """
    Lee un archivo JSON o TOML según la extensión.
    """
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ModelParseError(str(path), f"no se pudo leer el archivo: {e}") from e

    suffix = path.suffix.lower()
    if suffix == ".toml":
        try:
            return tomllib.loads(text)
        except tomllib.TOMLDecodeError as e:
            raise ModelParseError("toml", str(e)) from e
    if suffix == ".json":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise ModelParseError(f"línea {e.lineno}", e.msg) from e
        if not isinstance(data, dict):
            raise ModelParseError("raíz", "se esperaba un objeto")
        return data
    raise ModelParseError(str(path), f"extensión no soportada '{suffix}' (use .json o .toml)")


def _field_name(error: Dict[str, Any]) -> str:
    loc = ".".join(str(part) for part in error.get("loc", ()))
    return loc or "modelo"


class ModelService:

    @staticmethod
    def load_model(path: PathLike, tol: Optional[float] = None) -> MJPModel:
        """
        Lee y valida un modelo: irreducible, π calculada, f centrado y ν por defecto δ en el primer estado.
        """
        path = Path(path)
        data = _read_document(path)
        try:
            document = ModelFile.model_validate(data)
        except ValidationError as e:
            first = e.errors()[0]
            raise ModelParseError(_field_name(first), first["msg"]) from e

        try:
            q = MarkovService.validate_q_matrix(document.q, tol)
        except NegativeRateError as e:
            raise ModelParseError(f"q[{e.x}][{e.y}]", e.detail) from e

        model = MarkovService.build_model(q, document.f, document.nu, document.states, document.seed)
        logger.info(f"Modelo cargado desde {path}: {model.n} estados")
        return model

    @staticmethod
    def save_model(model: MJPModel, path: PathLike) -> Path:
        """
        Escribe el modelo normalizado en JSON. Volver a cargarlo da arreglos idénticos bit a bit.
        """
        path = Path(path)
        payload = ModelFile(
            states=model.labels,
            q=model.q.rates.tolist(),
            f=model.f.values.tolist(),
            nu=model.nu.weights.tolist(),
            seed=model.seed,
        )
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(payload.model_dump(exclude_none=True), indent=2), encoding="utf-8")
        logger.info(f"Modelo guardado en {path}")
        return path

    @staticmethod
    def read_config(path: PathLike) -> Dict[str, Any]:
        try:
            return _read_document(Path(path))
        except ModelParseError as e:
            raise ConfigError(f"Archivo de configuración inválido: {e.detail}") from e

    @staticmethod
    def build_config(values: Dict[str, Any]) -> RunConfig:
        try:
            return RunConfig.model_validate(values)
        except ValidationError as e:
            first = e.errors()[0]
            raise ConfigError(f"Configuración inválida en '{_field_name(first)}': {first['msg']}") from e
