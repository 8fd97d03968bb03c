import csv
import logging
import math
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, Iterable, List, Sequence

from pydantic import BaseModel

logger = logging.getLogger(__name__)


def format_value(value: Any) -> str:
    """
    Floats con 17 cifras significativas; infinitos como inf / -inf.
    """
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return format(value, ".17g")
    if value is None:
        return ""
    return str(value)


class ResultsService:

    @staticmethod
    def timestamp_line() -> str:
        return f"# generated {datetime.now(timezone.utc).isoformat()}"

    @staticmethod
    def start_table(path: Path, columns: Sequence[str], timestamp: bool = True) -> Path:
        """
        Crea el CSV con su encabezado (y la línea de fecha salvo que se desactive).
        """
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="", encoding="utf-8") as fh:
            if timestamp:
                fh.write(ResultsService.timestamp_line() + "\n")
            csv.writer(fh).writerow(columns)
        return path

    @staticmethod
    def append_row(path: Path, columns: Sequence[str], row: Dict[str, Any]) -> None:
        # Una fila por llamada; se vacía el búfer al cerrar para poder reanudar por celda
        with Path(path).open("a", newline="", encoding="utf-8") as fh:
            csv.writer(fh).writerow([format_value(row.get(c)) for c in columns])

    @staticmethod
    def write_table(path: Path, columns: Sequence[str], rows: Iterable[Dict[str, Any]], timestamp: bool = True) -> Path:
        path = ResultsService.start_table(path, columns, timestamp)
        with path.open("a", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            for row in rows:
                writer.writerow([format_value(row.get(c)) for c in columns])
        logger.info(f"Resultados escritos en {path}")
        return path

    @staticmethod
    def read_table(path: Path) -> List[Dict[str, str]]:
        """
        Lee un CSV propio ignorando las líneas de comentario.
        """
        with Path(path).open(newline="", encoding="utf-8") as fh:
            lines = [line for line in fh if not line.startswith("#")]
        return list(csv.DictReader(lines))

    @staticmethod
    def write_json(path: Path, report: BaseModel) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(report.model_dump_json(indent=2), encoding="utf-8")
        logger.info(f"Resumen escrito en {path}")
        return path
