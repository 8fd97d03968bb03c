from dotenv import load_dotenv
import os

load_dotenv()


def _env_int(name: str, default: int) -> int:
    raw = os.getenv(name)
    return int(raw) if raw not in (None, "") else default


def _env_float(name: str, default: float) -> float:
    raw = os.getenv(name)
    return float(raw) if raw not in (None, "") else default


class Settings:
    MJP_THREADS: int = _env_int("MJP_THREADS", os.cpu_count() or 1)
    MJP_SEED: int = _env_int("MJP_SEED", 0)
    MJP_LOG_LEVEL: str = os.getenv("MJP_LOG_LEVEL", "INFO")
    MJP_ROW_SUM_TOL: float = _env_float("MJP_ROW_SUM_TOL", 1e-12)
    MJP_BLOCK_SIZE: int = _env_int("MJP_BLOCK_SIZE", 4096)

settings = Settings()
