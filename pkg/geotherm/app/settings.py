"""Configuration settings read from the environment (and an optional .env file)."""

import os
from functools import lru_cache
from typing import Optional

from dotenv import load_dotenv

load_dotenv()


def _int_env(name: str, default: Optional[int]) -> Optional[int]:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"{name} must be an integer, got {raw!r}")


class Settings:
    # Cap on terms in any single generalized polynomial
    MAX_TERMS: int = 200_000

    # Sweep concurrency; None lets joblib decide
    THREADS: Optional[int] = None

    OUTPUT_DIR: str = "./out"

    def __init__(self):
        self.MAX_TERMS = _int_env("GEOTHERM_MAX_TERMS", self.MAX_TERMS)
        self.THREADS = _int_env("GEOTHERM_THREADS", self.THREADS)
        self.OUTPUT_DIR = os.getenv("GEOTHERM_OUTPUT_DIR", self.OUTPUT_DIR)

        if self.THREADS is not None and self.THREADS < 1:
            raise ValueError(f"GEOTHERM_THREADS must be >= 1, got {self.THREADS}")
        if self.MAX_TERMS < 1:
            raise ValueError(f"GEOTHERM_MAX_TERMS must be >= 1, got {self.MAX_TERMS}")


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    return Settings()
