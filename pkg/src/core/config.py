#!/usr/bin/env python3
"""
Runtime configuration loaded from environment variables (and an optional .env file)
"""

import os
import logging
from functools import lru_cache
from typing import Optional

from dotenv import load_dotenv
from pydantic import BaseModel, Field

logger = logging.getLogger(__name__)


class Settings(BaseModel):
    """Toolkit settings; every field has a QPROG_* environment variable"""

    threads: int = Field(1, ge=1, description="Parallelism cap for Monte-Carlo and sweeps")
    dense_max_qubits: int = Field(12, ge=1, description="Largest N for dense circuit evaluation")
    verify_max_qubits: int = Field(10, ge=1, description="Largest N for dense verification checks")
    net_scan_limit: int = Field(100_000, ge=1, description="Largest net scanned exhaustively")
    unitary_tol: float = Field(1e-10, gt=0, description="Operator-norm tolerance for unitarity")
    log_level: str = Field("INFO", description="Root logging level")

    @classmethod
    def from_env(cls) -> "Settings":
        values = {
            "threads": os.getenv("QPROG_THREADS", "1"),
            "dense_max_qubits": os.getenv("QPROG_DENSE_MAX_QUBITS", "12"),
            "verify_max_qubits": os.getenv("QPROG_VERIFY_MAX_QUBITS", "10"),
            "net_scan_limit": os.getenv("QPROG_NET_SCAN_LIMIT", "100000"),
            "unitary_tol": os.getenv("QPROG_UNITARY_TOL", "1e-10"),
            "log_level": os.getenv("QPROG_LOG_LEVEL", "INFO").upper(),
        }
        return cls(**values)


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    settings = Settings.from_env()
    logger.debug(f"Loaded settings: {settings.model_dump()}")
    return settings


def reload_settings(env_file: Optional[str] = None) -> Settings:
    """Re-read the environment, optionally loading a .env file first"""
    if env_file and os.path.exists(env_file):
        load_dotenv(env_file, override=True)
        logger.info(f"Loaded configuration from {env_file}")
    get_settings.cache_clear()
    return get_settings()
