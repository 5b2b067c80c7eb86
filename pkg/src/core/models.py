#!/usr/bin/env python3
"""
Shared data models: run manifests and output units
"""

import hashlib
from enum import Enum
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field


class Unit(str, Enum):
    """Units attached to every numeric output"""
    BITS = "bits"
    NATS = "nats"
    DIAMOND = "diamond"
    GATES = "gates"
    PROBABILITY = "probability"
    COUNT = "count"
    RADIANS = "radians"
    RATIO = "ratio"
    SECONDS = "seconds"


class RunManifest(BaseModel):
    """Reproducibility record emitted with every CLI run"""
    command: str = Field(..., description="Subcommand path, e.g. 'bounds lower'")
    arguments: Dict[str, Any] = Field(default_factory=dict, description="Full argument echo")
    seed: Optional[int] = Field(None, description="Seed for stochastic commands")
    tool_version: str = Field(..., description="Toolkit version")
    wall_time_s: float = Field(0.0, description="Wall-clock run time in seconds")
    output_digests: Dict[str, str] = Field(default_factory=dict, description="SHA-256 of each output")

    def add_digest(self, name: str, payload: str) -> None:
        self.output_digests[name] = hashlib.sha256(payload.encode("utf-8")).hexdigest()


class Envelope(BaseModel):
    """JSON wrapper for single results printed to stdout"""
    command: str
    result: Dict[str, Any]
    units: Dict[str, Unit] = Field(default_factory=dict)
    notes: List[str] = Field(default_factory=list)
