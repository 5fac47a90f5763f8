"""Run configuration and physical constants.

Values resolve the same way everywhere: explicit overrides first, then the
key=value config file (``--config`` or ``SPINORBIT_CONFIG``), then defaults.
"""
from __future__ import annotations

import logging
import os
from pathlib import Path
from typing import Any, Dict, Literal, Mapping, Optional

from pydantic import BaseModel, ConfigDict, Field

from .errors import ParameterError

LOGGER = logging.getLogger(__name__)

CONFIG_ENV_VAR = "SPINORBIT_CONFIG"
CONSTANT_KEYS = ("gamma_n", "mass_n", "hbar")


class PhysicalConstants(BaseModel):
    """Neutron constants in SI units; gamma_n is the gyromagnetic ratio magnitude."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    gamma_n: float = Field(1.83247171e8, gt=0, description="rad/(s*T)")
    mass_n: float = Field(1.67492749804e-27, gt=0, description="kg")
    hbar: float = Field(1.054571817e-34, gt=0, description="J*s")


class RunConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    constants: PhysicalConstants = Field(default_factory=PhysicalConstants)
    sigma_perp: float = Field(100e-9, gt=0, description="transverse coherence length, m")
    quadrature_order: int = Field(128, ge=8, le=512)
    n_max_spp: int = Field(200, ge=0, le=500)
    n_max_quad: int = Field(60, ge=0, le=500)
    ell_window: int = Field(50, ge=1, le=500)
    min_captured_probability: float = Field(0.998, gt=0.0, le=1.0)
    output_path: Optional[Path] = None
    format: Literal["csv", "jsonl"] = "csv"

    def metadata(self) -> Dict[str, str]:
        """Fields that influence computed values, as output metadata."""

        flat: Dict[str, str] = {}
        for key in CONSTANT_KEYS:
            flat[key] = repr(getattr(self.constants, key))
        for key in (
            "sigma_perp",
            "quadrature_order",
            "n_max_spp",
            "n_max_quad",
            "ell_window",
            "min_captured_probability",
        ):
            flat[key] = repr(getattr(self, key))
        return flat


def parse_config_text(text: str) -> Dict[str, str]:
    """Parse flat ``key=value`` lines; blank lines and ``#`` comments are skipped."""

    values: Dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep or not key.strip():
            raise ParameterError(f"config line {lineno}: expected key=value, got {raw!r}")
        values[key.strip()] = value.strip()
    return values


def _structure(flat: Mapping[str, Any]) -> Dict[str, Any]:
    structured: Dict[str, Any] = {}
    constants: Dict[str, Any] = {}
    for key, value in flat.items():
        if value is None:
            continue
        if key in CONSTANT_KEYS:
            constants[key] = value
        else:
            structured[key] = value
    if constants:
        structured["constants"] = constants
    return structured


def load_run_config(
    path: Optional[Path] = None,
    overrides: Optional[Mapping[str, Any]] = None,
) -> RunConfig:
    """Build a RunConfig from defaults, an optional file and explicit overrides."""

    if path is None:
        env_path = os.getenv(CONFIG_ENV_VAR)
        path = Path(env_path) if env_path else None

    merged: Dict[str, Any] = {}
    if path is not None:
        LOGGER.info("Loading run configuration from %s", path)
        merged.update(parse_config_text(Path(path).read_text(encoding="utf-8")))

    for key, value in (overrides or {}).items():
        if value is not None:
            merged[key] = value

    structured = _structure(merged)
    if "constants" in structured:
        structured["constants"] = PhysicalConstants(**structured["constants"])
    return RunConfig(**structured)


__all__ = [
    "CONFIG_ENV_VAR",
    "PhysicalConstants",
    "RunConfig",
    "load_run_config",
    "parse_config_text",
]
