"""Neutron spin-orbit simulation: mode expansions, elements, concurrence."""

__version__ = "0.1.0"

__all__ = [
    "analysis",
    "checks",
    "cli",
    "config",
    "elements",
    "errors",
    "numerics",
    "pipeline",
    "report",
]
