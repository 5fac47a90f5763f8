"""Derived quantities of spin-orbit states."""

__all__ = ["entanglement"]
