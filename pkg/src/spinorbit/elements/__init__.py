"""Optical elements acting on spin-orbit states."""

__all__ = ["quadrupole", "ramsey", "spp"]
