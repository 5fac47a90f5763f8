"""Sweep tables and their CSV / JSON-lines exporters."""

__all__ = ["exporters", "table"]
