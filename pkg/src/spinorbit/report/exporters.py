"""Write sweep tables as CSV (with # metadata) or JSON lines."""
from __future__ import annotations

import io
import json
import logging
from pathlib import Path
from typing import List, Optional

from .table import SCHEMA_VERSION, SweepTable

LOGGER = logging.getLogger(__name__)

FORMATS = ("csv", "jsonl")


def metadata_lines(table: SweepTable) -> List[str]:
    lines = [f"# schema: {SCHEMA_VERSION}"]
    for key in sorted(table.metadata):
        lines.append(f"# {key}: {table.metadata[key]}")
    return lines


def render_csv(table: SweepTable) -> str:
    """Metadata comment lines, then the header and rows in full float precision."""

    buffer = io.StringIO()
    for line in metadata_lines(table):
        buffer.write(line + "\n")
    table.to_frame().to_csv(buffer, index=False, lineterminator="\n")
    return buffer.getvalue()


def render_jsonl(table: SweepTable) -> str:
    header = {"schema": SCHEMA_VERSION, "metadata": dict(sorted(table.metadata.items()))}
    lines = [json.dumps(header)]
    for row in table.rows:
        lines.append(json.dumps(dict(zip(table.column_names, row))))
    return "\n".join(lines) + "\n"


def render(table: SweepTable, fmt: str = "csv") -> str:
    if fmt == "csv":
        return render_csv(table)
    if fmt == "jsonl":
        return render_jsonl(table)
    raise ValueError(f"unknown output format {fmt!r}; expected one of {FORMATS}")


def export_table(table: SweepTable, path: Optional[Path], fmt: str = "csv") -> str:
    """Render ``table`` and write it to ``path`` when given; returns the text."""

    text = render(table, fmt)
    if path is not None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
        LOGGER.info("Wrote %d rows to %s", len(table), path)
    return text


__all__ = ["FORMATS", "export_table", "metadata_lines", "render", "render_csv", "render_jsonl"]
