"""Tabular results of parameter sweeps."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Sequence, Tuple

import pandas as pd

from ..errors import ParameterError

SCHEMA_VERSION = "spinorbit-sweep/1"


@dataclass
class SweepTable:
    """Ordered rows of (sweep parameter, observables) plus run metadata."""

    column_names: Tuple[str, ...]
    rows: List[Tuple[float, ...]]
    metadata: Dict[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.column_names = tuple(self.column_names)
        self.rows = [tuple(float(v) for v in row) for row in self.rows]
        width = len(self.column_names)
        for index, row in enumerate(self.rows):
            if len(row) != width:
                raise ParameterError(
                    f"row {index} has {len(row)} values, expected {width} ({self.column_names})"
                )
        self.metadata = {str(k): str(v) for k, v in self.metadata.items()}

    def __len__(self) -> int:
        return len(self.rows)

    def column(self, name: str) -> List[float]:
        index = self.column_names.index(name)
        return [row[index] for row in self.rows]

    def select(self, names: Sequence[str]) -> "SweepTable":
        indices = [self.column_names.index(name) for name in names]
        return SweepTable(
            column_names=tuple(names),
            rows=[tuple(row[i] for i in indices) for row in self.rows],
            metadata=dict(self.metadata),
        )

    def argmax(self, name: str) -> Tuple[float, ...]:
        """Row holding the largest value of column ``name`` (first one on ties)."""

        values = self.column(name)
        if not values:
            raise ParameterError("empty table has no maximum")
        best = max(range(len(values)), key=lambda i: (values[i], -i))
        return self.rows[best]

    def with_metadata(self, extra: Mapping[str, object]) -> "SweepTable":
        merged = dict(self.metadata)
        merged.update({str(k): str(v) for k, v in extra.items()})
        return SweepTable(column_names=self.column_names, rows=list(self.rows), metadata=merged)

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame(self.rows, columns=list(self.column_names))
        frame.attrs.update(self.metadata)
        return frame

    @classmethod
    def from_records(
        cls, records: Iterable[Mapping[str, float]], column_names: Sequence[str], **metadata: object
    ) -> "SweepTable":
        rows = [tuple(record[name] for name in column_names) for record in records]
        return cls(column_names=tuple(column_names), rows=rows, metadata={k: str(v) for k, v in metadata.items()})


__all__ = ["SCHEMA_VERSION", "SweepTable"]
