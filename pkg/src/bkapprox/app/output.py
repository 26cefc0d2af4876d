"""Tabular results with deterministic CSV and JSON rendering."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Any


@dataclass
class Table:
    """Rows keyed by ``columns``; ``notes`` carry warnings that must reach the reader."""

    name: str
    columns: tuple[str, ...]
    rows: list[dict[str, Any]] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)
    meta: dict[str, Any] = field(default_factory=dict)
    # Wall-clock measurements; kept out of the rendered output so it stays reproducible.
    timing: dict[str, float] = field(default_factory=dict, compare=False)

    def add(self, **row: Any) -> None:
        unknown = set(row) - set(self.columns)
        if unknown:
            raise KeyError(f"unknown columns for table {self.name!r}: {sorted(unknown)}")
        self.rows.append({c: row.get(c) for c in self.columns})

    def column(self, name: str) -> list[Any]:
        return [r[name] for r in self.rows]

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "columns": list(self.columns),
            "rows": [[_clean(r[c]) for c in self.columns] for r in self.rows],
            "notes": list(self.notes),
            "meta": self.meta,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> Table:
        columns = tuple(data["columns"])
        rows = [dict(zip(columns, values)) for values in data["rows"]]
        return cls(data["name"], columns, rows, list(data.get("notes", [])), dict(data.get("meta", {})))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=False) + "\n"

    def to_csv(self) -> str:
        """Header row, LF endings; notes become leading ``#`` comment lines."""
        buf = io.StringIO()
        for note in self.notes:
            buf.write(f"# {note}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.columns)
        for r in self.rows:
            writer.writerow(["" if r[c] is None else _clean(r[c]) for c in self.columns])
        return buf.getvalue()

    def render(self, fmt: str) -> str:
        if fmt == "csv":
            return self.to_csv()
        if fmt == "json":
            return self.to_json()
        raise ValueError(f"unknown format {fmt!r}; use csv or json")


def _clean(value: Any) -> Any:
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value
