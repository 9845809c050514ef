"""Deterministic result tables with CSV and JSON emission.

Every run produces a :class:`ResultTable`: named columns (each name
carries a unit suffix like ``_hz`` or ``_atoms``), float rows, and a
metadata block holding the fully resolved configuration so any table
can be reproduced from its own file.  Formatting uses shortest
round-trip float representation, so identical runs emit byte-identical
payloads regardless of worker count; the only varying element is the
creation timestamp, which lives in the metadata block, outside the data
payload of the CSV form.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Sequence

#: Unit suffixes a column name may end with (schema-checked in tests).
UNIT_SUFFIXES = (
    "_hz", "_rad_per_s", "_s", "_per_s", "_atoms", "_dimensionless",
    "_g_per_cm", "_j", "_w_per_m2", "_m", "_w", "_counts_per_s",
    "_counts_per_photon",
)


class TableError(ValueError):
    """Raised for malformed tables or unknown output formats."""


@dataclass
class ResultTable:
    """Column-named numeric table plus reproducibility metadata."""

    columns: list[str]
    rows: list[list[float]]
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        for name in self.columns:
            if not any(name.endswith(suffix) for suffix in UNIT_SUFFIXES):
                raise TableError(f"column {name!r} lacks a unit suffix")
        width = len(self.columns)
        for i, row in enumerate(self.rows):
            if len(row) != width:
                raise TableError(f"row {i} has {len(row)} values, expected {width}")

    def column(self, name: str) -> list[float]:
        idx = self.columns.index(name)
        return [row[idx] for row in self.rows]

    @property
    def cell_errors(self) -> list:
        return self.metadata.get("cell_errors", [])

    def check_finite(self) -> None:
        """Assert finiteness of all values on rows not flagged as failed."""
        flag_idx = (self.columns.index("error_flag_dimensionless")
                    if "error_flag_dimensionless" in self.columns else None)
        for i, row in enumerate(self.rows):
            if flag_idx is not None and row[flag_idx] != 0.0:
                continue
            for name, value in zip(self.columns, row):
                if not math.isfinite(value):
                    raise TableError(f"non-finite value {value!r} in row {i}, column {name}")

    # -- emission -----------------------------------------------------------

    def csv_payload(self) -> bytes:
        """Data payload: header line plus rows, RFC-4180, '\\n' endings."""
        lines = [",".join(self.columns)]
        for row in self.rows:
            lines.append(",".join(_format_value(v) for v in row))
        return ("\n".join(lines) + "\n").encode()

    def to_csv(self) -> bytes:
        """Full CSV file: '#'-prefixed metadata comments, then the payload."""
        meta = json.dumps(self.metadata, sort_keys=True, separators=(",", ":"),
                          allow_nan=False, default=_json_safe)
        head = f"# srmot-result 1\n# metadata {meta}\n".encode()
        return head + self.csv_payload()

    def to_json(self) -> bytes:
        doc = {
            "format": "srmot-result",
            "version": 1,
            "metadata": self.metadata,
            "columns": self.columns,
            "rows": [[_json_value(v) for v in row] for row in self.rows],
        }
        return (json.dumps(doc, sort_keys=True, separators=(",", ":"),
                           allow_nan=False, default=_json_safe) + "\n").encode()

    def write(self, path, fmt: str = "csv") -> None:
        if fmt == "csv":
            data = self.to_csv()
        elif fmt == "json":
            data = self.to_json()
        else:
            raise TableError(f"unknown output format {fmt!r} (use csv or json)")
        with open(path, "wb") as fh:
            fh.write(data)

    @classmethod
    def read_csv(cls, path) -> "ResultTable":
        """Read back a CSV table written by :meth:`write`."""
        metadata = {}
        columns: list[str] = []
        rows: list[list[float]] = []
        with open(path, "r", encoding="utf-8") as fh:
            for line in fh:
                line = line.rstrip("\n")
                if line.startswith("# metadata "):
                    metadata = json.loads(line[len("# metadata "):])
                    continue
                if line.startswith("#") or not line:
                    continue
                if not columns:
                    columns = line.split(",")
                else:
                    rows.append([float(v) for v in line.split(",")])
        return cls(columns=columns, rows=rows, metadata=metadata)


def _format_value(value: float) -> str:
    if isinstance(value, float) and math.isnan(value):
        return "nan"
    return repr(float(value))


def _json_value(value: float):
    value = float(value)
    return value if math.isfinite(value) else None


def _json_safe(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    raise TypeError(f"not JSON serializable: {obj!r}")


def timestamp_metadata() -> dict:
    """Creation-time block, excluded from determinism comparisons."""
    return {"created_utc": datetime.now(timezone.utc).isoformat()}
