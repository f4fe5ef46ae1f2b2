"""Reader for the experiment-table schema: '# key=value' metadata lines,
one header row, then numeric rows with '.' decimals."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np


class SchemaError(ValueError):
    """The file does not carry the expected table schema."""


@dataclass(frozen=True)
class Table:
    metadata: dict
    columns: dict

    def require(self, *names: str) -> None:
        for name in names:
            if name not in self.columns:
                raise SchemaError(f"missing column {name!r}")

    def column(self, name: str) -> np.ndarray:
        if name not in self.columns:
            raise SchemaError(f"missing column {name!r}")
        return self.columns[name]


def read_table(path) -> Table:
    path = Path(path)
    metadata: dict = {}
    header: list | None = None
    rows: list = []
    with path.open(encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line:
                continue
            if line.startswith("#"):
                if header is not None:
                    raise SchemaError(f"metadata after header at line {line_no}")
                key, sep, value = line.lstrip("# ").partition("=")
                if not sep:
                    raise SchemaError(f"malformed metadata line {line_no}: {line!r}")
                metadata[key.strip()] = value.strip()
                continue
            if header is None:
                header = line.split(",")
                continue
            cells = line.split(",")
            if len(cells) != len(header):
                raise SchemaError(
                    f"row at line {line_no} has {len(cells)} cells, expected {len(header)}"
                )
            try:
                rows.append([float(c) for c in cells])
            except ValueError as exc:
                raise SchemaError(f"non-numeric cell at line {line_no}: {exc}") from exc
    if "iflab" not in metadata:
        raise SchemaError("missing '# iflab=<version>' metadata line")
    if "family" not in metadata:
        raise SchemaError("missing 'family' metadata entry")
    if header is None:
        raise SchemaError("no header row found")
    data = np.asarray(rows, dtype=float) if rows else np.empty((0, len(header)))
    columns = {name: data[:, i] for i, name in enumerate(header)}
    return Table(metadata=metadata, columns=columns)
