"""Tabular output shared by the CLI: CSV with a commented header, or JSON."""

from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Sequence, TextIO

import numpy as np

from . import __version__
from .errors import DomainError

__all__ = ["Table", "format_real", "to_csv", "to_json", "write_table", "read_csv"]


def format_real(x: float) -> str:
    """12 significant digits in fixed scientific notation."""
    x = float(x)
    if not math.isfinite(x):
        return repr(x)
    if x == 0.0:
        x = 0.0  # drop the sign of -0.0
    return f"{x:.11e}"


def _cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format_real(value)
    return str(value)


def _json_value(value):
    if isinstance(value, bool) or value is None or isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(format_real(value))
    if isinstance(value, (list, tuple)):
        return [_json_value(v) for v in value]
    if isinstance(value, dict):
        return {k: _json_value(v) for k, v in value.items()}
    return str(value)


@dataclass
class Table:
    """Named columns of equal length plus a flat metadata mapping.

    With ``monotone=True`` the first column must be strictly increasing,
    which is what the figure series promise.
    """

    columns: Dict[str, List[Any]]
    meta: Dict[str, Any] = field(default_factory=dict)
    monotone: bool = False

    def __post_init__(self):
        lengths = {name: len(col) for name, col in self.columns.items()}
        if len(set(lengths.values())) > 1:
            raise DomainError(f"columns differ in length: {lengths}")
        if self.monotone and self.columns:
            first = next(iter(self.columns.values()))
            if any(b <= a for a, b in zip(first, first[1:])):
                raise DomainError("abscissa is not strictly increasing")

    @property
    def names(self) -> List[str]:
        return list(self.columns)

    def rows(self):
        return zip(*self.columns.values())


def _meta_text(value) -> str:
    if isinstance(value, (list, tuple)):
        return " ".join(_cell(v) for v in value)
    return _cell(value)


def to_csv(table: Table) -> str:
    buf = io.StringIO()
    buf.write(f"# tool: blochgeo {__version__}\n")
    for key, value in table.meta.items():
        buf.write(f"# {key}: {_meta_text(value)}\n")
    buf.write(",".join(table.names) + "\n")
    for row in table.rows():
        buf.write(",".join(_cell(v) for v in row) + "\n")
    return buf.getvalue()


def to_json(table: Table) -> str:
    meta = {"tool": "blochgeo", "version": __version__}
    meta.update(_json_value(table.meta))
    doc = {"meta": meta, "columns": {k: _json_value(list(v)) for k, v in table.columns.items()}}
    return json.dumps(doc, indent=1) + "\n"


def write_table(table: Table, stream: TextIO, fmt: str = "csv") -> None:
    if fmt == "csv":
        stream.write(to_csv(table))
    elif fmt == "json":
        stream.write(to_json(table))
    else:
        raise DomainError(f"unknown output format {fmt!r}")


def read_csv(text: str) -> Table:
    """Parse CSV written by :func:`to_csv`; numeric-looking cells become floats."""
    meta = {}
    lines = [ln for ln in text.splitlines() if ln]
    body: Sequence[str] = []
    for i, line in enumerate(lines):
        if line.startswith("#"):
            key, _, value = line[1:].strip().partition(": ")
            meta[key] = value
        else:
            body = lines[i:]
            break
    names = body[0].split(",")
    columns: Dict[str, List[Any]] = {n: [] for n in names}
    for line in body[1:]:
        for name, cell in zip(names, line.split(",")):
            try:
                columns[name].append(float(cell))
            except ValueError:
                columns[name].append(cell)
    return Table(columns, meta)
