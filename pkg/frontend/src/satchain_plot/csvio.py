"""Reader for satchain CSV artifacts.

Artifacts are RFC-4180 CSV prefixed by ``#`` provenance comment lines (the
first carries ``scenario=<hash>``; mc histograms also carry
``tv_distance=<value>``), then a header row, then data rows.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path


class PlotError(Exception):
    """Base error for the plotting layer."""


class SchemaError(PlotError):
    """The CSV does not match the documented schema."""


class NoRowsError(PlotError):
    """The CSV parsed but contains no data rows."""


@dataclass(frozen=True)
class CsvTable:
    path: str
    comments: tuple[str, ...]
    header: tuple[str, ...]
    rows: tuple[tuple[str, ...], ...]

    def require(self, *columns: str) -> None:
        missing = [c for c in columns if c not in self.header]
        if missing:
            raise SchemaError(
                f"{self.path}: missing required columns {missing} "
                f"(found {list(self.header)})"
            )
        if not self.rows:
            raise NoRowsError(f"{self.path}: no rows")

    def column(self, name: str) -> list[str]:
        index = self.header.index(name)
        return [row[index] for row in self.rows]

    def floats(self, name: str) -> list[float]:
        out = []
        for raw in self.column(name):
            try:
                out.append(float(raw))
            except ValueError as exc:
                raise SchemaError(f"{self.path}: column {name!r} has non-numeric value {raw!r}") from exc
        return out

    def comment_value(self, key: str) -> str | None:
        """Value of a `key=value` token inside the provenance comments."""
        for comment in self.comments:
            for token in comment.split():
                if token.startswith(f"{key}="):
                    return token.split("=", 1)[1]
        return None

    @property
    def scenario_hash(self) -> str | None:
        return self.comment_value("scenario")

    @property
    def tv_distance(self) -> float | None:
        raw = self.comment_value("tv_distance")
        return float(raw) if raw is not None else None


def read_table(path: str | Path) -> CsvTable:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise PlotError(f"cannot read {path}: {exc}") from exc

    comments = []
    body = []
    for line in text.splitlines():
        if line.startswith("#"):
            comments.append(line.lstrip("# ").rstrip())
        elif line.strip():
            body.append(line)
    if not body:
        raise NoRowsError(f"{path}: no header row")

    reader = csv.reader(io.StringIO("\n".join(body)))
    parsed = list(reader)
    header = tuple(parsed[0])
    rows = tuple(tuple(row) for row in parsed[1:] if row)
    return CsvTable(path=str(path), comments=tuple(comments), header=header, rows=rows)
