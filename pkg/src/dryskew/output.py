"""Tabulated output: density grids, CSV/JSON payloads and atomic file writes."""

from __future__ import annotations

import csv
import datetime as _dt
import io
import json
import os
import tempfile
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .params import ModelParams

FORMATS = ("csv", "json")


def _fmt(v) -> str:
    return repr(float(v))


@dataclass
class DensityGrid:
    """Density values over a 1-D or 2-D grid, with provenance metadata.

    ``extra`` holds additional per-point columns (for example a CDF) with the
    same shape as ``values``.
    """

    axes: list
    values: np.ndarray
    params: ModelParams
    normalization_estimate: float | None = None
    value_name: str = "density"
    extra: dict = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        shape = tuple(len(a) for _, a in self.axes)
        if self.values.shape != shape:
            raise DomainError(f"value shape {self.values.shape} does not match axes {shape}")
        for name, a in self.axes:
            a = np.asarray(a, dtype=float)
            if a.size > 1 and not np.all(np.diff(a) > 0):
                raise DomainError(f"axis {name!r} must be strictly increasing")
        if self.value_name == "density" and np.any(self.values < 0):
            raise DomainError("density values must be nonnegative")
        for k, v in self.extra.items():
            if np.shape(v) != shape:
                raise DomainError(f"column {k!r} shape does not match axes")

    def header(self) -> dict:
        meta = {"params": self.params.to_dict()}
        if self.normalization_estimate is not None:
            meta["normalization_estimate"] = self.normalization_estimate
        meta.update(self.metadata)
        return meta

    def columns(self) -> list:
        return [n for n, _ in self.axes] + [self.value_name] + list(self.extra)

    def rows(self):
        grids = np.meshgrid(*[np.asarray(a, float) for _, a in self.axes], indexing="ij")
        cols = [g.ravel() for g in grids] + [self.values.ravel()]
        cols += [np.asarray(v, float).ravel() for v in self.extra.values()]
        return zip(*cols)

    def to_csv(self) -> str:
        return table_csv(self.header(), self.columns(), self.rows())

    def to_json(self) -> str:
        return table_json(self.header(), self.columns(), self.rows())


def _flatten(meta: dict, prefix=""):
    for k in sorted(meta):
        v = meta[k]
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            yield from _flatten(v, key + ".")
        else:
            yield key, v


def table_csv(meta: dict, columns, rows) -> str:
    """Comment block of ``# key = value`` lines, then a header row and data rows."""
    buf = io.StringIO()
    for k, v in _flatten(meta):
        buf.write(f"# {k} = {json.dumps(v, sort_keys=True)}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(x) if isinstance(x, (float, np.floating)) else x for x in r])
    return buf.getvalue()


def table_json(meta: dict, columns, rows) -> str:
    data = [[float(x) if isinstance(x, (float, np.floating)) else x for x in r] for r in rows]
    return json.dumps({"metadata": meta, "columns": list(columns), "data": data},
                      indent=2, sort_keys=True) + "\n"


def read_csv_table(text: str):
    """Inverse of :func:`table_csv`: returns ``(flat_metadata, columns, rows)``."""
    meta, lines = {}, []
    for line in text.splitlines():
        if line.startswith("# "):
            k, _, v = line[2:].partition(" = ")
            meta[k] = json.loads(v)
        elif line:
            lines.append(line)
    reader = csv.reader(lines)
    columns = next(reader)
    rows = [[float(x) if _is_number(x) else x for x in r] for r in reader]
    return meta, columns, rows


def _is_number(s):
    try:
        float(s)
        return True
    except ValueError:
        return False


def atomic_write(path: str, text: str):
    """Write ``text`` to ``path`` via a temp file in the same directory and a rename."""
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".tmp-", dir=d)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def sidecar_path(path: str) -> str:
    return path + ".meta.json"


def write_sidecar(path: str, info: dict):
    """Run provenance that must not enter the payload (wall-clock time, argv)."""
    info = dict(info)
    info["written_at"] = _dt.datetime.now(_dt.timezone.utc).isoformat()
    atomic_write(sidecar_path(path), json.dumps(info, indent=2, sort_keys=True) + "\n")
