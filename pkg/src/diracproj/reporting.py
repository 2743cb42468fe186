"""Suite reports: typed case rows, JSON payloads and CSV kernel grids.

The JSON layout is versioned ("schema": 1) and is the public contract of
the command line front end.  Reports are deterministic for a fixed seed and
flag set except for the wall-time fields.
"""

from __future__ import annotations

import csv
import json
import os
import tempfile
from dataclasses import dataclass, field

import numpy as np

from .disc import KernelGrid

__all__ = ["CaseRow", "SuiteReport", "report_payload", "write_json",
           "write_kernel_grid_csv", "write_field_csv"]

SCHEMA_VERSION = 1


def _plain(value):
    """Coerce numpy scalars/arrays and exotic numbers into JSON-safe values."""
    if isinstance(value, (np.floating, np.integer, np.bool_)):
        return value.item()
    if isinstance(value, complex):
        return {"re": value.real, "im": value.imag}
    if isinstance(value, np.complexfloating):
        return {"re": float(value.real), "im": float(value.imag)}
    if isinstance(value, np.ndarray):
        return [_plain(v) for v in value.tolist()]
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, float) and not np.isfinite(value):
        return repr(value)
    return value


@dataclass
class CaseRow:
    """One verification case: computed vs expected at a tolerance."""

    case_id: str
    params: dict
    computed: object
    expected: object
    error: float
    tolerance: float
    provenance: str
    wall_time: float = 0.0

    @property
    def passed(self) -> bool:
        return bool(self.error <= self.tolerance)

    def to_dict(self) -> dict:
        return {
            "case": self.case_id,
            "params": _plain(self.params),
            "computed": _plain(self.computed),
            "expected": _plain(self.expected),
            "error": _plain(self.error),
            "tolerance": _plain(self.tolerance),
            "pass": self.passed,
            "provenance": self.provenance,
            "wall_time": self.wall_time,
        }


@dataclass
class SuiteReport:
    suite: str
    rows: list = field(default_factory=list)

    @property
    def n_pass(self) -> int:
        return sum(1 for r in self.rows if r.passed)

    @property
    def passed(self) -> bool:
        return self.n_pass == len(self.rows)

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "cases": [r.to_dict() for r in self.rows],
            "summary": {
                "total": len(self.rows),
                "passed": self.n_pass,
                "failed": len(self.rows) - self.n_pass,
            },
        }


def report_payload(reports, meta=None) -> dict:
    payload = {
        "schema": SCHEMA_VERSION,
        "meta": _plain(meta or {}),
        "suites": [r.to_dict() for r in reports],
        "pass": all(r.passed for r in reports),
    }
    return payload


def write_json(payload: dict, path: str) -> None:
    """Atomic JSON write: temp file in the target directory, then rename."""
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as handle:
            json.dump(payload, handle, indent=1, sort_keys=True)
            handle.write("\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_field_csv(points, columns, path: str) -> None:
    """CSV of scalar/tensor fields sampled on grid points.

    ``points`` is an (N, n) array of coordinates, ``columns`` a dict of
    column name -> length-N array.
    """
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as handle:
            writer = csv.writer(handle)
            names = list(columns)
            writer.writerow([f"x{i + 1}" for i in range(points.shape[1])] + names)
            for i in range(points.shape[0]):
                writer.writerow(list(points[i]) + [columns[k][i] for k in names])
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_kernel_grid_csv(grid: KernelGrid, path: str) -> None:
    """Column layout: re z, im z, re w, im w, re value, im value, closed-form value, abs error."""
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as handle:
            writer = csv.writer(handle)
            writer.writerow(
                ["re z", "im z", "re w", "im w", "re value", "im value",
                 "closed-form value", "abs error"]
            )
            for z, w, v, c, e in zip(grid.z, grid.w, grid.values, grid.closed, grid.abs_err):
                writer.writerow(
                    [z.real, z.imag, w.real, w.imag, v.real, v.imag,
                     f"{c.real!r}{c.imag:+}j", e]
                )
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
