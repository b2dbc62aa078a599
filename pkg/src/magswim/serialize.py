"""Trajectory and report serialization.

Two trajectory formats: a flat CSV with a fixed column order, and JSON
lines with a metadata header record.  CSV cells carry 17 significant
digits (enough to pin down any double uniquely); JSONL goes through
json's repr-based float encoding.  Either way a write-read cycle is
bit-exact.
"""
from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Any

import numpy as np

from .errors import MagswimError
from .simulate import Trajectory

__all__ = [
    "TRAJECTORY_COLUMNS",
    "format_cell",
    "write_trajectory_csv",
    "read_trajectory_csv",
    "write_trajectory_jsonl",
    "read_trajectory_jsonl",
    "write_json_report",
]

TRAJECTORY_COLUMNS = ("t", "x", "y", "theta", "alpha2", "alpha3", "Hx", "Hy")

JSONL_FORMAT = "magswim.trajectory"
JSONL_VERSION = 1


def _rows(traj: Trajectory):
    for k in range(len(traj)):
        yield (traj.times[k], *traj.states[k], *traj.field_samples[k])


def format_cell(value: float) -> str:
    """17 significant digits: the shortest count that is always lossless."""
    return f"{float(value):.17g}"


def write_trajectory_csv(traj: Trajectory, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(TRAJECTORY_COLUMNS)
        for row in _rows(traj):
            writer.writerow([format_cell(v) for v in row])


def _trajectory_from_rows(rows: list[list[float]]) -> Trajectory:
    if not rows:
        return Trajectory(
            times=np.empty(0), states=np.empty((0, 5)),
            field_samples=np.empty((0, 2)))
    data = np.array(rows, dtype=float)
    return Trajectory(
        times=data[:, 0], states=data[:, 1:6], field_samples=data[:, 6:8])


def read_trajectory_csv(path: str | Path) -> Trajectory:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise MagswimError(f"{path}: empty file, expected a header")
        if tuple(header) != TRAJECTORY_COLUMNS:
            raise MagswimError(
                f"{path}: unexpected header {header!r}")
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if len(row) != len(TRAJECTORY_COLUMNS):
                raise MagswimError(
                    f"{path}:{lineno}: expected "
                    f"{len(TRAJECTORY_COLUMNS)} fields, got {len(row)}")
            try:
                rows.append([float(v) for v in row])
            except ValueError as exc:
                raise MagswimError(f"{path}:{lineno}: {exc}") from exc
    return _trajectory_from_rows(rows)


def write_trajectory_jsonl(traj: Trajectory, path: str | Path,
                           metadata: dict[str, Any] | None = None) -> None:
    """One metadata record, then one JSON array per sample."""
    header: dict[str, Any] = {
        "format": JSONL_FORMAT,
        "version": JSONL_VERSION,
        "columns": list(TRAJECTORY_COLUMNS),
        "rows": len(traj),
    }
    if metadata:
        overlap = set(metadata) & set(header)
        if overlap:
            raise MagswimError(
                f"metadata keys collide with header: {sorted(overlap)}")
        header.update(metadata)
    with open(path, "w") as fh:
        fh.write(json.dumps(header, sort_keys=True) + "\n")
        for row in _rows(traj):
            fh.write(json.dumps([float(v) for v in row]) + "\n")


def read_trajectory_jsonl(path: str | Path
                          ) -> tuple[Trajectory, dict[str, Any]]:
    with open(path) as fh:
        first = fh.readline()
        if not first:
            raise MagswimError(f"{path}: empty file, expected metadata")
        try:
            header = json.loads(first)
        except json.JSONDecodeError as exc:
            raise MagswimError(f"{path}:1: {exc}") from exc
        if not isinstance(header, dict) or header.get("format") != \
                JSONL_FORMAT:
            raise MagswimError(f"{path}: not a {JSONL_FORMAT} file")
        rows = []
        for lineno, line in enumerate(fh, start=2):
            if not line.strip():
                continue
            try:
                row = json.loads(line)
            except json.JSONDecodeError as exc:
                raise MagswimError(f"{path}:{lineno}: {exc}") from exc
            if len(row) != len(TRAJECTORY_COLUMNS):
                raise MagswimError(
                    f"{path}:{lineno}: expected "
                    f"{len(TRAJECTORY_COLUMNS)} fields, got {len(row)}")
            rows.append([float(v) for v in row])
    if len(rows) != header.get("rows"):
        raise MagswimError(
            f"{path}: header promises {header.get('rows')} rows, "
            f"found {len(rows)}")
    return _trajectory_from_rows(rows), header


def write_json_report(path: str | Path, payload: dict[str, Any]) -> None:
    """Deterministic pretty JSON: sorted keys, fixed indent, newline end."""
    with open(path, "w") as fh:
        fh.write(json.dumps(payload, sort_keys=True, indent=2) + "\n")
