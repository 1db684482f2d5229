"""File formats: point-set CSV, dense-matrix CSV and the DMAT binary format.

DMAT layout: a 16-byte header (ASCII magic ``DMAT``, u32 LE rows, u32 LE
cols, 4 reserved zero bytes) followed by rows*cols little-endian float64
values in row-major order.
"""
from __future__ import annotations

import csv
import struct
from pathlib import Path

import numpy as np

from .metrics import PointSet

DMAT_MAGIC = b"DMAT"
_HEADER = struct.Struct("<4sII4x")


def load_points_csv(path) -> PointSet:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty file") from None
        expected = [f"x{i}" for i in range(len(header))]
        if [h.strip() for h in header] != expected:
            raise ValueError(f"{path}: header must be x0,x1,...,x{{d-1}}, got {header}")
        rows = []
        for lineno, rec in enumerate(reader, start=2):
            if not rec:
                continue
            if len(rec) != len(header):
                raise ValueError(f"{path}:{lineno}: expected {len(header)} fields, got {len(rec)}")
            try:
                rows.append([float(v) for v in rec])
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from None
    if not rows:
        raise ValueError(f"{path}: no points")
    return PointSet(rows)


def save_points_csv(path, points) -> None:
    pts = points.points if isinstance(points, PointSet) else np.asarray(points, dtype=np.float64)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow([f"x{i}" for i in range(pts.shape[1])])
        for p in pts:
            writer.writerow([repr(float(v)) for v in p])


def write_dmat(path, matrix) -> None:
    A = np.ascontiguousarray(matrix, dtype="<f8")
    if A.ndim != 2:
        raise ValueError("DMAT stores 2-D matrices only")
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(DMAT_MAGIC, A.shape[0], A.shape[1]))
        fh.write(A.tobytes(order="C"))


def read_dmat(path) -> np.ndarray:
    data = Path(path).read_bytes()
    if len(data) < _HEADER.size:
        raise ValueError(f"{path}: truncated DMAT header")
    magic, n, m = _HEADER.unpack_from(data)
    if magic != DMAT_MAGIC:
        raise ValueError(f"{path}: bad magic {magic!r}")
    body = data[_HEADER.size:]
    if len(body) != 8 * n * m:
        raise ValueError(f"{path}: expected {8 * n * m} payload bytes, found {len(body)}")
    return np.frombuffer(body, dtype="<f8").reshape(n, m).astype(np.float64)


def write_matrix_csv(path, matrix) -> None:
    A = np.asarray(matrix, dtype=np.float64)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        for row in A:
            writer.writerow([repr(float(v)) for v in row])


def read_matrix_csv(path) -> np.ndarray:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [[float(v) for v in rec] for rec in csv.reader(fh) if rec]
    if not rows or len({len(r) for r in rows}) != 1:
        raise ValueError(f"{path}: ragged or empty matrix")
    return np.array(rows, dtype=np.float64)


def read_matrix(path) -> np.ndarray:
    """Dense matrix from DMAT (by magic) or headerless CSV."""
    with open(path, "rb") as fh:
        head = fh.read(4)
    return read_dmat(path) if head == DMAT_MAGIC else read_matrix_csv(path)
