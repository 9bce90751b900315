"""DVEC: bit-exact binary container for dense float32 row-major matrices.

Layout (little-endian throughout):
    bytes 0-3    magic "DVEC"
    bytes 4-7    version, uint32 (currently 1)
    bytes 8-15   n_rows, uint64
    bytes 16-23  n_cols, uint64
    byte  24     dtype flag, 0x01 = IEEE-754 float32
    bytes 25-31  zero padding
    then n_rows * n_cols floats, row-major

An optional sidecar text file ``<path>.ids`` lists one document id per row.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .features import FeatureMatrix

__all__ = ["DvecFormatError", "save_embeddings", "load_embeddings"]

MAGIC = b"DVEC"
VERSION = 1
DTYPE_F32 = 0x01
_HEADER = struct.Struct("<4sIQQB7s")  # 32 bytes


class DvecFormatError(Exception):
    """The file does not conform to the DVEC layout."""


def save_embeddings(matrix: FeatureMatrix | np.ndarray, path: str | Path,
                    ids: list[int] | None = None) -> None:
    """Write a dense matrix as DVEC; save->load round trips bit-exactly.

    ``ids`` (or the matrix's own id list) goes to the ``<path>.ids`` sidecar.
    """
    if isinstance(matrix, FeatureMatrix):
        if matrix.is_sparse:
            raise ValueError("DVEC stores dense matrices; densify sparse input first")
        if ids is None:
            ids = matrix.ids
        data = matrix.data
    else:
        data = matrix
    data = np.ascontiguousarray(data, dtype="<f4")
    if data.ndim != 2:
        raise ValueError("expected a 2-D matrix, got shape %s" % (data.shape,))
    path = Path(path)
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, VERSION, data.shape[0], data.shape[1], DTYPE_F32, b"\0" * 7))
        fh.write(data.tobytes(order="C"))
    if ids is not None:
        with open(str(path) + ".ids", "w", encoding="utf-8") as fh:
            fh.write("\n".join(str(i) for i in ids) + "\n")


def load_embeddings(path: str | Path) -> FeatureMatrix:
    """Read a DVEC file; picks up row ids from ``<path>.ids`` when present."""
    path = Path(path)
    size = path.stat().st_size
    with open(path, "rb") as fh:
        header = fh.read(_HEADER.size)
        if len(header) < _HEADER.size:
            raise DvecFormatError("%s: truncated header (%d bytes)" % (path, len(header)))
        magic, version, n_rows, n_cols, dtype_flag, padding = _HEADER.unpack(header)
        if magic != MAGIC:
            raise DvecFormatError("%s: bad magic %r" % (path, magic))
        if version != VERSION:
            raise DvecFormatError("%s: unsupported version %d" % (path, version))
        if dtype_flag != DTYPE_F32:
            raise DvecFormatError("%s: unknown dtype flag 0x%02x" % (path, dtype_flag))
        if padding != b"\0" * 7:
            raise DvecFormatError("%s: nonzero header padding" % path)
        expected = _HEADER.size + n_rows * n_cols * 4
        if size != expected:
            raise DvecFormatError(
                "%s: payload size mismatch (header promises %d bytes, file has %d)"
                % (path, expected, size)
            )
        payload = fh.read(n_rows * n_cols * 4)
    data = np.frombuffer(payload, dtype="<f4").reshape(n_rows, n_cols).copy()
    ids = None
    ids_path = Path(str(path) + ".ids")
    if ids_path.exists():
        with open(ids_path, encoding="utf-8") as fh:
            ids = [int(line) for line in fh if line.strip()]
        if len(ids) != n_rows:
            raise DvecFormatError(
                "%s: id sidecar lists %d rows, matrix has %d" % (ids_path, len(ids), n_rows)
            )
    return FeatureMatrix(data, kind="embedding", ids=ids)
