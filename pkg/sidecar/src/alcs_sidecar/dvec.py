"""DVEC writer, self-contained on purpose.

The experiment engine owns the reference reader; this module re-states the
format from its definition so the sidecar never imports engine code. Layout:
32-byte little-endian header (magic ``DVEC``, u32 version 1, u64 rows, u64
cols, u8 dtype flag 0x01 = float32, 7 zero bytes), then the matrix row-major.
Row ids go to a ``<path>.ids`` text sidecar, one id per line.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

_HEADER = struct.Struct("<4sIQQB7s")
_MAGIC = b"DVEC"
_VERSION = 1
_DTYPE_F32 = 0x01


def write_dvec(matrix: np.ndarray, path: str | Path, ids=None) -> None:
    matrix = np.ascontiguousarray(matrix, dtype=np.float32)
    if matrix.ndim != 2:
        raise ValueError("DVEC stores 2-D matrices, got shape %r" % (matrix.shape,))
    if not np.isfinite(matrix).all():
        raise ValueError("matrix contains non-finite values")
    path = Path(path)
    n_rows, n_cols = matrix.shape
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(_MAGIC, _VERSION, n_rows, n_cols, _DTYPE_F32,
                              b"\x00" * 7))
        fh.write(matrix.tobytes(order="C"))
    if ids is not None:
        ids = list(ids)
        if len(ids) != n_rows:
            raise ValueError(
                "got %d ids for %d rows" % (len(ids), n_rows)
            )
        Path(str(path) + ".ids").write_text(
            "".join("%d\n" % int(i) for i in ids), encoding="utf-8"
        )
