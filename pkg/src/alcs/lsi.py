"""Latent space projection of TF-IDF matrices via truncated SVD.

The model keeps the right singular vectors as a term basis so unseen rows
(test folds) can be projected with the same map: doc coordinates are
``x @ term_basis``.  Per-dimension sign is fixed by making the
largest-magnitude entry of each basis column positive, so repeated fits are
reproducible across solvers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import ArpackNoConvergence, svds

from .features import FeatureMatrix

__all__ = ["LsiModel", "SvdConvergenceError", "lsi_fit", "lsi_project"]

_V0_SEED = 0x15E5  # fixed ARPACK start vector; fits must not depend on global RNG state


class SvdConvergenceError(Exception):
    """The iterative solver did not converge within its iteration budget."""


@dataclass
class LsiModel:
    d: int
    term_basis: np.ndarray  # (n_terms, d) float64, orthonormal columns
    singular_values: np.ndarray  # (d,) non-negative, non-increasing

    @property
    def n_terms(self) -> int:
        return self.term_basis.shape[0]


def _fix_signs(v: np.ndarray) -> np.ndarray:
    """Flip columns so the largest-magnitude entry of each is positive."""
    pivot = np.argmax(np.abs(v), axis=0)
    flip = v[pivot, np.arange(v.shape[1])] < 0
    v = v.copy()
    v[:, flip] *= -1.0
    return v


def lsi_fit(bow: FeatureMatrix, d: int, max_iter: int = 5000) -> LsiModel:
    """Rank-d truncated SVD of a (typically sparse) TF-IDF matrix.

    Uses an iterative Lanczos solver with a deterministic start vector;
    requests at or next to full rank fall back to a dense decomposition,
    which the iterative solver cannot address.
    """
    x = bow.data
    n, m = x.shape
    limit = min(n, m)
    if not 1 <= d <= limit:
        raise ValueError("d=%d out of range [1, %d] for a %dx%d matrix" % (d, limit, n, m))

    nnz = x.nnz if sp.issparse(x) else np.count_nonzero(x)
    if nnz == 0:
        # Zero matrix: any orthonormal basis is valid; use identity columns.
        basis = np.eye(m, d, dtype=np.float64)
        return LsiModel(d=d, term_basis=basis, singular_values=np.zeros(d))

    if d >= limit - 1:
        dense = x.toarray() if sp.issparse(x) else np.asarray(x, dtype=np.float64)
        _, s, vt = np.linalg.svd(dense, full_matrices=False)
        v = vt[:d].T
        s = s[:d]
    else:
        v0 = np.random.default_rng(_V0_SEED).standard_normal(limit)
        try:
            _, s, vt = svds(x.astype(np.float64), k=d, v0=v0, maxiter=max_iter)
        except ArpackNoConvergence as exc:
            raise SvdConvergenceError(
                "truncated SVD did not converge after %d iterations "
                "(%d of %d singular values converged)"
                % (max_iter, len(exc.eigenvalues), d)
            ) from exc
        order = np.argsort(s)[::-1]  # svds returns ascending
        s = s[order]
        v = vt[order].T
    return LsiModel(d=d, term_basis=_fix_signs(v), singular_values=np.ascontiguousarray(s))


def lsi_project(model: LsiModel, bow_rows: FeatureMatrix) -> FeatureMatrix:
    """Map rows into the latent space: ``row @ term_basis``."""
    if bow_rows.n_cols != model.n_terms:
        raise ValueError(
            "column mismatch: rows have %d features, model was fitted on %d terms"
            % (bow_rows.n_cols, model.n_terms)
        )
    projected = bow_rows.data @ model.term_basis
    projected = np.asarray(projected, dtype=np.float64)
    return FeatureMatrix(projected, kind="lsi", ids=bow_rows.ids)
