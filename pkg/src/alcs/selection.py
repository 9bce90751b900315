"""Density/diversity instance selection for the cold-start setting.

Selection sees only feature views, never labels.  Density is the mean
cosine similarity to an instance's k nearest pool members, computed once
over the full pool and frozen; diversity is one minus the maximum cosine
similarity to anything already selected.  The greedy scan takes instances
in non-increasing density order and accepts each iff its diversity clears
the threshold, which is equivalent to re-running argmax over the shrinking
pool because densities never change.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .features import FeatureMatrix

__all__ = [
    "SelectionConfig",
    "AuditRecord",
    "SelectionResult",
    "default_dist_min",
    "knn_topk",
    "density_all",
    "diversity",
    "dwds_select",
]

# Threshold defaults per representation kind: sparse/latent lexical spaces
# spread similarities wide, dense embedding spaces concentrate them.
DIST_MIN_DEFAULTS = {"bow": 0.7, "lsi": 0.7, "embedding": 0.01}

_DENSITY_BLOCK_BUDGET = 4_000_000  # floats per similarity block


def default_dist_min(kind: str) -> float:
    return DIST_MIN_DEFAULTS[kind]


@dataclass(frozen=True)
class SelectionConfig:
    budget: int
    k: int
    dist_min: float

    def __post_init__(self):
        if self.budget < 1:
            raise ValueError("budget must be >= 1, got %d" % self.budget)
        if self.k < 1:
            raise ValueError("k must be >= 1, got %d" % self.k)
        if not 0.0 <= self.dist_min <= 1.0:
            raise ValueError("dist_min must be in [0, 1], got %r" % (self.dist_min,))


@dataclass(frozen=True)
class AuditRecord:
    id: int
    density: float
    diversity: float
    accepted: bool


@dataclass
class SelectionResult:
    """Ordered selection plus the per-candidate decisions behind it."""

    selected: list[int]
    densities: np.ndarray
    audit: list[AuditRecord]
    exhausted: bool
    selected_rows: list[int] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "selected": [int(s) for s in self.selected],
            "exhausted": bool(self.exhausted),
            "audit": [
                {
                    "id": int(rec.id),
                    "density": float(rec.density),
                    "diversity": float(rec.diversity),
                    "accepted": bool(rec.accepted),
                }
                for rec in self.audit
            ],
        }


def _dense_rows(view: FeatureMatrix) -> np.ndarray | sp.csr_matrix:
    return view.data


def _sims_to_row(view: FeatureMatrix, i: int) -> np.ndarray:
    data = view.data
    if sp.issparse(data):
        return np.asarray((data @ data[i].T).todense()).ravel()
    return data @ data[i]


def knn_topk(view: FeatureMatrix, i: int, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Indices and cosine similarities of the k most similar other rows.

    Ties break toward the lower row index; similarities come back
    non-increasing.  Fewer than k other rows means all of them.
    """
    n = view.n_rows
    if n < 2:
        raise ValueError("need at least 2 rows, got %d" % n)
    if not 0 <= i < n:
        raise ValueError("row %d out of range for %d rows" % (i, n))
    if k < 1:
        raise ValueError("k must be >= 1, got %d" % k)
    sims = _sims_to_row(view, i)
    others = np.concatenate([np.arange(i), np.arange(i + 1, n)])
    order = np.argsort(-sims[others], kind="stable")[: min(k, n - 1)]
    neighbors = others[order]
    return neighbors, sims[neighbors]


def density_all(view: FeatureMatrix, k: int) -> np.ndarray:
    """Mean top-k cosine similarity for every row, over the full pool.

    Computed blockwise; the top-k values are summed in sorted order so the
    result does not depend on block size.  A single-row pool has no
    neighbors and gets density 0.
    """
    n = view.n_rows
    if n == 1:
        return np.zeros(1)
    if k < 1:
        raise ValueError("k must be >= 1, got %d" % k)
    kk = min(k, n - 1)
    data = view.data
    dense = data.toarray() if sp.issparse(data) and n * view.n_cols <= _DENSITY_BLOCK_BUDGET else data
    block = max(1, _DENSITY_BLOCK_BUDGET // n)
    out = np.empty(n, dtype=np.float64)
    for start in range(0, n, block):
        stop = min(start + block, n)
        sims = dense[start:stop] @ dense.T
        if sp.issparse(sims):
            sims = np.asarray(sims.todense())
        sims = np.asarray(sims, dtype=np.float64)
        sims[np.arange(stop - start), np.arange(start, stop)] = -np.inf
        top = np.partition(sims, n - 1 - kk, axis=1)[:, n - kk:]
        top = -np.sort(-top, axis=1)  # canonical summation order
        out[start:stop] = top.sum(axis=1) / kk
    return out


def diversity(x: int, selected: list[int], view: FeatureMatrix) -> float:
    """1 - max cosine similarity between row x and the selected rows.

    An empty selection yields 1.0, so the densest instance always passes
    any threshold <= 1.  Similarities are clipped at 1 so duplicates give
    exactly 0.
    """
    if not selected:
        return 1.0
    data = view.data
    row = data[x]
    if sp.issparse(data):
        sims = np.asarray((data[selected] @ row.T).todense()).ravel()
    else:
        sims = data[selected] @ row
    return 1.0 - min(float(sims.max()), 1.0)


def dwds_select(view: FeatureMatrix, cfg: SelectionConfig) -> SelectionResult:
    """Greedy density-ranked selection filtered by the diversity threshold.

    Scans rows in non-increasing density order (ties to the lower index),
    accepting a candidate iff its diversity against the current selection
    is >= dist_min, until the budget is met or the pool is exhausted.
    Every scanned candidate lands in the audit trail with the diversity
    value seen at decision time.
    """
    n = view.n_rows
    if n == 0:
        raise ValueError("pool is empty")
    densities = density_all(view, cfg.k)
    order = np.lexsort((np.arange(n), -densities))
    ids = view.row_ids()
    data = view.data

    max_sim = np.full(n, -np.inf)
    selected_rows: list[int] = []
    audit: list[AuditRecord] = []
    for idx in order:
        if len(selected_rows) >= cfg.budget:
            break
        idx = int(idx)
        if selected_rows:
            div = 1.0 - min(float(max_sim[idx]), 1.0)
        else:
            div = 1.0
        accepted = div >= cfg.dist_min
        audit.append(
            AuditRecord(id=ids[idx], density=float(densities[idx]), diversity=div, accepted=accepted)
        )
        if accepted:
            selected_rows.append(idx)
            if sp.issparse(data):
                sims = np.asarray((data @ data[idx].T).todense()).ravel()
            else:
                sims = data @ data[idx]
            np.maximum(max_sim, sims, out=max_sim)
    return SelectionResult(
        selected=[ids[r] for r in selected_rows],
        densities=densities,
        audit=audit,
        exhausted=len(selected_rows) < cfg.budget,
        selected_rows=selected_rows,
    )
