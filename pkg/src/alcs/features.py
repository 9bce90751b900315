"""Feature matrices for both stages of the active-learning pipeline.

Two views matter downstream: the raw "feature view" consumed by the
classifier, and the unit-normalized "similarity view" where cosine
similarity reduces to a dot product.  Normalization policy lives here only;
the classifier consumes features as given.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

__all__ = [
    "FeatureMatrix",
    "Vocabulary",
    "tokenize",
    "fit_vocabulary",
    "tfidf",
    "similarity_view",
]

logger = logging.getLogger(__name__)

_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)
MIN_TOKEN_LEN = 2


@dataclass
class FeatureMatrix:
    """Row-per-document features, sparse (bow) or dense (lsi/embedding).

    ``ids`` records the document id behind each row; None means rows are
    their own ids (0..n_rows-1).
    """

    data: sp.csr_matrix | np.ndarray
    kind: str  # bow | lsi | embedding
    ids: list[int] | None = None

    def __post_init__(self):
        if self.kind not in ("bow", "lsi", "embedding"):
            raise ValueError("unknown feature kind %r" % self.kind)
        if sp.issparse(self.data):
            self.data = sp.csr_matrix(self.data)
            self.data.eliminate_zeros()
            values = self.data.data
        else:
            self.data = np.ascontiguousarray(self.data)
            values = self.data
        if values.size and not np.all(np.isfinite(values)):
            raise ValueError("feature matrix contains NaN/Inf entries")
        if self.ids is not None and len(self.ids) != self.n_rows:
            raise ValueError(
                "ids length %d does not match %d rows" % (len(self.ids), self.n_rows)
            )

    @property
    def n_rows(self) -> int:
        return self.data.shape[0]

    @property
    def n_cols(self) -> int:
        return self.data.shape[1]

    @property
    def is_sparse(self) -> bool:
        return sp.issparse(self.data)

    def row_ids(self) -> list[int]:
        return list(range(self.n_rows)) if self.ids is None else list(self.ids)

    def take_rows(self, rows: list[int] | np.ndarray, ids: list[int] | None = None) -> "FeatureMatrix":
        """Row subset as a new matrix; ``ids`` overrides the carried id list."""
        rows = np.asarray(rows, dtype=np.int64)
        if ids is None and self.ids is not None:
            ids = [self.ids[r] for r in rows]
        return FeatureMatrix(self.data[rows], kind=self.kind, ids=ids)


@dataclass
class Vocabulary:
    """Lexicographically ordered term list with document frequencies."""

    terms: list[str]
    df: np.ndarray
    n_docs_fitted: int
    index: dict[str, int] = field(init=False, repr=False)

    def __post_init__(self):
        self.index = {t: i for i, t in enumerate(self.terms)}

    def __len__(self) -> int:
        return len(self.terms)

    def idf(self) -> np.ndarray:
        """Smoothed idf: ln((1+N)/(1+df)) + 1, floored at 1 when df == N."""
        n = self.n_docs_fitted
        return np.log((1.0 + n) / (1.0 + self.df.astype(np.float64))) + 1.0


def tokenize(text: str) -> list[str]:
    """Lowercase, split on non-alphanumeric runs, drop tokens shorter than 2."""
    return [t for t in _TOKEN_RE.findall(text.lower()) if len(t) >= MIN_TOKEN_LEN]


def fit_vocabulary(texts: list[str], min_df: int = 2) -> Vocabulary:
    """Collect terms appearing in at least ``min_df`` documents."""
    if min_df < 1:
        raise ValueError("min_df must be >= 1, got %d" % min_df)
    if not texts:
        raise ValueError("cannot fit a vocabulary on an empty corpus")
    counts: dict[str, int] = {}
    for text in texts:
        for term in set(tokenize(text)):
            counts[term] = counts.get(term, 0) + 1
    terms = sorted(t for t, c in counts.items() if c >= min_df)
    if not terms:
        raise ValueError("no terms survive min_df=%d" % min_df)
    df = np.array([counts[t] for t in terms], dtype=np.int64)
    return Vocabulary(terms=terms, df=df, n_docs_fitted=len(texts))


def tfidf(texts: list[str], vocab: Vocabulary, ids: list[int] | None = None) -> FeatureMatrix:
    """TF-IDF matrix over a fitted vocabulary, rows L2-normalized.

    tf is the raw in-document count; idf uses the vocabulary's fitted
    document count, so pool-fitted statistics apply unchanged to test rows.
    Out-of-vocabulary tokens are ignored; an all-OOV document yields a zero
    row, which is permitted and logged.
    """
    indptr = [0]
    indices: list[int] = []
    values: list[float] = []
    for text in texts:
        row_counts: dict[int, int] = {}
        for term in tokenize(text):
            col = vocab.index.get(term)
            if col is not None:
                row_counts[col] = row_counts.get(col, 0) + 1
        for col in sorted(row_counts):
            indices.append(col)
            values.append(float(row_counts[col]))
        indptr.append(len(indices))
    mat = sp.csr_matrix(
        (np.array(values, dtype=np.float64), np.array(indices, dtype=np.int64), np.array(indptr, dtype=np.int64)),
        shape=(len(texts), len(vocab)),
    )
    mat = (mat @ sp.diags(vocab.idf())).tocsr()
    norms = np.sqrt(np.asarray(mat.multiply(mat).sum(axis=1)).ravel())
    zero_rows = np.flatnonzero(norms == 0.0)
    if zero_rows.size:
        logger.warning(
            "tfidf: %d all-out-of-vocabulary document(s) produced zero rows (first: %s)",
            zero_rows.size,
            zero_rows[:5].tolist(),
        )
    inv = np.divide(1.0, norms, out=np.zeros_like(norms), where=norms > 0)
    mat = sp.diags(inv).dot(mat).tocsr()
    return FeatureMatrix(mat, kind="bow", ids=ids)


def similarity_view(matrix: FeatureMatrix) -> FeatureMatrix:
    """Scale every nonzero row to unit L2 norm; zero rows stay zero.

    On the returned view, cosine similarity is a plain dot product.  Dense
    data is normalized in float64.
    """
    if matrix.is_sparse:
        data = matrix.data.astype(np.float64)
        norms = np.sqrt(np.asarray(data.multiply(data).sum(axis=1)).ravel())
        inv = np.divide(1.0, norms, out=np.zeros_like(norms), where=norms > 0)
        out = sp.diags(inv).dot(data).tocsr()
    else:
        data = np.asarray(matrix.data, dtype=np.float64)
        norms = np.linalg.norm(data, axis=1)
        inv = np.divide(1.0, norms, out=np.zeros_like(norms), where=norms > 0)
        out = data * inv[:, None]
    return FeatureMatrix(out, kind=matrix.kind, ids=matrix.ids)
