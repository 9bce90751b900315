"""One-vs-rest linear max-margin classifier on the primal hinge objective.

Per class c the solver minimizes

    0.5 * ||w||^2 + C * sum_i max(0, 1 - y_i (w.x_i + b)),  y_i = +1 iff label_i == c

with full-batch gradient steps under Armijo backtracking, so the recorded
objective is non-increasing by construction.  The solver is deterministic;
the seed parameter exists for interface stability and drives nothing in the
full-batch scheme.  Features are consumed as given; normalization policy
lives in the representations layer.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .features import FeatureMatrix

__all__ = [
    "DegenerateLabelsError",
    "LinearModel",
    "train",
    "decision_scores",
    "predict",
    "save_model",
    "load_model",
]

_MAGIC = b"LSVM"
_VERSION = 1
_ARMIJO = 1e-4
_REL_TOL = 1e-6
_INNER_STEPS = 10


class DegenerateLabelsError(ValueError):
    """Training set carries fewer than two distinct labels."""


@dataclass
class LinearModel:
    classes: np.ndarray  # ascending dense class ids present at training time
    weights: np.ndarray  # (n_classes, n_dims) float64
    biases: np.ndarray  # (n_classes,)
    C: float
    training_meta: dict

    @property
    def n_dims(self) -> int:
        return self.weights.shape[1]


def _objective(x, w: np.ndarray, b: float, y: np.ndarray, C: float) -> float:
    margins = y * (x @ w + b)
    hinge = np.maximum(0.0, 1.0 - margins)
    return 0.5 * float(w @ w) + C * float(hinge.sum())


def _solve_hinge(x, y: np.ndarray, C: float, epochs: int) -> tuple[np.ndarray, float, list[float]]:
    n, dim = x.shape
    w = np.zeros(dim)
    b = 0.0
    obj = _objective(x, w, b, y, C)
    trace = [obj]
    step = 1.0
    for _ in range(epochs):
        prev = obj
        for _ in range(_INNER_STEPS):
            margins = y * (x @ w + b)
            ya = np.where(margins < 1.0, y, 0.0)
            grad_w = w - C * (x.T @ ya)
            grad_b = -C * float(ya.sum())
            g2 = float(grad_w @ grad_w) + grad_b * grad_b
            if g2 <= 1e-24:
                break
            t = step
            while t > 1e-20:
                cand = _objective(x, w - t * grad_w, b - t * grad_b, y, C)
                if cand <= obj - _ARMIJO * t * g2:
                    break
                t *= 0.5
            else:
                break  # no descent step found at any scale
            w = w - t * grad_w
            b = b - t * grad_b
            obj = cand
            step = t * 2.0
        trace.append(obj)
        if prev - obj < _REL_TOL * max(1.0, abs(prev)):
            break
    return w, b, trace


def train(features: FeatureMatrix, labels, C: float = 1.0, epochs: int = 50,
          seed: int = 0) -> LinearModel:
    """Fit one-vs-rest weight vectors on the given feature view."""
    labels = np.asarray(labels, dtype=np.int64)
    if labels.shape[0] != features.n_rows:
        raise ValueError(
            "labels length %d does not match %d feature rows" % (labels.shape[0], features.n_rows)
        )
    classes = np.unique(labels)
    if classes.size < 2:
        raise DegenerateLabelsError(
            "degenerate labels: %d distinct class(es) in training set" % classes.size
        )
    if C <= 0:
        raise ValueError("C must be positive, got %r" % C)
    if epochs < 1:
        raise ValueError("epochs must be >= 1, got %d" % epochs)
    x = features.data if not features.is_sparse else features.data.astype(np.float64)
    if not features.is_sparse:
        x = np.asarray(x, dtype=np.float64)
    weights = np.empty((classes.size, features.n_cols))
    biases = np.empty(classes.size)
    traces = []
    for idx, cls in enumerate(classes):
        y = np.where(labels == cls, 1.0, -1.0)
        w, b, trace = _solve_hinge(x, y, C, epochs)
        weights[idx] = w
        biases[idx] = b
        traces.append(trace)
    meta = {
        "epochs_run": [len(t) - 1 for t in traces],
        "final_objectives": [t[-1] for t in traces],
        "objective_traces": traces,
        "seed": seed,
    }
    return LinearModel(classes=classes, weights=weights, biases=biases, C=C, training_meta=meta)


def decision_scores(model: LinearModel, features: FeatureMatrix) -> np.ndarray:
    """Raw per-class margins w_c.x + b_c, one row per feature row."""
    if features.n_cols != model.n_dims:
        raise ValueError(
            "dimension mismatch: features have %d columns, model expects %d"
            % (features.n_cols, model.n_dims)
        )
    scores = features.data @ model.weights.T + model.biases
    return np.asarray(scores, dtype=np.float64)


def predict(model: LinearModel, features: FeatureMatrix) -> np.ndarray:
    """Argmax of decision scores; ties break toward the lower class id."""
    scores = decision_scores(model, features)
    return model.classes[np.argmax(scores, axis=1)]


def save_model(model: LinearModel, path: str | Path) -> None:
    """Write the decision parameters as an LSVM blob (float32 weights).

    Classes must be the dense ids 0..n-1; the blob does not carry a
    separate id table.
    """
    n_classes = model.classes.size
    if not np.array_equal(model.classes, np.arange(n_classes)):
        raise ValueError("LSVM serialization requires dense class ids 0..n-1")
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<III", _VERSION, n_classes, model.n_dims))
        for idx in range(n_classes):
            fh.write(struct.pack("<f", model.biases[idx]))
            fh.write(np.asarray(model.weights[idx], dtype="<f4").tobytes())


def load_model(path: str | Path) -> LinearModel:
    """Read an LSVM blob; C and training metadata are not serialized."""
    with open(path, "rb") as fh:
        blob = fh.read()
    if blob[:4] != _MAGIC:
        raise ValueError("%s: bad magic %r" % (path, blob[:4]))
    version, n_classes, n_dims = struct.unpack_from("<III", blob, 4)
    if version != _VERSION:
        raise ValueError("%s: unsupported version %d" % (path, version))
    expected = 16 + n_classes * (4 + 4 * n_dims)
    if len(blob) != expected:
        raise ValueError("%s: expected %d bytes, got %d" % (path, expected, len(blob)))
    weights = np.empty((n_classes, n_dims))
    biases = np.empty(n_classes)
    offset = 16
    for idx in range(n_classes):
        (biases[idx],) = struct.unpack_from("<f", blob, offset)
        offset += 4
        weights[idx] = np.frombuffer(blob, dtype="<f4", count=n_dims, offset=offset)
        offset += 4 * n_dims
    return LinearModel(
        classes=np.arange(n_classes),
        weights=weights,
        biases=biases,
        C=float("nan"),
        training_meta={},
    )
