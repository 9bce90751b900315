"""Request/reply manifest handling.

A request is a single JSON object; the reply is written next to it at
``<request path>.done`` and echoes the request fields so the caller can
verify it is answering the right question.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

VARIANTS = ("none", "mlm_only", "one_step", "dotcal")
# which variants are allowed to see labels; the complement must not
_LABELED_VARIANTS = ("one_step", "dotcal")

_REQUIRED = ("variant", "model", "pool_texts", "labeled", "out",
             "epochs_mlm", "epochs_atc", "lr")


class ManifestError(ValueError):
    """Request fails validation before any work starts."""


@dataclass(frozen=True)
class FinetuneRequest:
    variant: str
    model: str
    pool_texts: str
    labeled: tuple  # ((id, label), ...) in request order
    out: str
    epochs_mlm: int = 10
    epochs_atc: int = 5
    lr: float = 5e-5
    seed: int = 0
    raw: dict = field(default_factory=dict, compare=False)


def _parse_labeled(value) -> tuple:
    if not isinstance(value, list):
        raise ManifestError("labeled must be a list of {id, label} objects")
    out = []
    for entry in value:
        if not isinstance(entry, dict) or "id" not in entry or "label" not in entry:
            raise ManifestError("labeled entry %r lacks id/label" % (entry,))
        out.append((int(entry["id"]), str(entry["label"])))
    return tuple(out)


def load_request(path: str | Path) -> FinetuneRequest:
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ManifestError("cannot read request %s: %s" % (path, exc)) from exc
    except json.JSONDecodeError as exc:
        raise ManifestError("request %s is not valid JSON: %s" % (path, exc)) from exc
    if not isinstance(raw, dict):
        raise ManifestError("request root must be a JSON object")
    missing = [key for key in _REQUIRED if key not in raw]
    if missing:
        raise ManifestError("request is missing fields: %s" % ", ".join(missing))

    variant = raw["variant"]
    if variant not in VARIANTS:
        raise ManifestError(
            "unknown variant %r (expected one of %s)" % (variant, ", ".join(VARIANTS))
        )
    labeled = _parse_labeled(raw["labeled"])
    if variant in _LABELED_VARIANTS and not labeled:
        raise ManifestError("variant %r requires a non-empty labeled subset" % variant)
    if variant not in _LABELED_VARIANTS and labeled:
        raise ManifestError("variant %r must not receive labels" % variant)

    epochs_mlm = int(raw["epochs_mlm"])
    epochs_atc = int(raw["epochs_atc"])
    if epochs_mlm < 0 or epochs_atc < 0:
        raise ManifestError("epoch counts must be >= 0")
    lr = float(raw["lr"])
    if lr <= 0:
        raise ManifestError("lr must be positive")

    return FinetuneRequest(
        variant=variant,
        model=str(raw["model"]),
        pool_texts=str(raw["pool_texts"]),
        labeled=labeled,
        out=str(raw["out"]),
        epochs_mlm=epochs_mlm,
        epochs_atc=epochs_atc,
        lr=lr,
        seed=int(raw.get("seed", 0)),
        raw=dict(raw),
    )


def load_pool(path: str | Path) -> list[tuple[int, str]]:
    """Read the pool JSONL: one {"id", "text"} object per line."""
    pool = []
    try:
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    record = json.loads(line)
                    pool.append((int(record["id"]), str(record["text"])))
                except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                    raise ManifestError(
                        "%s line %d: bad pool record (%s)" % (path, lineno, exc)
                    ) from exc
    except OSError as exc:
        raise ManifestError("cannot read pool %s: %s" % (path, exc)) from exc
    if not pool:
        raise ManifestError("pool %s is empty" % path)
    return pool


def write_reply(request_path: str | Path, payload: dict) -> Path:
    reply_path = Path(str(request_path) + ".done")
    reply_path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n",
                          encoding="utf-8")
    return reply_path
