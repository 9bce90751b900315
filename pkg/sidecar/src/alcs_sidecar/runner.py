"""Request execution: variant step sequence, DVEC output, reply manifest.

Variant step DAG:

    none      -> extract
    mlm_only  -> mlm_adapt -> extract
    one_step  -> atc_finetune -> extract
    dotcal    -> mlm_adapt -> atc_finetune -> extract

Each executed phase appends a machine-readable entry to the step log that
ends up in the reply, so callers can audit exactly what ran.
"""

from __future__ import annotations

from pathlib import Path

from .extract import extract_embeddings
from .finetune import atc_finetune, mlm_adapt
from .manifest import FinetuneRequest, ManifestError, load_pool, load_request, \
    write_reply
from .runtime import hidden_size_of, load_checkpoint

# fixed per-phase seed offsets: a skipped or zero-epoch phase leaves the
# RNG stream of later phases untouched
_SEED_MLM = 101
_SEED_ATC = 211

_MLM_VARIANTS = ("mlm_only", "dotcal")
_ATC_VARIANTS = ("one_step", "dotcal")


def _labeled_texts(request: FinetuneRequest, pool):
    texts = dict(pool)
    docs, labels = [], []
    for doc_id, label in request.labeled:
        if doc_id not in texts:
            raise ManifestError(
                "labeled id %d is not part of the pool" % doc_id
            )
        docs.append(texts[doc_id])
        labels.append(label)
    return docs, labels


def execute(request: FinetuneRequest) -> dict:
    """Run the variant pipeline; returns the reply payload (not yet written)."""
    pool = load_pool(request.pool_texts)
    pool_ids = [doc_id for doc_id, _ in pool]
    pool_texts = [text for _, text in pool]
    tokenizer, model = load_checkpoint(request.model)
    steps = []

    # zero-epoch phases are no-ops and leave no step entry, so a dotcal
    # request with epochs_mlm=0 produces the same step log as one_step
    if request.variant in _MLM_VARIANTS and request.epochs_mlm > 0:
        losses = mlm_adapt(model, tokenizer, pool_texts, request.epochs_mlm,
                           request.lr, request.seed + _SEED_MLM)
        steps.append({"step": "mlm_adapt", "epochs": len(losses),
                      "losses": losses})
    if request.variant in _ATC_VARIANTS:
        docs, labels = _labeled_texts(request, pool)
        if request.epochs_atc > 0:
            losses = atc_finetune(model, tokenizer, docs, labels,
                                  request.epochs_atc, request.lr,
                                  request.seed + _SEED_ATC)
            steps.append({"step": "atc_finetune", "epochs": len(losses),
                          "losses": losses})

    matrix, truncated = extract_embeddings(model, tokenizer, pool_texts,
                                           out_path=request.out, ids=pool_ids)
    steps.append({"step": "extract", "rows": int(matrix.shape[0]),
                  "cols": int(matrix.shape[1]), "truncated": truncated})

    reply = dict(request.raw)
    reply.update(
        rows=int(matrix.shape[0]),
        cols=int(matrix.shape[1]),
        hidden_size=hidden_size_of(model),
        truncated=truncated,
        steps=steps,
    )
    return reply


def run_request(request_path: str | Path) -> Path:
    """Full request lifecycle; deletes partial outputs if anything fails."""
    request = load_request(request_path)
    try:
        reply = execute(request)
    except Exception:
        for leftover in (request.out, request.out + ".ids",
                         str(request_path) + ".done"):
            Path(leftover).unlink(missing_ok=True)
        raise
    return write_reply(request_path, reply)
