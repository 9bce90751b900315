"""Checkpoint loading and shared tokenization helpers."""

from __future__ import annotations

from pathlib import Path

import torch
from transformers import AutoModelForMaskedLM, AutoTokenizer
from transformers.utils import logging as hf_logging

hf_logging.set_verbosity_error()
hf_logging.disable_progress_bar()


def load_checkpoint(model_id: str):
    """Load tokenizer + masked-LM model from a local checkpoint directory."""
    if not Path(model_id).exists():
        raise FileNotFoundError("model checkpoint %r not found" % model_id)
    tokenizer = AutoTokenizer.from_pretrained(model_id, local_files_only=True)
    model = AutoModelForMaskedLM.from_pretrained(model_id, local_files_only=True)
    model.eval()
    return tokenizer, model


def encoder_of(model):
    """Base transformer under the MLM head, architecture-agnostic."""
    return model.base_model


def hidden_size_of(model) -> int:
    return int(model.config.hidden_size)


def max_length_of(model) -> int:
    return int(model.config.max_position_embeddings)


def encode(tokenizer, texts, max_length: int):
    """Tokenize with truncation; also count how many texts got truncated."""
    full = tokenizer(list(texts), add_special_tokens=True)["input_ids"]
    truncated = sum(1 for ids in full if len(ids) > max_length)
    batch = tokenizer(
        list(texts),
        padding=True,
        truncation=True,
        max_length=max_length,
        return_tensors="pt",
    )
    return batch, truncated


def real_token_mask(batch, tokenizer) -> torch.Tensor:
    """True where a position holds an actual document token.

    Padding and the [CLS]/[SEP] scaffolding are dropped; unknown-word
    tokens still count, they carry the document's positions.
    """
    ids = batch["input_ids"]
    mask = batch["attention_mask"].bool()
    for special in (tokenizer.pad_token_id, tokenizer.cls_token_id,
                    tokenizer.sep_token_id):
        if special is not None:
            mask &= ids != special
    return mask


def mean_pool_last(hidden, mask) -> torch.Tensor:
    """Mean of one hidden-state layer over real tokens, per sequence."""
    m = mask.to(hidden.dtype).unsqueeze(-1)
    summed = (hidden * m).sum(dim=1)
    denom = m.sum(dim=1).clamp(min=1.0)
    return summed / denom
