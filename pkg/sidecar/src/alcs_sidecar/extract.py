"""Embedding extraction: average of the last four hidden-state layers.

Each document becomes one vector: run the encoder, take the final four
layers of hidden states, and average over those layers and over the
document's real token positions. Padding and [CLS]/[SEP] are excluded so a
document's vector does not depend on how its batch was padded.
"""

from __future__ import annotations

import numpy as np
import torch

from .dvec import write_dvec
from .runtime import encode, encoder_of, max_length_of, real_token_mask

_LAYERS = 4


def extract_embeddings(model, tokenizer, texts, out_path=None, ids=None,
                       batch_size: int = 16):
    """Embed texts; returns (float32 matrix, truncated count).

    Writes a DVEC file (plus the ids sidecar) when out_path is given.
    """
    texts = list(texts)
    if not texts:
        raise ValueError("no texts to embed")
    encoder = encoder_of(model)
    encoder.eval()
    max_length = max_length_of(model)
    chunks = []
    truncated = 0
    with torch.no_grad():
        for start in range(0, len(texts), batch_size):
            batch, cut = encode(tokenizer, texts[start:start + batch_size],
                                max_length)
            truncated += cut
            out = encoder(
                input_ids=batch["input_ids"],
                attention_mask=batch["attention_mask"],
                output_hidden_states=True,
            )
            layers = torch.stack(out.hidden_states[-_LAYERS:])  # (L, B, T, H)
            per_token = layers.mean(dim=0)  # uniform weights: layer mean
            # then token mean equals the mean over all L*T vectors
            m = real_token_mask(batch, tokenizer).to(per_token.dtype)[:, :, None]
            summed = (per_token * m).sum(dim=1)
            denom = m.sum(dim=1).clamp(min=1.0)
            chunks.append((summed / denom).to(torch.float32).numpy())
    matrix = np.concatenate(chunks, axis=0)
    if not np.isfinite(matrix).all():
        raise ValueError("encoder produced non-finite embeddings")
    if out_path is not None:
        write_dvec(matrix, out_path, ids=ids)
    return matrix, truncated
