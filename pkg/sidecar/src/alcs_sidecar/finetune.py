"""The two training phases: masked-LM adaptation and task fine-tuning.

Both run plain full-corpus epochs with Adam and mutate the passed model in
place. Zero-epoch calls are exact no-ops so a degenerate pipeline equals
the pipeline that skips the phase.
"""

from __future__ import annotations

import torch
from torch import nn

from .runtime import encode, encoder_of, hidden_size_of, max_length_of, \
    mean_pool_last, real_token_mask

MASK_PROB = 0.15  # conventional MLM rate: 80% [MASK], 10% random, 10% kept


def mask_tokens(input_ids, maskable, vocab_size, mask_token_id, generator):
    """Standard MLM corruption; labels are -100 outside chosen positions.

    At least one position is always masked so a small batch can never
    yield an empty prediction target (which would make the loss NaN).
    """
    ids = input_ids.clone()
    labels = input_ids.clone()
    scores = torch.rand(ids.shape, generator=generator)
    chosen = (scores < MASK_PROB) & maskable
    if not chosen.any() and maskable.any():
        first = maskable.nonzero()[0]
        chosen[first[0], first[1]] = True
    labels[~chosen] = -100
    replace = torch.rand(ids.shape, generator=generator)
    use_mask = chosen & (replace < 0.8)
    use_random = chosen & (replace >= 0.8) & (replace < 0.9)
    ids[use_mask] = mask_token_id
    if use_random.any():
        random_ids = torch.randint(vocab_size, ids.shape, generator=generator)
        ids[use_random] = random_ids[use_random]
    return ids, labels


def mlm_loss(model, tokenizer, texts, mask_seed: int, batch_size: int = 16):
    """Masked-LM loss over the pool with a fixed masking seed, no updates."""
    generator = torch.Generator().manual_seed(mask_seed)
    model.eval()
    total, count = 0.0, 0
    with torch.no_grad():
        for start in range(0, len(texts), batch_size):
            batch, _ = encode(tokenizer, texts[start:start + batch_size],
                              max_length_of(model))
            maskable = real_token_mask(batch, tokenizer)
            ids, labels = mask_tokens(batch["input_ids"], maskable,
                                      model.config.vocab_size,
                                      tokenizer.mask_token_id, generator)
            out = model(input_ids=ids, attention_mask=batch["attention_mask"],
                        labels=labels)
            n = int((labels != -100).sum())
            total += float(out.loss) * max(n, 1)
            count += max(n, 1)
    return total / count


def mlm_adapt(model, tokenizer, texts, epochs: int, lr: float, seed: int,
              batch_size: int = 16) -> list[float]:
    """Continue pretraining on the pool; returns per-epoch mean losses."""
    if not texts:
        raise ValueError("pool is empty")
    if epochs == 0:
        return []
    torch.manual_seed(seed)
    generator = torch.Generator().manual_seed(seed)
    optimizer = torch.optim.Adam(model.parameters(), lr=lr)
    losses = []
    model.train()
    for _ in range(epochs):
        total, batches = 0.0, 0
        for start in range(0, len(texts), batch_size):
            batch, _ = encode(tokenizer, texts[start:start + batch_size],
                              max_length_of(model))
            maskable = real_token_mask(batch, tokenizer)
            ids, labels = mask_tokens(batch["input_ids"], maskable,
                                      model.config.vocab_size,
                                      tokenizer.mask_token_id, generator)
            optimizer.zero_grad()
            out = model(input_ids=ids, attention_mask=batch["attention_mask"],
                        labels=labels)
            out.loss.backward()
            optimizer.step()
            total += out.loss.detach().item()
            batches += 1
        losses.append(total / batches)
    model.eval()
    return losses


def atc_finetune(model, tokenizer, texts, labels, epochs: int, lr: float,
                 seed: int, batch_size: int = 16) -> list[float]:
    """Supervised tuning with a throwaway linear head over mean pooling.

    The head is created here and discarded on return; only the encoder
    weights persist. Returns per-epoch mean cross-entropy.
    """
    classes = sorted(set(labels))
    if len(classes) < 2:
        raise ValueError("labeled subset carries a single class")
    if len(texts) != len(labels):
        raise ValueError("got %d texts for %d labels" % (len(texts), len(labels)))
    index = {c: i for i, c in enumerate(classes)}
    targets = torch.tensor([index[label] for label in labels])
    if epochs == 0:
        return []
    torch.manual_seed(seed)
    encoder = encoder_of(model)
    head = nn.Linear(hidden_size_of(model), len(classes))
    optimizer = torch.optim.Adam(
        list(model.parameters()) + list(head.parameters()), lr=lr
    )
    ce = nn.CrossEntropyLoss()
    losses = []
    model.train()
    for _ in range(epochs):
        total, batches = 0.0, 0
        for start in range(0, len(texts), batch_size):
            batch, _ = encode(tokenizer, texts[start:start + batch_size],
                              max_length_of(model))
            out = encoder(input_ids=batch["input_ids"],
                          attention_mask=batch["attention_mask"])
            pooled = mean_pool_last(out.last_hidden_state,
                                    real_token_mask(batch, tokenizer))
            loss = ce(head(pooled), targets[start:start + batch_size])
            optimizer.zero_grad()
            loss.backward()
            optimizer.step()
            total += loss.detach().item()
            batches += 1
        losses.append(total / batches)
    model.eval()
    return losses
