"""Shared fixtures: a miniature BERT checkpoint and a two-topic toy pool.

The checkpoint is built from scratch on first use (nothing is downloaded):
a 29-word WordPiece vocabulary, 4 layers, hidden size 32.  Weights are
seeded so every session starts from the same random model.
"""

import json

import numpy as np
import pytest
import torch
from tokenizers import Tokenizer
from tokenizers.models import WordPiece
from tokenizers.normalizers import BertNormalizer
from tokenizers.pre_tokenizers import BertPreTokenizer
from tokenizers.processors import TemplateProcessing
from transformers import BertConfig, BertForMaskedLM, PreTrainedTokenizerFast

SPECIALS = ["[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"]
FERN_WORDS = ["fern", "moss", "frond", "spore", "glade", "shade",
              "creek", "loam", "root", "leaf", "damp", "green"]
SLATE_WORDS = ["slate", "flint", "scree", "ridge", "quarry", "gravel",
               "cliff", "stone", "dust", "grey", "chisel", "seam"]


def build_mini_checkpoint(path):
    """Write a tokenizer + randomly initialised BertForMaskedLM to path."""
    words = SPECIALS + FERN_WORDS + SLATE_WORDS
    vocab = {w: i for i, w in enumerate(words)}
    # BertTokenizerFast(vocab_file=...) no longer reads plain vocab files,
    # so the backend tokenizer is assembled explicitly.
    backend = Tokenizer(WordPiece(vocab, unk_token="[UNK]"))
    backend.normalizer = BertNormalizer(lowercase=True)
    backend.pre_tokenizer = BertPreTokenizer()
    backend.post_processor = TemplateProcessing(
        single="[CLS] $A [SEP]",
        pair="[CLS] $A [SEP] $B [SEP]",
        special_tokens=[("[CLS]", vocab["[CLS]"]), ("[SEP]", vocab["[SEP]"])],
    )
    tokenizer = PreTrainedTokenizerFast(
        tokenizer_object=backend,
        unk_token="[UNK]", pad_token="[PAD]", cls_token="[CLS]",
        sep_token="[SEP]", mask_token="[MASK]")
    torch.manual_seed(1234)
    config = BertConfig(vocab_size=len(words), hidden_size=32,
                        num_hidden_layers=4, num_attention_heads=4,
                        intermediate_size=64, max_position_embeddings=32)
    model = BertForMaskedLM(config)
    tokenizer.save_pretrained(path)
    model.save_pretrained(path)
    return path


def make_pool_docs(n_docs=50, seed=77):
    """Alternating fern/slate documents, 6 to 10 words each."""
    rng = np.random.default_rng(seed)
    docs = []
    for i in range(n_docs):
        words = FERN_WORDS if i % 2 == 0 else SLATE_WORDS
        n = int(rng.integers(6, 11))
        docs.append({"id": i, "text": " ".join(rng.choice(words, size=n))})
    return docs


def topic_of(doc_id):
    return "fern" if doc_id % 2 == 0 else "slate"


@pytest.fixture(scope="session")
def checkpoint_dir(tmp_path_factory):
    path = tmp_path_factory.mktemp("ckpt") / "mini-bert"
    return build_mini_checkpoint(path)


@pytest.fixture
def checkpoint(checkpoint_dir):
    """Fresh (tokenizer, model) pair; fine-tuning mutates the model."""
    from alcs_sidecar.runtime import load_checkpoint
    return load_checkpoint(checkpoint_dir)


@pytest.fixture(scope="session")
def pool_docs():
    return make_pool_docs()


@pytest.fixture
def pool_file(tmp_path, pool_docs):
    path = tmp_path / "pool.jsonl"
    with open(path, "w", encoding="utf-8") as fh:
        for doc in pool_docs:
            fh.write(json.dumps(doc) + "\n")
    return path


@pytest.fixture
def labeled10():
    return [{"id": i, "label": topic_of(i)} for i in range(10)]
