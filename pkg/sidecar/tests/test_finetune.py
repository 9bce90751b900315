"""Masking, MLM adaptation, and supervised fine-tuning."""

import pytest
import torch

from alcs_sidecar.finetune import MASK_PROB, atc_finetune, mask_tokens, \
    mlm_adapt, mlm_loss
from alcs_sidecar.runtime import load_checkpoint
from conftest import topic_of

VOCAB = 1000
MASK_ID = 4


def big_batch(seed=0):
    g = torch.Generator().manual_seed(seed)
    ids = torch.randint(10, VOCAB, (200, 30), generator=g)
    return ids, torch.ones_like(ids, dtype=torch.bool)


def clone_state(model):
    return {k: v.detach().clone() for k, v in model.state_dict().items()}


def states_equal(a, b):
    return all(torch.equal(a[k], b[k]) for k in a)


class TestMaskTokens:
    def test_rate_and_labels(self):
        ids, maskable = big_batch()
        g = torch.Generator().manual_seed(7)
        out, labels = mask_tokens(ids, maskable, VOCAB, MASK_ID, g)
        chosen = labels != -100
        rate = chosen.float().mean().item()
        assert abs(rate - MASK_PROB) < 0.03
        # labels keep the original token exactly where prediction is asked
        assert torch.equal(labels[chosen], ids[chosen])
        assert ids is not out  # input never mutated
        assert torch.equal(ids, big_batch()[0])

    def test_corruption_split(self):
        """Roughly 80% [MASK], 10% random, 10% untouched among chosen."""
        ids, maskable = big_batch()
        g = torch.Generator().manual_seed(7)
        out, labels = mask_tokens(ids, maskable, VOCAB, MASK_ID, g)
        chosen = labels != -100
        n = int(chosen.sum())
        masked = int((out[chosen] == MASK_ID).sum()) / n
        kept = int((out[chosen] == ids[chosen]).sum()) / n
        assert 0.75 < masked < 0.85
        assert 0.06 < kept < 0.15

    def test_unmaskable_positions_untouched(self):
        ids, _ = big_batch()
        maskable = torch.zeros_like(ids, dtype=torch.bool)
        maskable[:, 5:25] = True
        g = torch.Generator().manual_seed(1)
        out, labels = mask_tokens(ids, maskable, VOCAB, MASK_ID, g)
        frozen = ~maskable
        assert torch.equal(out[frozen], ids[frozen])
        assert (labels[frozen] == -100).all()

    def test_deterministic(self):
        ids, maskable = big_batch()
        out1, lab1 = mask_tokens(ids, maskable, VOCAB, MASK_ID,
                                 torch.Generator().manual_seed(3))
        out2, lab2 = mask_tokens(ids, maskable, VOCAB, MASK_ID,
                                 torch.Generator().manual_seed(3))
        assert torch.equal(out1, out2)
        assert torch.equal(lab1, lab2)

    @pytest.mark.parametrize("seed", range(20))
    def test_at_least_one_target(self, seed):
        """A batch never ends up with zero prediction targets."""
        ids = torch.tensor([[42]])
        maskable = torch.tensor([[True]])
        g = torch.Generator().manual_seed(seed)
        _, labels = mask_tokens(ids, maskable, VOCAB, MASK_ID, g)
        assert int((labels != -100).sum()) == 1


class TestMlmAdapt:
    def test_zero_epochs_is_noop(self, checkpoint):
        tokenizer, model = checkpoint
        before = clone_state(model)
        assert mlm_adapt(model, tokenizer, ["fern moss"], epochs=0,
                         lr=5e-5, seed=0) == []
        assert states_equal(before, model.state_dict())

    def test_empty_pool_rejected(self, checkpoint):
        tokenizer, model = checkpoint
        with pytest.raises(ValueError, match="empty"):
            mlm_adapt(model, tokenizer, [], epochs=1, lr=5e-5, seed=0)

    def test_one_epoch_reduces_fixed_mask_loss(self, checkpoint, pool_docs):
        tokenizer, model = checkpoint
        texts = [d["text"] for d in pool_docs]
        before = mlm_loss(model, tokenizer, texts, mask_seed=9)
        mlm_adapt(model, tokenizer, texts, epochs=1, lr=5e-5, seed=3)
        after = mlm_loss(model, tokenizer, texts, mask_seed=9)
        assert after <= before

    def test_losses_logged_and_finite(self, checkpoint, pool_docs):
        tokenizer, model = checkpoint
        texts = [d["text"] for d in pool_docs]
        losses = mlm_adapt(model, tokenizer, texts, epochs=3, lr=5e-5, seed=0)
        assert len(losses) == 3
        assert all(x == x and abs(x) < 1e6 for x in losses)

    def test_deterministic_given_seed(self, checkpoint_dir, pool_docs):
        texts = [d["text"] for d in pool_docs[:16]]
        runs = []
        for _ in range(2):
            tokenizer, model = load_checkpoint(checkpoint_dir)
            losses = mlm_adapt(model, tokenizer, texts, epochs=2, lr=5e-4,
                               seed=11)
            runs.append((losses, clone_state(model)))
        assert runs[0][0] == runs[1][0]
        assert states_equal(runs[0][1], runs[1][1])


class TestAtcFinetune:
    def labeled20(self, pool_docs):
        texts = [d["text"] for d in pool_docs[:20]]
        labels = [topic_of(d["id"]) for d in pool_docs[:20]]
        return texts, labels

    def test_single_class_rejected(self, checkpoint):
        tokenizer, model = checkpoint
        with pytest.raises(ValueError, match="single class"):
            atc_finetune(model, tokenizer, ["a", "b"], ["x", "x"],
                         epochs=1, lr=5e-5, seed=0)

    def test_length_mismatch_rejected(self, checkpoint):
        tokenizer, model = checkpoint
        with pytest.raises(ValueError, match="3 texts for 2 labels"):
            atc_finetune(model, tokenizer, ["a", "b", "c"], ["x", "y"],
                         epochs=1, lr=5e-5, seed=0)

    def test_zero_epochs_keeps_encoder(self, checkpoint, pool_docs):
        tokenizer, model = checkpoint
        texts, labels = self.labeled20(pool_docs)
        before = clone_state(model)
        assert atc_finetune(model, tokenizer, texts, labels, epochs=0,
                            lr=5e-5, seed=0) == []
        assert states_equal(before, model.state_dict())

    def test_cross_entropy_decreases_over_five_epochs(self, checkpoint,
                                                      pool_docs):
        tokenizer, model = checkpoint
        texts, labels = self.labeled20(pool_docs)
        losses = atc_finetune(model, tokenizer, texts, labels, epochs=5,
                              lr=5e-5, seed=0)
        assert len(losses) == 5
        assert losses[-1] < losses[0]

    def test_encoder_weights_move(self, checkpoint, pool_docs):
        tokenizer, model = checkpoint
        texts, labels = self.labeled20(pool_docs)
        before = clone_state(model)
        atc_finetune(model, tokenizer, texts, labels, epochs=1, lr=5e-4,
                     seed=0)
        assert not states_equal(before, model.state_dict())

    def test_deterministic_given_seed(self, checkpoint_dir, pool_docs):
        texts = [d["text"] for d in pool_docs[:8]]
        labels = [topic_of(d["id"]) for d in pool_docs[:8]]
        runs = []
        for _ in range(2):
            tokenizer, model = load_checkpoint(checkpoint_dir)
            runs.append(atc_finetune(model, tokenizer, texts, labels,
                                     epochs=2, lr=5e-4, seed=6))
        assert runs[0] == runs[1]
