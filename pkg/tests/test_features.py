import logging
import math

import numpy as np
import pytest
import scipy.sparse as sp

from alcs.features import (
    FeatureMatrix,
    Vocabulary,
    fit_vocabulary,
    similarity_view,
    tfidf,
    tokenize,
)

from oracles import cosine


class TestTokenize:
    def test_case_folding_and_punctuation(self):
        assert tokenize("The cat, the CAT.") == ["the", "cat", "the", "cat"]

    def test_short_tokens_dropped(self):
        assert tokenize("a b c") == []

    def test_mixed_hyphenation_and_digits(self):
        assert tokenize("BERT-based AL, 2-step") == ["bert", "based", "al", "step"]

    def test_empty(self):
        assert tokenize("") == []

    def test_underscore_is_a_separator(self):
        assert tokenize("foo_bar") == ["foo", "bar"]


class TestFitVocabulary:
    def test_basic(self):
        vocab = fit_vocabulary(["a cat", "a dog"], min_df=1)
        assert vocab.terms == ["cat", "dog"]
        assert vocab.df.tolist() == [1, 1]
        assert vocab.n_docs_fitted == 2

    def test_min_df_filters_everything(self):
        with pytest.raises(ValueError, match="no terms survive min_df"):
            fit_vocabulary(["a cat", "a dog"], min_df=2)

    def test_df_counts_documents_not_occurrences(self):
        vocab = fit_vocabulary(
            ["model model model", "the model", "the other"], min_df=1
        )
        assert vocab.df[vocab.index["model"]] == 2

    def test_terms_sorted_lexicographically(self):
        vocab = fit_vocabulary(["zebra apple", "apple zebra mango"], min_df=1)
        assert vocab.terms == sorted(vocab.terms)

    def test_empty_corpus(self):
        with pytest.raises(ValueError):
            fit_vocabulary([], min_df=1)

    def test_idf_floor_and_monotonicity(self):
        vocab = Vocabulary(terms=["p", "q", "r"], df=np.array([3, 2, 1]),
                           n_docs_fitted=3)
        idf = vocab.idf()
        assert idf[0] == pytest.approx(1.0)  # df == N
        assert idf[0] < idf[1] < idf[2]
        assert np.all(idf >= 1.0)


class TestTfidf:
    def test_single_term_row_normalizes_to_one(self):
        vocab = fit_vocabulary(["cat cat cat"], min_df=1)
        mat = tfidf(["cat cat"], vocab)
        assert mat.data.toarray().tolist() == [[1.0]]

    def test_hand_computed_three_doc_matrix(self):
        # counts [[2,0],[0,1],[1,1]] over terms (cat, dog)
        texts = ["cat cat", "dog", "cat dog"]
        vocab = fit_vocabulary(texts, min_df=1)
        mat = tfidf(texts, vocab).data.toarray()
        idf = math.log(4.0 / 3.0) + 1.0  # both terms have df=2, N=3
        raw = np.array([[2.0, 0.0], [0.0, 1.0], [1.0, 1.0]]) * idf
        expected = raw / np.linalg.norm(raw, axis=1, keepdims=True)
        np.testing.assert_allclose(mat, expected, rtol=0, atol=1e-12)

    def test_unit_norms_on_random_corpus(self):
        rng = np.random.default_rng(42)
        words = ["w%02d" % i for i in range(30)]
        texts = [
            " ".join(rng.choice(words, size=rng.integers(3, 12)))
            for _ in range(50)
        ]
        vocab = fit_vocabulary(texts, min_df=2)
        mat = tfidf(texts, vocab)
        norms = np.sqrt(np.asarray(mat.data.multiply(mat.data).sum(axis=1)).ravel())
        nonzero = norms[norms > 0]
        np.testing.assert_allclose(nonzero, 1.0, atol=1e-9)

    def test_all_oov_document_gives_zero_row(self, caplog):
        vocab = fit_vocabulary(["cat cat", "cat dog"], min_df=1)
        with caplog.at_level(logging.WARNING):
            mat = tfidf(["zebra quagga"], vocab)
        assert mat.data.getnnz() == 0
        assert any("zero rows" in r.message for r in caplog.records)

    def test_oov_tokens_ignored(self):
        vocab = fit_vocabulary(["cat dog", "cat dog"], min_df=1)
        with_oov = tfidf(["cat dog unknown"], vocab).data.toarray()
        without = tfidf(["cat dog"], vocab).data.toarray()
        np.testing.assert_allclose(with_oov, without, atol=1e-12)


class TestSimilarityView:
    def test_three_four_five(self):
        mat = FeatureMatrix(np.array([[3.0, 4.0]]), kind="embedding")
        view = similarity_view(mat)
        np.testing.assert_allclose(view.data, [[0.6, 0.8]], atol=1e-12)

    def test_idempotent(self):
        rng = np.random.default_rng(0)
        mat = FeatureMatrix(rng.standard_normal((10, 4)), kind="embedding")
        once = similarity_view(mat)
        twice = similarity_view(once)
        np.testing.assert_allclose(once.data, twice.data, atol=1e-12)

    def test_zero_rows_stay_zero(self):
        data = np.array([[0.0, 0.0], [1.0, 1.0]])
        view = similarity_view(FeatureMatrix(data, kind="embedding"))
        assert view.data[0].tolist() == [0.0, 0.0]

    def test_dot_equals_cosine_oracle(self):
        rng = np.random.default_rng(7)
        rows = rng.standard_normal((20, 6)) * rng.uniform(0.1, 5.0, size=(20, 1))
        view = similarity_view(FeatureMatrix(rows, kind="embedding"))
        for i in range(0, 20, 3):
            for j in range(1, 20, 4):
                expected = cosine(rows[i], rows[j])
                got = float(view.data[i] @ view.data[j])
                assert got == pytest.approx(expected, abs=1e-9)

    def test_sparse_path_matches_dense(self):
        rng = np.random.default_rng(3)
        dense = rng.random((8, 5))
        dense[dense < 0.5] = 0.0
        sv_dense = similarity_view(FeatureMatrix(dense.copy(), kind="embedding"))
        sv_sparse = similarity_view(FeatureMatrix(sp.csr_matrix(dense), kind="bow"))
        np.testing.assert_allclose(
            sv_sparse.data.toarray(), sv_dense.data, atol=1e-12
        )


class TestFeatureMatrix:
    def test_rejects_nan(self):
        with pytest.raises(ValueError, match="NaN"):
            FeatureMatrix(np.array([[np.nan, 1.0]]), kind="embedding")

    def test_rejects_unknown_kind(self):
        with pytest.raises(ValueError, match="kind"):
            FeatureMatrix(np.zeros((1, 1)), kind="tfidf")

    def test_sparse_explicit_zeros_eliminated(self):
        mat = sp.csr_matrix(
            (np.array([0.0, 1.0, 2.0]), ([0, 0, 1], [0, 1, 0])), shape=(2, 2)
        )
        assert mat.getnnz() == 3  # stored zero present before validation
        fm = FeatureMatrix(mat, kind="bow")
        assert fm.data.getnnz() == 2

    def test_ids_length_checked(self):
        with pytest.raises(ValueError, match="ids length"):
            FeatureMatrix(np.zeros((2, 2)), kind="lsi", ids=[1])

    def test_take_rows_carries_ids(self):
        fm = FeatureMatrix(np.eye(3), kind="lsi", ids=[10, 20, 30])
        sub = fm.take_rows([2, 0])
        assert sub.ids == [30, 10]
        np.testing.assert_array_equal(sub.data, np.eye(3)[[2, 0]])
