import itertools
import math
import random

import pytest

from pwbench.corpus import PasswordRecord
from pwbench.markov import (
    BOS,
    EOS,
    NgramModel,
    ngram_enumerate,
    ngram_prob,
    ngram_sample,
    train_ngram,
)


def brute_force_ranking(model, alphabet, max_len):
    """Independent oracle: score every string up to max_len and sort."""
    scored = []
    for length in range(0, max_len + 1):
        for chars in itertools.product(alphabet, repeat=length):
            text = "".join(chars)
            p = ngram_prob(model, text)
            if p > 0.0:
                scored.append((text, p))
    scored.sort(key=lambda tp: (-tp[1], tp[0]))
    return scored


def random_toy_corpus(rng):
    alphabet = "abcd"[: rng.randint(2, 4)]
    return [
        PasswordRecord(
            "".join(rng.choice(alphabet) for _ in range(rng.randint(1, 5))),
            rng.randint(1, 3),
        )
        for _ in range(rng.randint(2, 12))
    ], alphabet


class TestTraining:
    def test_hand_bigram(self):
        model = train_ngram([PasswordRecord("aa")], order=2)
        assert model.transition_prob(BOS, "a") == 1.0
        assert model.transition_prob("a", "a") == 0.5
        assert model.transition_prob("a", EOS) == 0.5

    def test_empty_corpus(self):
        model = train_ngram([], order=2)
        assert list(ngram_enumerate(model, 10)) == []

    def test_hand_prob(self):
        model = train_ngram([PasswordRecord("ab"), PasswordRecord("ac")], order=2)
        assert ngram_prob(model, "ab") == 0.5

    def test_bad_order(self):
        with pytest.raises(ValueError):
            train_ngram([], order=0)

    def test_weighted_equals_exploded(self):
        weighted = train_ngram([PasswordRecord("ab", 3), PasswordRecord("b", 2)], 2)
        exploded = train_ngram(
            [PasswordRecord("ab")] * 3 + [PasswordRecord("b")] * 2, 2
        )
        assert weighted.counts == exploded.counts


class TestProb:
    def test_unseen_zero(self):
        model = train_ngram([PasswordRecord("ab")], order=2)
        assert ngram_prob(model, "zz") == 0.0

    def test_context_distributions_normalized(self):
        rng = random.Random(5)
        for _ in range(20):
            corpus, _ = random_toy_corpus(rng)
            for alpha in (0.0, 0.5):
                model = train_ngram(corpus, order=rng.choice([2, 3]), smoothing=alpha)
                for context in model.counts:
                    total = sum(p for _, p in model.distribution(context))
                    assert math.isclose(total, 1.0, abs_tol=1e-12)

    def test_total_mass_with_overflow(self):
        # Oracle: dynamic programming over contexts gives the probability
        # mass escaping past max_len; enumerated mass + overflow = 1.
        rng = random.Random(9)
        for _ in range(10):
            corpus, alphabet = random_toy_corpus(rng)
            max_len = 4
            model = train_ngram(corpus, order=2, max_len=max_len)
            enumerated = sum(p for _, p in brute_force_ranking(model, alphabet, max_len))
            overflow = 0.0
            for chars in itertools.product(alphabet, repeat=max_len):
                prefix_p = 1.0
                context = BOS
                for ch in chars:
                    prefix_p *= model.transition_prob(context, ch)
                    context = ch
                if prefix_p > 0.0:
                    overflow += prefix_p * (1.0 - model.transition_prob(context, EOS))
            assert math.isclose(enumerated + overflow, 1.0, rel_tol=1e-9)


class TestSampling:
    def test_deterministic_chain(self):
        model = train_ngram([PasswordRecord("aa")], order=3)
        stream = ngram_sample(model, seed=0)
        assert [next(stream) for _ in range(5)] == ["aa"] * 5

    def test_same_seed_same_stream(self):
        model = train_ngram([PasswordRecord("ab"), PasswordRecord("ac")], order=2)
        a = list(itertools.islice(ngram_sample(model, 7), 100))
        b = list(itertools.islice(ngram_sample(model, 7), 100))
        assert a == b

    def test_empirical_frequency(self):
        model = train_ngram([PasswordRecord("ab"), PasswordRecord("ac")], order=2)
        n = 100_000
        hits = sum(
            1 for s in itertools.islice(ngram_sample(model, 1), n) if s == "ab"
        )
        assert abs(hits / n - 0.5) < 0.01

    def test_max_len_respected(self):
        model = train_ngram([PasswordRecord("aaa", 5), PasswordRecord("a")], order=2,
                            max_len=3)
        assert all(
            len(s) <= 3 for s in itertools.islice(ngram_sample(model, 3), 2000)
        )

    def test_empty_model_fatal(self):
        with pytest.raises(ValueError):
            next(ngram_sample(NgramModel(order=2), seed=0))


class TestEnumerate:
    def test_single_chain(self):
        model = train_ngram([PasswordRecord("aa")], order=3)
        assert list(ngram_enumerate(model)) == [("aa", 1.0)]

    def test_hand_order(self):
        model = train_ngram(
            [PasswordRecord("ab", 2), PasswordRecord("ac", 1)], order=2
        )
        out = [t for t, _ in ngram_enumerate(model, 2)]
        assert out == ["ab", "ac"]

    def test_limit(self):
        model = train_ngram([PasswordRecord("ab"), PasswordRecord("ac")], order=2)
        assert len(list(ngram_enumerate(model, 1))) == 1

    def test_oracle_equivalence(self):
        rng = random.Random(2024)
        for _ in range(30):
            corpus, alphabet = random_toy_corpus(rng)
            model = train_ngram(corpus, order=rng.choice([2, 3]), max_len=5)
            expected = brute_force_ranking(model, alphabet, 5)
            got = list(ngram_enumerate(model))
            assert [t for t, _ in got] == [t for t, _ in expected]
            for (_, pg), (_, pe) in zip(got, expected):
                assert math.isclose(pg, pe, rel_tol=1e-12)

    def test_probabilities_non_increasing(self):
        model = train_ngram(
            [PasswordRecord("abc"), PasswordRecord("abd"), PasswordRecord("cab", 2)],
            order=3,
        )
        probs = [p for _, p in ngram_enumerate(model)]
        assert all(a >= b for a, b in zip(probs, probs[1:]))


class TestModelFile:
    def test_roundtrip(self, tmp_path):
        model = train_ngram(
            [PasswordRecord("ab1"), PasswordRecord("b!", 2)], order=3,
            smoothing=0.25, max_len=9,
        )
        path = str(tmp_path / "m.ngram")
        model.save(path)
        loaded = NgramModel.load(path)
        assert loaded.order == 3 and loaded.smoothing == 0.25 and loaded.max_len == 9
        assert loaded.counts == model.counts

    def test_bad_header(self, tmp_path):
        path = tmp_path / "bad.ngram"
        path.write_text("nope\n")
        with pytest.raises(ValueError):
            NgramModel.load(str(path))
