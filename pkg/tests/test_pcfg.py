import itertools
import math
import random
from collections import Counter

import pytest

from pwbench.corpus import PasswordRecord
from pwbench.pcfg import (
    StructureModel,
    structure_enumerate,
    structure_prob,
    structure_sample,
    train_structure,
)
from pwbench.segmentation import parse_template


def full_candidate_space(model):
    """Independent oracle: expand every template's terminal cross product."""
    out = []
    for tpl, tprob in model.templates:
        if tprob <= 0.0:
            continue
        slot_terms = [model.terminals(cls, n) for cls, n in parse_template(tpl)]
        if any(not terms for terms in slot_terms):
            continue
        for combo in itertools.product(*slot_terms):
            text = "".join(t for t, _ in combo)
            prob = tprob
            for _, p in combo:
                prob *= p
            out.append((text, prob))
    out.sort(key=lambda tp: (-tp[1], tp[0]))
    return out


def random_toy_corpus(rng):
    words = ["ab", "cd", "ef", "x", "y", "zz"]
    digits = ["1", "2", "34", "56"]
    specials = ["!", "?", "!!"]
    recs = []
    for _ in range(rng.randint(3, 15)):
        parts = [rng.choice(words)]
        if rng.random() < 0.7:
            parts.append(rng.choice(digits))
        if rng.random() < 0.3:
            parts.append(rng.choice(specials))
        recs.append(PasswordRecord("".join(parts), rng.randint(1, 3)))
    return recs


HAND_CORPUS = [PasswordRecord("ab1"), PasswordRecord("cd2"), PasswordRecord("ab2")]


class TestTraining:
    def test_hand_frequencies(self):
        model = train_structure(HAND_CORPUS)
        assert model.template_prob("L2D1") == 1.0
        assert model.terminal_prob("L", 2, "ab") == pytest.approx(2 / 3)
        assert model.terminal_prob("L", 2, "cd") == pytest.approx(1 / 3)
        assert model.terminal_prob("D", 1, "2") == pytest.approx(2 / 3)

    def test_single_password(self):
        model = train_structure([PasswordRecord("x")])
        assert model.template_prob("L1") == 1.0
        assert model.terminal_prob("L", 1, "x") == 1.0

    def test_weighted_equals_exploded(self):
        weighted = train_structure([PasswordRecord("ab1", 2)])
        exploded = train_structure([PasswordRecord("ab1"), PasswordRecord("ab1")])
        assert weighted.template_counts == exploded.template_counts
        assert weighted.terminal_counts == exploded.terminal_counts

    def test_empty_fatal(self):
        with pytest.raises(ValueError):
            train_structure([])


class TestProb:
    def test_hand_products(self):
        model = train_structure(HAND_CORPUS)
        assert structure_prob(model, "ab2") == pytest.approx(4 / 9)
        assert structure_prob(model, "cd1") == pytest.approx(1 / 9)

    def test_unseen_template(self):
        model = train_structure(HAND_CORPUS)
        assert structure_prob(model, "abc!") == 0.0

    def test_training_passwords_reachable(self):
        rng = random.Random(11)
        for _ in range(10):
            corpus = random_toy_corpus(rng)
            model = train_structure(corpus)
            for rec in corpus:
                assert structure_prob(model, rec.text) > 0.0

    def test_total_mass(self):
        rng = random.Random(13)
        for _ in range(20):
            model = train_structure(random_toy_corpus(rng))
            total = sum(p for _, p in full_candidate_space(model))
            assert math.isclose(total, 1.0, abs_tol=1e-9)


class TestEnumerate:
    def test_hand_order(self):
        model = train_structure(HAND_CORPUS)
        out = list(structure_enumerate(model))
        assert [t for t, _ in out] == ["ab2", "ab1", "cd2", "cd1"]
        assert out[0][1] == pytest.approx(4 / 9)

    def test_single_candidate(self):
        model = train_structure([PasswordRecord("q7!")])
        assert [t for t, _ in structure_enumerate(model)] == ["q7!"]

    def test_oracle_equivalence(self):
        rng = random.Random(77)
        for _ in range(30):
            model = train_structure(random_toy_corpus(rng))
            expected = full_candidate_space(model)
            assert len(expected) <= 1000
            got = list(structure_enumerate(model))
            assert [t for t, _ in got] == [t for t, _ in expected]
            for (_, pg), (_, pe) in zip(got, expected):
                assert math.isclose(pg, pe, rel_tol=1e-9)

    def test_no_repeats_non_increasing(self):
        rng = random.Random(3)
        model = train_structure(random_toy_corpus(rng))
        out = list(structure_enumerate(model))
        texts = [t for t, _ in out]
        assert len(texts) == len(set(texts))
        probs = [p for _, p in out]
        assert all(a >= b for a, b in zip(probs, probs[1:]))

    def test_limit(self):
        model = train_structure(HAND_CORPUS)
        assert len(list(structure_enumerate(model, 2))) == 2


class TestSample:
    def test_constant_model(self):
        model = train_structure([PasswordRecord("q7!")])
        stream = structure_sample(model, 0)
        assert [next(stream) for _ in range(5)] == ["q7!"] * 5

    def test_same_seed_same_stream(self):
        model = train_structure(HAND_CORPUS)
        a = list(itertools.islice(structure_sample(model, 4), 200))
        b = list(itertools.islice(structure_sample(model, 4), 200))
        assert a == b

    def test_empirical_matches_prob(self):
        model = train_structure(HAND_CORPUS)
        n = 100_000
        counts = Counter(itertools.islice(structure_sample(model, 1), n))
        for text, _ in structure_enumerate(model):
            p = structure_prob(model, text)
            sigma = math.sqrt(p * (1 - p) / n)
            assert abs(counts[text] / n - p) < 3 * sigma + 1e-9


class TestModelFiles:
    def test_roundtrip(self, tmp_path):
        model = train_structure(HAND_CORPUS + [PasswordRecord("Zz!9", 3)])
        model.save(str(tmp_path / "m"))
        loaded = StructureModel.load(str(tmp_path / "m"))
        assert loaded.template_counts == model.template_counts
        assert loaded.terminal_counts == model.terminal_counts
        assert list(structure_enumerate(loaded)) == list(structure_enumerate(model))
