import random
from fractions import Fraction

import pytest

from pwbench.corpus import PasswordRecord
from pwbench.evaluation import (
    ResourceCapError,
    build_matcher,
    intersections,
    match_stream,
    rule_augmented_match,
    stats_report,
    top_frequency,
)
from pwbench.rules import parse_ruleset
from pwbench.segmentation import build_vocab


def random_strings(rng, n, length=6, alphabet="abcdef12"):
    return ["".join(rng.choice(alphabet) for _ in range(length)) for _ in range(n)]


class TestMatcher:
    def test_size(self):
        assert build_matcher(["b", "c", "d"]).size == 3

    def test_duplicates_collapse(self):
        assert build_matcher(["x", "x", "y"]).size == 2

    def test_agrees_with_set_oracle(self):
        rng = random.Random(1)
        test = random_strings(rng, 10_000, 4)
        matcher = build_matcher(test)
        oracle = set(test)
        for query in random_strings(rng, 10_000, 4):
            assert matcher.contains(query) == (query in oracle)

    def test_accepts_records(self):
        assert build_matcher([PasswordRecord("a")]).contains("a")


class TestMatchStream:
    def test_hand_example(self):
        ledger = match_stream(["a", "b", "c"], build_matcher(["b", "c", "d"]), [3])
        cp = ledger.checkpoints[0]
        assert (cp.generated, cp.unique, cp.matched) == (3, 3, 2)
        assert cp.matched_fraction == Fraction(2, 3)

    def test_full_recovery(self):
        test = ["p1", "p2", "p3"]
        ledger = match_stream(iter(test), build_matcher(test), [3])
        assert ledger.checkpoints[0].matched == 3

    def test_matched_item_counted_once(self):
        ledger = match_stream(["x", "x", "x"], build_matcher(["x"]), [3])
        assert ledger.checkpoints[-1].matched == 1
        assert ledger.checkpoints[-1].unique == 1

    def test_final_partial_checkpoint(self):
        ledger = match_stream(["a", "b"], build_matcher(["a"]), [10])
        assert ledger.checkpoints[-1].generated == 2

    def test_monotone_counters(self):
        rng = random.Random(2)
        candidates = random_strings(rng, 5000, 3)
        ledger = match_stream(
            candidates, build_matcher(random_strings(rng, 500, 3)),
            [100, 500, 1000, 5000],
        )
        rows = ledger.checkpoints
        for a, b in zip(rows, rows[1:]):
            assert a.generated <= b.generated
            assert a.unique <= b.unique
            assert a.matched <= b.matched
        for row in rows:
            assert row.unique <= row.generated
            assert row.matched <= min(row.unique, row.test_size)

    def test_brute_force_oracle(self):
        rng = random.Random(3)
        for _ in range(10):
            candidates = random_strings(rng, 10_000, 3)
            test = random_strings(rng, 1000, 3)
            matcher = build_matcher(test)
            checkpoints = [1000, 5000, 10_000]
            ledger = match_stream(candidates, matcher, checkpoints)
            for n0, cp in zip(checkpoints, ledger.checkpoints):
                prefix = set(candidates[:n0])
                assert cp.unique == len(prefix)
                assert cp.matched == len(prefix & set(test))

    def test_bad_checkpoints(self):
        with pytest.raises(ValueError):
            match_stream([], build_matcher([]), [5, 5])

    def test_unique_cap(self):
        with pytest.raises(ResourceCapError):
            match_stream(["a", "b", "c"], build_matcher([]), [3], max_unique=2)


class TestRuleAugmented:
    def test_rule_finds_missed_match(self):
        report = rule_augmented_match(
            ["pass"], parse_ruleset(["$1"]), build_matcher(["pass1"])
        )
        assert report.matched_raw == 0
        assert report.matched_with_rules == 1

    def test_empty_ruleset(self):
        report = rule_augmented_match(
            ["a", "b"], parse_ruleset([]), build_matcher(["a"])
        )
        assert report.matched_with_rules == report.matched_raw == 1

    def test_identity_ruleset(self):
        report = rule_augmented_match(
            ["a", "b", "b"], parse_ruleset([":"]), build_matcher(["b", "z"])
        )
        assert report.rule_outputs == report.unique == 2
        assert report.matched_with_rules == report.matched_raw == 1

    def test_counting_bound(self):
        rs = parse_ruleset([":", "l", "u", "$1", "$2"])
        words = [f"Word{i}" for i in range(40)]
        report = rule_augmented_match(words, rs, build_matcher(["word3"]))
        assert report.rule_outputs_raw <= len(rs.chains) * report.unique
        assert report.matched_with_rules >= report.matched_raw


class TestIntersections:
    def test_two_sets(self):
        report = intersections({"A": {"1", "2"}, "B": {"2", "3"}})
        assert report.regions == {0b01: 1, 0b10: 1, 0b11: 1}

    def test_identical_sets(self):
        s = {"x", "y"}
        report = intersections({"A": set(s), "B": set(s)})
        assert report.regions == {0b11: 2}

    def test_partition_of_union(self):
        rng = random.Random(4)
        sets = {
            lab: set(random_strings(rng, 1000, 3)) for lab in ["m1", "m2", "m3", "m4"]
        }
        report = intersections(sets)
        union = set().union(*sets.values())
        assert report.union_size() == len(union)

    def test_brute_force_oracle(self):
        rng = random.Random(5)
        labels = ["a", "b", "c", "d"]
        sets = {lab: set(random_strings(rng, 1000, 3)) for lab in labels}
        report = intersections(sets)
        expected: dict[int, int] = {}
        for item in set().union(*sets.values()):
            mask = sum(1 << i for i, lab in enumerate(labels) if item in sets[lab])
            expected[mask] = expected.get(mask, 0) + 1
        assert report.regions == expected

    def test_arity_bounds(self):
        with pytest.raises(ValueError):
            intersections({"only": set()})


class TestTopFrequency:
    def test_modal(self):
        assert top_frequency(["a", "a", "b", "c"]) == ("a", Fraction(1, 2))

    def test_all_distinct_lexicographic_min(self):
        assert top_frequency(["c", "a", "b"]) == ("a", Fraction(1, 3))

    def test_empty_fatal(self):
        with pytest.raises(ValueError):
            top_frequency([])


class TestStatsReport:
    def vocab(self):
        from pwbench.corpus import DEFAULT_CHARSET

        return build_vocab([PasswordRecord("password!23")], n=10, charset=DEFAULT_CHARSET)

    def test_self_comparison_zero_distance(self):
        stream = ["abc1", "xy!", "Q9"]
        report = stats_report(stream, [PasswordRecord(t) for t in stream], self.vocab())
        assert all(d == 0 for d in report.l1_distances().values())

    def test_pattern_histogram(self):
        report = stats_report(
            ["password!23"], [PasswordRecord("password!23")], self.vocab()
        )
        assert report.pattern_hist == {"L8S1D2": Fraction(1)}
        assert report.signature_hist == {"lsd": Fraction(1)}

    def test_disjoint_patterns_distance_two(self):
        report = stats_report(["aaaa"], [PasswordRecord("1111")], self.vocab())
        assert report.l1_distances()["pattern"] == 2

    def test_histograms_sum_to_one(self):
        rng = random.Random(6)
        stream = random_strings(rng, 500, 5, alphabet="ab1!")
        report = stats_report(stream, [PasswordRecord("a1")], self.vocab())
        for hist in (report.pattern_hist, report.signature_hist, report.segment_count_hist):
            assert sum(hist.values()) == 1
