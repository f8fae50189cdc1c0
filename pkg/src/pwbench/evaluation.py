"""Measurement side: checkpointed matching, rule-augmented matching,
modal-candidate frequency, distribution statistics, intersections.

Matching is exact membership over the unique test texts (hashed set, no
false positives); reported fractions are exact rationals rendered at
fixed precision. Candidate streams are consumed once; the streaming dedup
set is capped and overflow fails fast.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import IO, Iterable, Iterator, Sequence

from .rules import RuleSet, apply_ruleset
from .segmentation import SegmentVocab, class_signature, pattern_template, tokenize


class ResourceCapError(Exception):
    """A documented in-memory cap was exceeded (exit code 3 at the CLI)."""


@dataclass
class Matcher:
    """Exact membership over unique test texts."""

    texts: frozenset[str]

    @property
    def size(self) -> int:
        return len(self.texts)

    def contains(self, text: str) -> bool:
        return text in self.texts

    def memory_estimate_bytes(self) -> int:
        # rough: set slot + string object + payload per entry
        return sum(64 + 56 + len(t) for t in self.texts)


def build_matcher(test: Iterable) -> Matcher:
    return Matcher(frozenset(item.text if hasattr(item, "text") else item for item in test))


@dataclass(frozen=True)
class Checkpoint:
    generated: int        # candidates consumed so far (with repeats)
    unique: int           # distinct candidates so far
    matched: int          # distinct test items hit so far
    test_size: int

    @property
    def matched_fraction(self) -> Fraction:
        return Fraction(self.matched, self.test_size) if self.test_size else Fraction(0)


@dataclass
class MatchLedger:
    checkpoints: list[Checkpoint] = field(default_factory=list)

    def write_tsv(self, fh: IO[str]) -> None:
        fh.write("generated\tunique\tmatched\tmatched_fraction\n")
        for cp in self.checkpoints:
            fh.write(
                f"{cp.generated}\t{cp.unique}\t{cp.matched}\t{float(cp.matched_fraction):.6f}\n"
            )

    def to_json(self) -> str:
        return json.dumps(
            [
                {
                    "generated": cp.generated,
                    "unique": cp.unique,
                    "matched": cp.matched,
                    "matched_fraction": float(cp.matched_fraction),
                }
                for cp in self.checkpoints
            ],
            indent=2,
        )


def match_stream(
    candidates: Iterable[str],
    matcher: Matcher,
    checkpoints: Sequence[int],
    max_unique: int | None = None,
) -> MatchLedger:
    """Stream candidates once, recording counts at each checkpoint.

    A matched test item counts once no matter how many candidates hit it.
    If the stream ends between checkpoints, a final row at the actual
    generated count is appended.
    """
    if list(checkpoints) != sorted(set(checkpoints)) or any(c <= 0 for c in checkpoints):
        raise ValueError("checkpoints must be strictly increasing positive counts")
    ledger = MatchLedger()
    seen: set[str] = set()
    matched: set[str] = set()
    pending = list(checkpoints)
    generated = 0
    for cand in candidates:
        generated += 1
        if cand not in seen:
            if max_unique is not None and len(seen) >= max_unique:
                raise ResourceCapError(
                    f"unique-candidate cap {max_unique} exceeded at N0={generated}"
                )
            seen.add(cand)
            if matcher.contains(cand):
                matched.add(cand)
        if pending and generated == pending[0]:
            pending.pop(0)
            ledger.checkpoints.append(
                Checkpoint(generated, len(seen), len(matched), matcher.size)
            )
    if generated and (
        not ledger.checkpoints or ledger.checkpoints[-1].generated != generated
    ):
        ledger.checkpoints.append(
            Checkpoint(generated, len(seen), len(matched), matcher.size)
        )
    return ledger


@dataclass
class RuleAugmentedReport:
    ruleset_name: str
    generated: int            # raw candidates consumed
    unique: int               # distinct raw candidates
    matched_raw: int          # matches from raw candidates alone
    rule_outputs_raw: int     # chain applications that produced output (pre-dedup)
    rule_outputs: int         # distinct mangled candidates
    matched_with_rules: int   # matches from raw + mangled candidates
    test_size: int

    def write_tsv(self, fh: IO[str]) -> None:
        fh.write(
            "ruleset\tgenerated\tunique\tmatched_raw\t"
            "rule_outputs_raw\trule_outputs\tmatched_with_rules\ttest_size\n"
        )
        fh.write(
            f"{self.ruleset_name}\t{self.generated}\t{self.unique}\t{self.matched_raw}\t"
            f"{self.rule_outputs_raw}\t{self.rule_outputs}\t{self.matched_with_rules}\t"
            f"{self.test_size}\n"
        )


def rule_augmented_match(
    candidates: Iterable[str],
    ruleset: RuleSet,
    matcher: Matcher,
) -> RuleAugmentedReport:
    """Match raw candidates, then every rule expansion of the unique ones."""
    unique: list[str] = []
    seen: set[str] = set()
    matched: set[str] = set()
    generated = 0
    for cand in candidates:
        generated += 1
        if cand in seen:
            continue
        seen.add(cand)
        unique.append(cand)
        if matcher.contains(cand):
            matched.add(cand)
    matched_raw = len(matched)

    rule_seen: set[str] = set()
    rule_outputs_raw = 0
    for out in apply_ruleset(ruleset, unique, dedup=False):
        rule_outputs_raw += 1
        if out in rule_seen:
            continue
        rule_seen.add(out)
        if matcher.contains(out):
            matched.add(out)
    return RuleAugmentedReport(
        ruleset_name=ruleset.name,
        generated=generated,
        unique=len(unique),
        matched_raw=matched_raw,
        rule_outputs_raw=rule_outputs_raw,
        rule_outputs=len(rule_seen),
        matched_with_rules=len(matched),
        test_size=matcher.size,
    )


@dataclass
class IntersectionReport:
    labels: list[str]
    regions: dict[int, int]   # bitmask (bit i = member of labels[i]) -> count

    def union_size(self) -> int:
        return sum(self.regions.values())

    def write_tsv(self, fh: IO[str]) -> None:
        fh.write("region_bitmask\tcount\n")
        for mask in sorted(self.regions):
            fh.write(f"{mask}\t{self.regions[mask]}\n")

    def summary_lines(self) -> list[str]:
        lines = []
        for mask in sorted(self.regions):
            members = [lab for i, lab in enumerate(self.labels) if mask >> i & 1]
            lines.append(f"{' & '.join(members)}: {self.regions[mask]}")
        lines.append(f"union: {self.union_size()}")
        return lines


def intersections(match_sets: dict[str, set[str]]) -> IntersectionReport:
    """Exact counts for every non-empty region of the k-set Venn diagram."""
    k = len(match_sets)
    if not (2 <= k <= 6):
        raise ValueError(f"intersections needs 2..6 sets, got {k}")
    labels = list(match_sets)
    regions: dict[int, int] = {}
    union: set[str] = set()
    for s in match_sets.values():
        union |= s
    for item in union:
        mask = 0
        for i, lab in enumerate(labels):
            if item in match_sets[lab]:
                mask |= 1 << i
        regions[mask] = regions.get(mask, 0) + 1
    return IntersectionReport(labels=labels, regions=regions)


def top_frequency(candidates: Iterable[str]) -> tuple[str, Fraction]:
    """Modal candidate and its exact relative frequency; ties pick the
    lexicographically smallest text."""
    counts: Counter[str] = Counter()
    total = 0
    for cand in candidates:
        counts[cand] += 1
        total += 1
    if not total:
        raise ValueError("top_frequency on an empty stream")
    best = min(counts, key=lambda t: (-counts[t], t))
    return best, Fraction(counts[best], total)


@dataclass
class StatReport:
    """Pattern/signature/segment-count histograms with L1 distances.

    Histograms are over the candidate stream; distances compare against
    the reference stream's histograms over the same statistic.
    """

    pattern_hist: dict[str, Fraction]
    signature_hist: dict[str, Fraction]
    segment_count_hist: dict[int, Fraction]
    reference_pattern_hist: dict[str, Fraction]
    reference_signature_hist: dict[str, Fraction]
    reference_segment_count_hist: dict[int, Fraction]

    def l1_distances(self) -> dict[str, Fraction]:
        return {
            "pattern": _l1(self.pattern_hist, self.reference_pattern_hist),
            "signature": _l1(self.signature_hist, self.reference_signature_hist),
            "segment_count": _l1(self.segment_count_hist, self.reference_segment_count_hist),
        }

    def write_tsv(self, directory: str) -> None:
        import os

        os.makedirs(directory, exist_ok=True)
        for name, hist in (
            ("pattern", self.pattern_hist),
            ("signature", self.signature_hist),
            ("segment_count", self.segment_count_hist),
        ):
            with open(os.path.join(directory, f"{name}.tsv"), "w", encoding="utf-8") as fh:
                fh.write(f"{name}\tfraction\n")
                for key in sorted(hist, key=lambda k: (-hist[k], str(k))):
                    fh.write(f"{key}\t{float(hist[key]):.6f}\n")
        with open(os.path.join(directory, "l1.tsv"), "w", encoding="utf-8") as fh:
            fh.write("statistic\tl1_distance\n")
            for name, dist in self.l1_distances().items():
                fh.write(f"{name}\t{float(dist):.6f}\n")


def _l1(a: dict, b: dict) -> Fraction:
    keys = set(a) | set(b)
    return sum((abs(a.get(k, Fraction(0)) - b.get(k, Fraction(0))) for k in keys), Fraction(0))


def _histograms(
    items: Iterable[tuple[str, int]], vocab: SegmentVocab
) -> tuple[dict[str, Fraction], dict[str, Fraction], dict[int, Fraction]]:
    pattern: Counter[str] = Counter()
    signature: Counter[str] = Counter()
    seg_count: Counter[int] = Counter()
    total = 0
    for text, weight in items:
        pattern[pattern_template(text)] += weight
        signature[class_signature(text)] += weight
        seg_count[len(tokenize(text, vocab))] += weight
        total += weight
    if not total:
        return {}, {}, {}
    return (
        {k: Fraction(v, total) for k, v in pattern.items()},
        {k: Fraction(v, total) for k, v in signature.items()},
        {k: Fraction(v, total) for k, v in seg_count.items()},
    )


def stats_report(
    candidates: Iterable[str],
    reference: Iterable,
    vocab: SegmentVocab,
) -> StatReport:
    """Three distribution statistics for a candidate stream vs a reference."""
    cand = _histograms(((c, 1) for c in candidates), vocab)
    ref_items = (
        (item.text, item.count) if hasattr(item, "text") else (item, 1)
        for item in reference
    )
    ref = _histograms(ref_items, vocab)
    return StatReport(
        pattern_hist=cand[0],
        signature_hist=cand[1],
        segment_count_hist=cand[2],
        reference_pattern_hist=ref[0],
        reference_signature_hist=ref[1],
        reference_segment_count_hist=ref[2],
    )
