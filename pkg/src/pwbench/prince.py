"""Chain combinator: concatenate wordlist elements within a length window.

Words are bucketed by length; a chain spec is an ordered tuple of element
lengths whose sum lands in [min_len, max_len]. Specs are expanded
smallest keyspace first, and within a spec candidates follow mixed-radix
index order over the buckets (leftmost element most significant), so two
runs on identical input produce identical streams.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

from .corpus import PasswordRecord


@dataclass
class LengthIndex:
    buckets: dict[int, list[str]]

    def words_of(self, length: int) -> list[str]:
        return self.buckets.get(length, [])


def build_length_index(words: Iterable) -> LengthIndex:
    """Dedup and bucket words by length, preserving first-occurrence order."""
    buckets: dict[int, list[str]] = {}
    seen: set[str] = set()
    for item in words:
        word = item.text if hasattr(item, "text") else item
        if not word or word in seen:
            continue
        seen.add(word)
        buckets.setdefault(len(word), []).append(word)
    return LengthIndex(buckets)


def _chain_specs(
    index: LengthIndex, min_len: int, max_len: int, max_elems: int
) -> list[tuple[int, tuple[int, ...]]]:
    """All (keyspace, element_lengths) with total length in the window,
    sorted by keyspace ascending then element_lengths lexicographic."""
    if min_len > max_len:
        raise ValueError(f"length window empty: [{min_len}, {max_len}]")
    if max_elems < 1:
        raise ValueError("max_elems must be >= 1")
    lengths = sorted(index.buckets)
    specs: list[tuple[int, tuple[int, ...]]] = []

    def extend(prefix: tuple[int, ...], total: int, keyspace: int) -> None:
        if min_len <= total <= max_len and prefix:
            specs.append((keyspace, prefix))
        if len(prefix) >= max_elems or total >= max_len:
            return
        for length in lengths:
            if total + length > max_len:
                break
            extend(prefix + (length,), total + length, keyspace * len(index.buckets[length]))

    extend((), 0, 1)
    specs.sort()
    return specs


def enumerate_chains(
    index: LengthIndex, min_len: int, max_len: int, max_elems: int = 8
) -> Iterator[str]:
    """All concatenations whose total length fits the window, in spec order."""
    for _, spec in _chain_specs(index, min_len, max_len, max_elems):
        buckets = [index.buckets[length] for length in spec]
        counts = [len(b) for b in buckets]
        indices = [0] * len(spec)
        while True:
            yield "".join(buckets[i][indices[i]] for i in range(len(spec)))
            # advance mixed-radix counter, rightmost digit least significant
            pos = len(spec) - 1
            while pos >= 0:
                indices[pos] += 1
                if indices[pos] < counts[pos]:
                    break
                indices[pos] = 0
                pos -= 1
            if pos < 0:
                break


def chain_keyspace(
    index: LengthIndex, min_len: int, max_len: int, max_elems: int = 8
) -> int:
    """Exact number of candidates enumerate_chains emits (pre-dedup)."""
    return sum(k for k, _ in _chain_specs(index, min_len, max_len, max_elems))
