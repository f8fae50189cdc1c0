"""Order-k character n-gram model: training, scoring, sampling, enumeration.

Sequences are padded with BOS on the left (k-1 symbols of context) and
terminated by EOS. Additive smoothing redistributes mass only over a
context's observed successors plus EOS; unseen transitions stay at zero.
"""

from __future__ import annotations

import heapq
import random
from bisect import bisect_right
from dataclasses import dataclass, field
from itertools import accumulate
from typing import Iterable, Iterator

from .corpus import PasswordRecord

BOS = "\x02"
EOS = "\x03"

_ESCAPES = {BOS: "\\x02", EOS: "\\x03"}
_UNESCAPES = {v: k for k, v in _ESCAPES.items()}


@dataclass
class NgramModel:
    order: int
    counts: dict[str, dict[str, float]] = field(default_factory=dict)
    smoothing: float = 0.0
    max_len: int = 12

    def __post_init__(self) -> None:
        if self.order < 1:
            raise ValueError(f"n-gram order must be >= 1, got {self.order}")
        self._dist_cache: dict[str, list[tuple[str, float]]] = {}

    # -- probabilities -------------------------------------------------

    def distribution(self, context: str) -> list[tuple[str, float]]:
        """Successor distribution for a context, sorted by (prob desc, symbol asc).

        EOS sorts before any character on probability ties (it extends the
        candidate text by nothing, keeping enumeration order lexicographic).
        """
        cached = self._dist_cache.get(context)
        if cached is not None:
            return cached
        table = self.counts.get(context)
        if not table:
            dist: list[tuple[str, float]] = []
        else:
            support = set(table)
            support.add(EOS)
            total = sum(table.values()) + self.smoothing * len(support)
            dist = [
                (sym, (table.get(sym, 0.0) + self.smoothing) / total)
                for sym in support
            ]
            dist = [(sym, p) for sym, p in dist if p > 0.0]
            dist.sort(key=lambda sp: (-sp[1], "" if sp[0] == EOS else sp[0]))
        self._dist_cache[context] = dist
        return dist

    def transition_prob(self, context: str, symbol: str) -> float:
        for sym, p in self.distribution(context):
            if sym == symbol:
                return p
        return 0.0

    def _context_after(self, text: str) -> str:
        padded = BOS * (self.order - 1) + text
        return padded[len(padded) - (self.order - 1):] if self.order > 1 else ""

    # -- persistence ---------------------------------------------------

    def save(self, path: str) -> None:
        def esc(s: str) -> str:
            return "".join(_ESCAPES.get(c, c) for c in s)

        lines = []
        for context, table in self.counts.items():
            for sym, count in table.items():
                lines.append(f"{esc(context)}\t{esc(sym)}\t{count!r}\n")
        lines.sort()
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(f"ngram\t{self.order}\t{self.smoothing!r}\t{self.max_len}\n")
            fh.writelines(lines)

    @classmethod
    def load(cls, path: str) -> "NgramModel":
        def unesc(s: str) -> str:
            for text, ch in _UNESCAPES.items():
                s = s.replace(text, ch)
            return s

        with open(path, encoding="utf-8") as fh:
            header = fh.readline().rstrip("\n").split("\t")
            if len(header) != 4 or header[0] != "ngram":
                raise ValueError(f"{path}: not an n-gram model file")
            model = cls(
                order=int(header[1]),
                smoothing=float(header[2]),
                max_len=int(header[3]),
            )
            for line in fh:
                context, sym, count = line.rstrip("\n").split("\t")
                table = model.counts.setdefault(unesc(context), {})
                table[unesc(sym)] = float(count)
        return model


def train_ngram(
    records: Iterable[PasswordRecord],
    order: int,
    smoothing: float = 0.0,
    max_len: int = 12,
) -> NgramModel:
    """Count BOS-padded, EOS-terminated transitions weighted by record counts."""
    model = NgramModel(order=order, smoothing=smoothing, max_len=max_len)
    ctx_len = order - 1
    for rec in records:
        weight = float(rec.count)
        if weight <= 0:
            continue
        context = BOS * ctx_len
        for ch in rec.text:
            table = model.counts.setdefault(context, {})
            table[ch] = table.get(ch, 0.0) + weight
            context = (context + ch)[-ctx_len:] if ctx_len else ""
        table = model.counts.setdefault(context, {})
        table[EOS] = table.get(EOS, 0.0) + weight
    return model


def ngram_prob(model: NgramModel, password: str) -> float:
    """Product of conditional probabilities including the EOS step."""
    ctx_len = model.order - 1
    context = BOS * ctx_len
    prob = 1.0
    for ch in password:
        p = model.transition_prob(context, ch)
        if p == 0.0:
            return 0.0
        prob *= p
        context = (context + ch)[-ctx_len:] if ctx_len else ""
    p = model.transition_prob(context, EOS)
    return prob * p


def ngram_sample(model: NgramModel, seed: int, max_retries: int = 100_000) -> Iterator[str]:
    """Endless i.i.d. ancestral samples; over-length draws are rejected whole."""
    if not model.counts:
        raise ValueError("cannot sample from an empty model")
    rng = random.Random(seed)
    ctx_len = model.order - 1

    cum_cache: dict[str, tuple[list[str], list[float]]] = {}

    def draw(context: str) -> str | None:
        entry = cum_cache.get(context)
        if entry is None:
            dist = model.distribution(context)
            if not dist:
                cum_cache[context] = ([], [])
                return None
            syms = [s for s, _ in dist]
            cums = list(accumulate(p for _, p in dist))
            cum_cache[context] = (syms, cums)
            entry = (syms, cums)
        syms, cums = entry
        if not syms:
            return None
        return syms[min(bisect_right(cums, rng.random() * cums[-1]), len(syms) - 1)]

    def one_sample() -> str | None:
        context = BOS * ctx_len
        chars: list[str] = []
        while True:
            sym = draw(context)
            if sym is None:
                return None  # dead-end context; reject
            if sym == EOS:
                return "".join(chars)
            chars.append(sym)
            if len(chars) > model.max_len:
                return None  # over length; reject whole draw
            context = (context + sym)[-ctx_len:] if ctx_len else ""

    while True:
        for _ in range(max_retries):
            sample = one_sample()
            if sample is not None:
                yield sample
                break
        else:
            raise RuntimeError("sampler exceeded retry budget without a valid draw")


def ngram_enumerate(
    model: NgramModel, limit: int | None = None
) -> Iterator[tuple[str, float]]:
    """Distinct passwords in non-increasing probability order.

    Best-first search over prefix states. Successors of a prefix are
    pre-sorted by probability, and each heap pop pushes at most two
    entries (its own best extension and its next sibling), keeping the
    frontier small. Ties break lexicographically on candidate text.
    """
    if limit is not None and limit <= 0:
        return
    ctx_len = model.order - 1
    root_ctx = BOS * ctx_len
    root_dist = model.distribution(root_ctx)
    if not root_dist:
        return

    # Heap entry: (-prob, text, is_prefix, parent_text, parent_prob, idx)
    # where (parent_text, idx) locates this entry in its parent's sorted
    # child list, so popping it can lazily push the next sibling.
    heap: list[tuple[float, str, bool, str, float, int]] = []

    def context_of(text: str) -> str:
        padded = root_ctx + text
        return padded[len(padded) - ctx_len:] if ctx_len else ""

    def push_child(parent: str, parent_prob: float, idx: int) -> None:
        dist = model.distribution(context_of(parent))
        if len(parent) >= model.max_len:
            # only EOS may extend a full-length prefix
            dist = [(s, p) for s, p in dist if s == EOS]
        if idx >= len(dist):
            return
        sym, p = dist[idx]
        prob = parent_prob * p
        if prob <= 0.0:
            return
        if sym == EOS:
            heapq.heappush(heap, (-prob, parent, False, parent, parent_prob, idx))
        else:
            heapq.heappush(heap, (-prob, parent + sym, True, parent, parent_prob, idx))

    push_child("", 1.0, 0)
    emitted = 0
    while heap:
        negp, text, is_prefix, parent, parent_prob, idx = heapq.heappop(heap)
        push_child(parent, parent_prob, idx + 1)
        if is_prefix:
            push_child(text, -negp, 0)
        else:
            yield text, -negp
            emitted += 1
            if limit is not None and emitted >= limit:
                return
