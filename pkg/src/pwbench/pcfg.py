"""Structure model: template distribution over class/length runs plus
per-(class, length) terminal tables, with exact best-first enumeration.

A password's generative story is: draw a run template (e.g. L2D1), then
fill each run independently from that (class, length) terminal table.
Nothing is smoothed; unseen structures are ungeneratable.
"""

from __future__ import annotations

import heapq
import os
import random
from bisect import bisect_right
from dataclasses import dataclass
from itertools import accumulate
from typing import Iterable, Iterator

from .corpus import PasswordRecord
from .segmentation import parse_template, pattern_template, split_segments


@dataclass
class StructureModel:
    """Template and terminal counts; probabilities are recomputed on load."""

    template_counts: dict[str, float]
    terminal_counts: dict[tuple[str, int], dict[str, float]]

    def __post_init__(self) -> None:
        self._template_total = sum(self.template_counts.values())
        self._terminals: dict[tuple[str, int], list[tuple[str, float]]] = {}
        for key, table in self.terminal_counts.items():
            total = sum(table.values())
            terms = [(text, c / total) for text, c in table.items()]
            terms.sort(key=lambda tp: (-tp[1], tp[0]))
            self._terminals[key] = terms
        self._templates = [
            (tpl, c / self._template_total) for tpl, c in self.template_counts.items()
        ]
        self._templates.sort(key=lambda tp: (-tp[1], tp[0]))

    @property
    def templates(self) -> list[tuple[str, float]]:
        return self._templates

    def terminals(self, cls: str, length: int) -> list[tuple[str, float]]:
        return self._terminals.get((cls, length), [])

    def template_prob(self, rendered: str) -> float:
        count = self.template_counts.get(rendered, 0.0)
        return count / self._template_total if count else 0.0

    def terminal_prob(self, cls: str, length: int, text: str) -> float:
        table = self.terminal_counts.get((cls, length))
        if not table or text not in table:
            return 0.0
        return table[text] / sum(table.values())

    # -- persistence: templates.tsv + terminals.tsv in one directory ----

    def save(self, directory: str) -> None:
        os.makedirs(directory, exist_ok=True)
        with open(os.path.join(directory, "templates.tsv"), "w", encoding="utf-8") as fh:
            for tpl in sorted(self.template_counts):
                fh.write(f"{tpl}\t{self.template_counts[tpl]!r}\n")
        with open(os.path.join(directory, "terminals.tsv"), "w", encoding="utf-8") as fh:
            for cls, length in sorted(self.terminal_counts):
                table = self.terminal_counts[(cls, length)]
                for text in sorted(table):
                    fh.write(f"{cls}\t{length}\t{text}\t{table[text]!r}\n")

    @classmethod
    def load(cls, directory: str) -> "StructureModel":
        template_counts: dict[str, float] = {}
        with open(os.path.join(directory, "templates.tsv"), encoding="utf-8") as fh:
            for line in fh:
                tpl, count = line.rstrip("\n").split("\t")
                template_counts[tpl] = float(count)
        terminal_counts: dict[tuple[str, int], dict[str, float]] = {}
        with open(os.path.join(directory, "terminals.tsv"), encoding="utf-8") as fh:
            for line in fh:
                ccls, length, text, count = line.rstrip("\n").split("\t", 3)
                terminal_counts.setdefault((ccls, int(length)), {})[text] = float(count)
        return cls(template_counts, terminal_counts)


def train_structure(records: Iterable[PasswordRecord]) -> StructureModel:
    """Weighted relative frequencies of templates and of terminals per bucket."""
    template_counts: dict[str, float] = {}
    terminal_counts: dict[tuple[str, int], dict[str, float]] = {}
    empty = True
    for rec in records:
        weight = float(rec.count)
        if weight <= 0:
            continue
        empty = False
        tpl = pattern_template(rec.text)
        template_counts[tpl] = template_counts.get(tpl, 0.0) + weight
        for seg in split_segments(rec.text):
            table = terminal_counts.setdefault((seg.cls, len(seg.text)), {})
            table[seg.text] = table.get(seg.text, 0.0) + weight
    if empty:
        raise ValueError("cannot train a structure model on an empty stream")
    return StructureModel(template_counts, terminal_counts)


def structure_prob(model: StructureModel, password: str) -> float:
    """P(template) times the product of per-run terminal probabilities."""
    tpl = pattern_template(password)
    prob = model.template_prob(tpl)
    if prob == 0.0:
        return 0.0
    for seg in split_segments(password):
        p = model.terminal_prob(seg.cls, len(seg.text), seg.text)
        if p == 0.0:
            return 0.0
        prob *= p
    return prob


def structure_enumerate(
    model: StructureModel, limit: int | None = None
) -> Iterator[tuple[str, float]]:
    """Distinct candidates in non-increasing probability order.

    Frontier entries are (template, per-run terminal rank vector); popping
    an entry pushes each rank-successor once (a seen-set filters states
    reachable from several predecessors). Ties break lexicographically on
    the candidate text.
    """
    if limit is not None and limit <= 0:
        return

    # Per-template run keys and terminal lists, skipping templates with an
    # unfillable run (cannot happen for trained models, but loaded files
    # may be edited).
    heap: list[tuple[float, str, int, tuple[int, ...]]] = []
    runs_by_template: list[list[list[tuple[str, float]]]] = []
    seen: set[tuple[int, tuple[int, ...]]] = set()

    def candidate(tidx: int, ranks: tuple[int, ...]) -> tuple[str, float]:
        runs = runs_by_template[tidx]
        prob = templates[tidx][1]
        parts = []
        for slot, rank in enumerate(ranks):
            text, p = runs[slot][rank]
            parts.append(text)
            prob *= p
        return "".join(parts), prob

    templates = model.templates
    for tidx, (tpl, tprob) in enumerate(templates):
        runs = [model.terminals(cls, length) for cls, length in parse_template(tpl)]
        runs_by_template.append(runs)
        if tprob <= 0.0 or any(not r for r in runs):
            continue
        ranks = tuple(0 for _ in runs)
        text, prob = candidate(tidx, ranks)
        seen.add((tidx, ranks))
        heapq.heappush(heap, (-prob, text, tidx, ranks))

    emitted = 0
    while heap:
        negp, text, tidx, ranks = heapq.heappop(heap)
        yield text, -negp
        emitted += 1
        if limit is not None and emitted >= limit:
            return
        runs = runs_by_template[tidx]
        for slot in range(len(ranks)):
            if ranks[slot] + 1 >= len(runs[slot]):
                continue
            successor = ranks[:slot] + (ranks[slot] + 1,) + ranks[slot + 1:]
            key = (tidx, successor)
            if key in seen:
                continue
            seen.add(key)
            stext, sprob = candidate(tidx, successor)
            heapq.heappush(heap, (-sprob, stext, tidx, successor))


def structure_sample(model: StructureModel, seed: int) -> Iterator[str]:
    """Endless i.i.d. samples from the generative story; seed-deterministic."""
    rng = random.Random(seed)
    templates = [t for t in model.templates if t[1] > 0.0]
    if not templates:
        raise ValueError("cannot sample from an empty structure model")
    tpl_cum = list(accumulate(p for _, p in templates))

    term_cache: dict[tuple[str, int], tuple[list[str], list[float]]] = {}

    def draw_terminal(cls: str, length: int) -> str:
        entry = term_cache.get((cls, length))
        if entry is None:
            terms = model.terminals(cls, length)
            entry = ([t for t, _ in terms], list(accumulate(p for _, p in terms)))
            term_cache[(cls, length)] = entry
        texts, cums = entry
        return texts[min(bisect_right(cums, rng.random() * cums[-1]), len(texts) - 1)]

    while True:
        i = min(bisect_right(tpl_cum, rng.random() * tpl_cum[-1]), len(templates) - 1)
        tpl = templates[i][0]
        yield "".join(draw_terminal(cls, length) for cls, length in parse_template(tpl))
