"""Character classes, pure-segment splitting, vocabulary, and patterns.

A pure segment is a maximal run of characters from one class: letter (L),
digit (D), or special (S). Two password abstractions are built on top of
the classes: the run template (e.g. ``L8S1D2``) and the presence
signature over lower/upper/special/digit (e.g. ``lusd``).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable

from .corpus import PasswordRecord

LETTER = "L"
DIGIT = "D"
SPECIAL = "S"


def char_class(ch: str) -> str:
    """Classify one character as L (letter), D (digit), or S (special)."""
    if len(ch) != 1:
        raise ValueError(f"char_class expects a single character, got {ch!r}")
    if not (0x21 <= ord(ch) <= 0x7E):
        raise ValueError(f"character {ch!r} outside the printable-ASCII charset")
    if ch.isalpha():
        return LETTER
    if ch.isdigit():
        return DIGIT
    return SPECIAL


@dataclass(frozen=True)
class Segment:
    text: str
    cls: str


def split_segments(password: str) -> list[Segment]:
    """Maximal single-class runs, in order; texts concatenate to the input."""
    segments: list[Segment] = []
    start = 0
    current = ""
    for i, ch in enumerate(password):
        cls = char_class(ch)
        if not current:
            current = cls
            start = i
        elif cls != current:
            segments.append(Segment(password[start:i], current))
            current = cls
            start = i
    if current:
        segments.append(Segment(password[start:], current))
    return segments


def pattern_template(password: str) -> str:
    """Run template, e.g. password!23 -> L8S1D2."""
    return "".join(f"{seg.cls}{len(seg.text)}" for seg in split_segments(password))


_TEMPLATE_RE = re.compile(r"([LDS])(\d+)")


def parse_template(rendered: str) -> list[tuple[str, int]]:
    """Inverse of pattern_template's rendering: 'L8S1D2' -> [(L,8),(S,1),(D,2)]."""
    runs = _TEMPLATE_RE.findall(rendered)
    if "".join(c + n for c, n in runs) != rendered:
        raise ValueError(f"malformed pattern template {rendered!r}")
    return [(cls, int(n)) for cls, n in runs]


def class_signature(password: str) -> str:
    """Presence fingerprint in canonical l,u,s,d order, e.g. Password!23 -> lusd."""
    lower = upper = special = digit = False
    for ch in password:
        cls = char_class(ch)
        if cls == LETTER:
            if ch.islower():
                lower = True
            else:
                upper = True
        elif cls == DIGIT:
            digit = True
        else:
            special = True
    out = ""
    if lower:
        out += "l"
    if upper:
        out += "u"
    if special:
        out += "s"
    if digit:
        out += "d"
    return out


@dataclass
class SegmentVocab:
    """Ranked segment vocabulary with single-character fallback.

    tokens[rank] = (text, frequency). Mined tokens come first in
    non-increasing frequency (ties lexicographic ascending); any single
    characters not already mined are appended so every password over the
    charset tokenizes.
    """

    tokens: list[tuple[str, int]]

    def __post_init__(self) -> None:
        self.rank_of = {text: rank for rank, (text, _) in enumerate(self.tokens)}

    def __len__(self) -> int:
        return len(self.tokens)

    def __contains__(self, text: str) -> bool:
        return text in self.rank_of

    def text_of(self, rank: int) -> str:
        return self.tokens[rank][0]

    def save(self, path: str) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for rank, (text, freq) in enumerate(self.tokens):
                fh.write(f"{rank}\t{freq}\t{text}\n")

    @classmethod
    def load(cls, path: str) -> "SegmentVocab":
        tokens: list[tuple[str, int]] = []
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh):
                rank_s, freq_s, text = line.rstrip("\n").split("\t", 2)
                if int(rank_s) != lineno:
                    raise ValueError(f"vocab file {path}: rank gap at line {lineno + 1}")
                tokens.append((text, int(freq_s)))
        return cls(tokens)


def build_vocab(
    records: Iterable[PasswordRecord],
    n: int,
    charset: Iterable[str] | None = None,
) -> SegmentVocab:
    """Mine the n most frequent pure segments, then append single characters.

    Frequencies are weighted by record counts, so a weighted corpus and
    its exploded equivalent build identical vocabularies. If `charset` is
    given, every character in it gets a fallback entry; otherwise only
    characters observed in the corpus do.
    """
    if n < 1:
        raise ValueError("vocab size must be >= 1")
    freqs: dict[str, int] = {}
    seen_chars: set[str] = set()
    for rec in records:
        seen_chars.update(rec.text)
        for seg in split_segments(rec.text):
            freqs[seg.text] = freqs.get(seg.text, 0) + rec.count
    mined = sorted(freqs.items(), key=lambda item: (-item[1], item[0]))[:n]
    tokens = list(mined)
    have = {text for text, _ in tokens}
    singles = set(charset) if charset is not None else seen_chars
    for ch in sorted(singles):
        if ch not in have:
            tokens.append((ch, freqs.get(ch, 0)))
    return SegmentVocab(tokens)


def tokenize(password: str, vocab: SegmentVocab) -> list[int]:
    """Token ranks for a password; detokenize reproduces it exactly.

    Each pure segment becomes one token when it is in the vocabulary;
    otherwise it is decomposed greedily left to right into the longest
    vocabulary prefixes (single characters guarantee progress).
    """
    ranks: list[int] = []
    for seg in split_segments(password):
        if seg.text in vocab:
            ranks.append(vocab.rank_of[seg.text])
            continue
        rest = seg.text
        while rest:
            for end in range(len(rest), 0, -1):
                piece = rest[:end]
                if piece in vocab:
                    ranks.append(vocab.rank_of[piece])
                    rest = rest[end:]
                    break
            else:
                raise ValueError(
                    f"segment {rest!r} not tokenizable: character {rest[0]!r} missing from vocab"
                )
    return ranks


def detokenize(ranks: Iterable[int], vocab: SegmentVocab) -> str:
    return "".join(vocab.text_of(r) for r in ranks)
