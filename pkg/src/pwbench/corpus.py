"""Wordlist ingestion, normalization, deduplication, and splitting.

A wordlist is one password per line, LF terminated. The weighted variant
carries a multiplicity: ``text<TAB>count``. Lines failing the charset
policy are counted and dropped, never emitted.
"""

from __future__ import annotations

import string
from dataclasses import dataclass, field
from typing import IO, Iterable, Iterator

# Printable ASCII minus the space character.
DEFAULT_CHARSET = "".join(c for c in string.printable if c not in string.whitespace)


class CorpusError(Exception):
    """Fatal ingestion problem (unreadable file, bad policy, bad ratio)."""


@dataclass(frozen=True)
class CharsetPolicy:
    """Which characters and lengths a corpus may contain."""

    allowed: frozenset[str] = frozenset(DEFAULT_CHARSET)
    min_len: int = 1
    max_len: int = 12

    def __post_init__(self) -> None:
        if not self.allowed:
            raise CorpusError("charset policy: allowed set is empty")
        if self.min_len < 1:
            raise CorpusError("charset policy: min_len must be >= 1")
        if self.max_len < self.min_len:
            raise CorpusError("charset policy: max_len < min_len")

    def accepts(self, text: str) -> bool:
        if not (self.min_len <= len(text) <= self.max_len):
            return False
        return all(c in self.allowed for c in text)

    def save(self, path: str) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(f"min_len={self.min_len}\n")
            fh.write(f"max_len={self.max_len}\n")
            fh.write(f"charset={''.join(sorted(self.allowed))}\n")

    @classmethod
    def load(cls, path: str) -> "CharsetPolicy":
        """Read a key=value policy file (min_len, max_len, charset)."""
        kv: dict[str, str] = {}
        try:
            with open(path, encoding="utf-8") as fh:
                for line in fh:
                    line = line.rstrip("\n")
                    if not line or line.startswith("#"):
                        continue
                    key, sep, value = line.partition("=")
                    if not sep:
                        raise CorpusError(f"policy file {path}: bad line {line!r}")
                    kv[key.strip()] = value
        except OSError as exc:
            raise CorpusError(f"cannot read policy file {path}: {exc}") from exc
        return cls(
            allowed=frozenset(kv.get("charset", DEFAULT_CHARSET)),
            min_len=int(kv.get("min_len", "1")),
            max_len=int(kv.get("max_len", "12")),
        )


@dataclass(frozen=True)
class PasswordRecord:
    """A password with its multiplicity in the source corpus."""

    text: str
    count: int = 1


@dataclass
class CorpusStats:
    total_lines: int = 0
    accepted: int = 0
    rejected_charset: int = 0
    rejected_length: int = 0
    rejected_encoding: int = 0

    def as_dict(self) -> dict[str, int]:
        return {
            "total_lines": self.total_lines,
            "accepted": self.accepted,
            "rejected_charset": self.rejected_charset,
            "rejected_length": self.rejected_length,
            "rejected_encoding": self.rejected_encoding,
        }


@dataclass
class CorpusSplit:
    train: list[PasswordRecord]
    test: list[PasswordRecord]
    seed: int
    ratio: float


def _iter_lines(path: str) -> Iterator[bytes]:
    try:
        fh: IO[bytes] = open(path, "rb")
    except OSError as exc:
        raise CorpusError(f"cannot read wordlist {path}: {exc}") from exc
    with fh:
        for raw in fh:
            yield raw


def load_wordlist(
    path: str,
    policy: CharsetPolicy | None = None,
    weighted: bool = False,
    stats: CorpusStats | None = None,
) -> tuple[Iterator[PasswordRecord], CorpusStats]:
    """Stream accepted records from a wordlist file.

    Returns the record iterator plus a stats object that is filled in as
    the stream is consumed (final once the iterator is exhausted). Input
    is decoded as UTF-8; undecodable lines count as rejected_encoding, as
    do malformed counts in weighted mode.
    """
    policy = policy or CharsetPolicy()
    if stats is None:
        stats = CorpusStats()

    def gen() -> Iterator[PasswordRecord]:
        for raw in _iter_lines(path):
            stats.total_lines += 1
            line = raw.rstrip(b"\n").rstrip(b"\r")
            try:
                text = line.decode("utf-8")
            except UnicodeDecodeError:
                stats.rejected_encoding += 1
                continue
            count = 1
            if weighted:
                text, sep, count_text = text.partition("\t")
                if sep:
                    try:
                        count = int(count_text)
                        if count < 0:
                            raise ValueError
                    except ValueError:
                        stats.rejected_encoding += 1
                        continue
            if not (policy.min_len <= len(text) <= policy.max_len):
                stats.rejected_length += 1
                continue
            if not all(c in policy.allowed for c in text):
                stats.rejected_charset += 1
                continue
            stats.accepted += 1
            yield PasswordRecord(text, count)

    return gen(), stats


def dedup_stream(records: Iterable[PasswordRecord]) -> list[PasswordRecord]:
    """Collapse duplicates: first-occurrence order, counts summed."""
    counts: dict[str, int] = {}
    for rec in records:
        counts[rec.text] = counts.get(rec.text, 0) + rec.count
    return [PasswordRecord(text, count) for text, count in counts.items()]


def split_corpus(
    records: Iterable[PasswordRecord], ratio: float, seed: int
) -> CorpusSplit:
    """Shuffle deterministically and cut at floor(ratio * n).

    The shuffle is Fisher-Yates driven by Python's Mersenne Twister
    (`random.Random(seed)`), so splits reproduce across runs and machines.
    """
    import random

    if not (0.0 < ratio < 1.0):
        raise CorpusError(f"split ratio must be in (0,1), got {ratio}")
    pool = list(records)
    if not pool:
        raise CorpusError("cannot split an empty corpus")
    rng = random.Random(seed)
    rng.shuffle(pool)
    cut = int(ratio * len(pool))
    return CorpusSplit(train=pool[:cut], test=pool[cut:], seed=seed, ratio=ratio)


def prepare_cross_eval(
    test: Iterable[PasswordRecord],
    exclude_train: Iterable[PasswordRecord],
    policy: CharsetPolicy | None = None,
) -> list[PasswordRecord]:
    """Unique test texts passing the policy and absent from the training split."""
    policy = policy or CharsetPolicy()
    excluded = {rec.text for rec in exclude_train}
    out: list[PasswordRecord] = []
    seen: set[str] = set()
    for rec in test:
        if rec.text in seen or rec.text in excluded:
            continue
        if not policy.accepts(rec.text):
            continue
        seen.add(rec.text)
        out.append(PasswordRecord(rec.text, rec.count))
    return out


def write_wordlist(path_or_fh, records: Iterable[PasswordRecord], weighted: bool = False) -> int:
    """Write records back out as a wordlist; returns lines written."""
    own = isinstance(path_or_fh, str)
    fh = open(path_or_fh, "w", encoding="utf-8") if own else path_or_fh
    n = 0
    try:
        for rec in records:
            if weighted:
                fh.write(f"{rec.text}\t{rec.count}\n")
            else:
                fh.write(rec.text + "\n")
            n += 1
    finally:
        if own:
            fh.close()
    return n
