"""Hashcat-style mangling rules: parser and executor.

A rule file holds one chain per line; a chain is whitespace-separated
primitives applied left to right to a working buffer. ``#`` lines and
blank lines are skipped. Positional operands use the 0-9,A-Z encoding
(0..35). A positional primitive whose index falls at or beyond the
current buffer length rejects the word outright, as does a buffer
growing past 64 characters; rejection is a value, not an error.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional

MAX_BUFFER = 64

# opcode -> (operand count, operand kind); kind "pos" is 0..35, "char" any char
_OPCODES: dict[str, tuple[int, str]] = {
    ":": (0, ""), "l": (0, ""), "u": (0, ""), "c": (0, ""), "C": (0, ""),
    "t": (0, ""), "r": (0, ""), "d": (0, ""), "f": (0, ""),
    "{": (0, ""), "}": (0, ""), "[": (0, ""), "]": (0, ""),
    "T": (1, "pos"), "D": (1, "pos"), "'": (1, "pos"),
    "z": (1, "pos"), "Z": (1, "pos"), "p": (1, "pos"),
    "$": (1, "char"), "^": (1, "char"), "@": (1, "char"),
    "s": (2, "char"),
}

_POS_DIGITS = "0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZ"


class RuleParseError(Exception):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


@dataclass(frozen=True)
class RulePrimitive:
    opcode: str
    operands: str = ""

    def render(self) -> str:
        return self.opcode + self.operands


@dataclass(frozen=True)
class RuleChain:
    primitives: tuple[RulePrimitive, ...]
    source_text: str

    def render(self) -> str:
        return " ".join(p.render() for p in self.primitives)


@dataclass
class RuleSet:
    name: str
    chains: list[RuleChain]

    def __len__(self) -> int:
        return len(self.chains)


def _decode_pos(ch: str) -> int:
    idx = _POS_DIGITS.find(ch)
    if idx < 0:
        raise ValueError
    return idx


def parse_rule_line(text: str, line_no: int = 1) -> Optional[RuleChain]:
    """Parse one rule line; returns None for comments and blank lines."""
    stripped = text.strip()
    if not stripped or stripped.startswith("#"):
        return None
    primitives: list[RulePrimitive] = []
    for match in re.finditer(r"\S+", text):
        token, column = match.group(), match.start() + 1
        opcode = token[0]
        spec = _OPCODES.get(opcode)
        if spec is None:
            raise RuleParseError(f"unknown opcode {opcode!r}", line_no, column)
        arity, kind = spec
        operands = token[1:]
        if len(operands) != arity:
            raise RuleParseError(
                f"opcode {opcode!r} takes {arity} operand(s), got {len(operands)}",
                line_no, column,
            )
        if kind == "pos":
            try:
                _decode_pos(operands)
            except ValueError:
                raise RuleParseError(
                    f"bad positional operand {operands!r} (want 0-9 or A-Z)",
                    line_no, column,
                ) from None
        primitives.append(RulePrimitive(opcode, operands))
    return RuleChain(tuple(primitives), source_text=text.rstrip("\n"))


def parse_ruleset(lines: Iterable[str], name: str = "rules") -> RuleSet:
    """Parse many lines; duplicate chains (after normalization) keep first."""
    chains: list[RuleChain] = []
    seen: set[str] = set()
    for line_no, line in enumerate(lines, start=1):
        chain = parse_rule_line(line, line_no)
        if chain is None:
            continue
        normalized = chain.render()
        if normalized in seen:
            continue
        seen.add(normalized)
        chains.append(chain)
    return RuleSet(name=name, chains=chains)


def load_ruleset(path: str, name: str | None = None) -> RuleSet:
    import os

    with open(path, encoding="utf-8") as fh:
        return parse_ruleset(fh, name=name or os.path.basename(path))


def _apply_primitive(prim: RulePrimitive, word: str) -> Optional[str]:
    op, arg = prim.opcode, prim.operands
    if op == ":":
        return word
    if op == "l":
        return word.lower()
    if op == "u":
        return word.upper()
    if op == "c":
        # Table-style capitalize: first char uppercased, rest untouched.
        return word[:1].upper() + word[1:]
    if op == "C":
        return word[:1].lower() + word[1:]
    if op == "t":
        return word.swapcase()
    if op == "T":
        n = _decode_pos(arg)
        if n >= len(word):
            return None
        return word[:n] + word[n].swapcase() + word[n + 1:]
    if op == "r":
        return word[::-1]
    if op == "d":
        return word * 2
    if op == "p":
        return word * (_decode_pos(arg) + 1)
    if op == "f":
        return word + word[::-1]
    if op == "{":
        return word[1:] + word[:1]
    if op == "}":
        return word[-1:] + word[:-1]
    if op == "$":
        return word + arg
    if op == "^":
        return arg + word
    if op == "[":
        if not word:
            return None
        return word[1:]
    if op == "]":
        if not word:
            return None
        return word[:-1]
    if op == "D":
        n = _decode_pos(arg)
        if n >= len(word):
            return None
        return word[:n] + word[n + 1:]
    if op == "'":
        n = _decode_pos(arg)
        if n >= len(word):
            return None
        return word[:n]
    if op == "s":
        return word.replace(arg[0], arg[1])
    if op == "@":
        return word.replace(arg, "")
    if op == "z":
        if not word:
            return None
        return word[0] * _decode_pos(arg) + word
    if op == "Z":
        if not word:
            return None
        return word + word[-1] * _decode_pos(arg)
    raise AssertionError(f"unhandled opcode {op!r}")


def apply_chain(chain: RuleChain, word: str) -> Optional[str]:
    """Run the chain over one word; None means the word was rejected."""
    buf: Optional[str] = word
    for prim in chain.primitives:
        buf = _apply_primitive(prim, buf)
        if buf is None:
            return None
        if len(buf) > MAX_BUFFER:
            return None
    return buf


def apply_ruleset(
    ruleset: RuleSet,
    words: Iterable,
    dedup: bool = False,
) -> Iterator[str]:
    """Every chain applied to every word, in ruleset order per word.

    Accepts password records or plain strings. Rejected applications emit
    nothing; with dedup, a global first-occurrence filter is applied.
    """
    seen: set[str] = set()
    for item in words:
        word = item.text if hasattr(item, "text") else item
        for chain in ruleset.chains:
            out = apply_chain(chain, word)
            if out is None:
                continue
            if dedup:
                if out in seen:
                    continue
                seen.add(out)
            yield out
