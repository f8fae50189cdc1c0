"""Subcommand front end wiring the modules into reproducible pipelines.

Every run that writes to a real file also writes a sidecar manifest
(`<output>.manifest`, key=value text) capturing the subcommand, its
configuration, and SHA-256 digests of the inputs. Paths given as ``-``
stream via stdin/stdout. Count flags accept scientific shorthand (1e6).

Exit codes: 0 success, 1 usage, 2 data error, 3 resource cap exceeded.
"""

from __future__ import annotations

import argparse
import hashlib
import os
import sys
from importlib import resources
from typing import IO, Iterator

from . import __version__, corpus, evaluation, markov, pcfg, prince, rules, segmentation

FORMAT_VERSIONS = {
    "wordlist": 1,
    "policy": 1,
    "vocab": 1,
    "ngram-model": 1,
    "structure-model": 1,
    "rule-file": 1,
    "ledger": 1,
}

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_CAP = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # exit 1 on usage errors, not argparse's 2
        self.print_usage(sys.stderr)
        raise SystemExit((EXIT_USAGE, f"{self.prog}: error: {message}"))


def _count(text: str) -> int:
    """Accept 1000000 or 1e6."""
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad count {text!r}")
    if value < 0 or value != int(value):
        raise argparse.ArgumentTypeError(f"bad count {text!r}")
    return int(value)


def _checkpoints(text: str) -> list[int]:
    return [_count(part) for part in text.split(",") if part]


def _policy(args) -> corpus.CharsetPolicy:
    path = getattr(args, "policy", None) or os.environ.get("PWBENCH_POLICY")
    return corpus.CharsetPolicy.load(path) if path else corpus.CharsetPolicy()


def _open_out(path: str) -> IO[str]:
    return sys.stdout if path == "-" else open(path, "w", encoding="utf-8")


def _close_out(fh: IO[str]) -> None:
    if fh is not sys.stdout:
        fh.close()


def _stream_lines(path: str) -> Iterator[str]:
    if path == "-":
        for line in sys.stdin:
            yield line.rstrip("\n").rstrip("\r")
    else:
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                yield line.rstrip("\n").rstrip("\r")


def _digest(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            h.update(block)
    return h.hexdigest()


def write_manifest(out_path: str, command: str, config: dict, inputs: list[str]) -> None:
    """key=value sidecar next to an output file; skipped for stdout."""
    if out_path == "-":
        return
    lines = [f"command={command}", f"version={__version__}"]
    for key in sorted(config):
        lines.append(f"{key}={config[key]}")
    for path in inputs:
        if path != "-" and os.path.exists(path):
            lines.append(f"input_sha256:{path}={_digest(path)}")
    with open(out_path + ".manifest", "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def load_manifest(path: str) -> dict[str, str]:
    out: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            key, _, value = line.rstrip("\n").partition("=")
            out[key] = value
    return out


def _resolve_rules(spec: str) -> rules.RuleSet:
    if spec == "best64":
        with resources.files("pwbench").joinpath("data/best64.rule").open(
            "r", encoding="utf-8"
        ) as fh:
            return rules.parse_ruleset(fh, name="best64")
    return rules.load_ruleset(spec)


def _load_records(args, path: str) -> list[corpus.PasswordRecord]:
    stream, _ = corpus.load_wordlist(
        path, policy=_policy(args), weighted=getattr(args, "weighted", False)
    )
    return list(stream)


# -- subcommand implementations ---------------------------------------


def cmd_prep(args) -> int:
    stream, stats = corpus.load_wordlist(args.input, _policy(args), args.weighted)
    records = corpus.dedup_stream(stream) if args.dedup else list(stream)
    out = _open_out(args.out)
    corpus.write_wordlist(out, records, weighted=args.weighted_out)
    _close_out(out)
    print("\t".join(f"{k}={v}" for k, v in stats.as_dict().items()), file=sys.stderr)
    write_manifest(
        args.out, "prep",
        dict(stats.as_dict(), weighted=args.weighted, dedup=args.dedup),
        [args.input],
    )
    return EXIT_OK


def cmd_split(args) -> int:
    records = _load_records(args, args.input)
    split = corpus.split_corpus(records, args.ratio, args.seed)
    for path, part in ((args.train_out, split.train), (args.test_out, split.test)):
        out = _open_out(path)
        corpus.write_wordlist(out, part, weighted=args.weighted_out)
        _close_out(out)
    write_manifest(
        args.train_out, "split",
        {
            "seed": args.seed,
            "ratio": args.ratio,
            "train_count": len(split.train),
            "test_count": len(split.test),
            "test_out": args.test_out,
        },
        [args.input],
    )
    return EXIT_OK


def cmd_vocab(args) -> int:
    records = _load_records(args, args.input)
    charset = _policy(args).allowed if args.full_charset else None
    vocab = segmentation.build_vocab(records, args.n, charset=charset)
    vocab.save(args.out)
    write_manifest(args.out, "vocab", {"n": args.n, "full_charset": args.full_charset},
                   [args.input])
    return EXIT_OK


def cmd_train_markov(args) -> int:
    records = _load_records(args, args.input)
    if args.unique:
        records = corpus.dedup_stream(records)
    model = markov.train_ngram(records, args.order, args.alpha, args.max_len)
    model.save(args.out)
    write_manifest(
        args.out, "train-markov",
        {"order": args.order, "alpha": args.alpha, "max_len": args.max_len,
         "unique": args.unique},
        [args.input],
    )
    return EXIT_OK


def cmd_train_pcfg(args) -> int:
    records = _load_records(args, args.input)
    model = pcfg.train_structure(records)
    model.save(args.out_dir)
    write_manifest(
        os.path.join(args.out_dir, "templates.tsv"), "train-pcfg", {}, [args.input]
    )
    return EXIT_OK


def cmd_gen(args) -> int:
    is_pcfg = os.path.isdir(args.model)
    out = _open_out(args.out)
    try:
        if is_pcfg:
            model = pcfg.StructureModel.load(args.model)
            if args.mode == "enumerate":
                for text, prob in pcfg.structure_enumerate(model, args.limit):
                    out.write(f"{text}\t{prob!r}\n" if args.with_probs else text + "\n")
            else:
                stream = pcfg.structure_sample(model, args.seed)
                for _ in range(args.limit):
                    out.write(next(stream) + "\n")
        else:
            model = markov.NgramModel.load(args.model)
            if args.mode == "enumerate":
                for text, prob in markov.ngram_enumerate(model, args.limit):
                    out.write(f"{text}\t{prob!r}\n" if args.with_probs else text + "\n")
            else:
                stream = markov.ngram_sample(model, args.seed)
                for _ in range(args.limit):
                    out.write(next(stream) + "\n")
    finally:
        _close_out(out)
    inputs = (
        [os.path.join(args.model, "templates.tsv"), os.path.join(args.model, "terminals.tsv")]
        if is_pcfg else [args.model]
    )
    write_manifest(
        args.out, "gen",
        {"model": args.model, "mode": args.mode, "limit": args.limit, "seed": args.seed},
        inputs,
    )
    return EXIT_OK


def cmd_rules(args) -> int:
    ruleset = _resolve_rules(args.rules)
    out = _open_out(args.out)
    n = 0
    for cand in rules.apply_ruleset(ruleset, _stream_lines(args.input), dedup=args.dedup):
        out.write(cand + "\n")
        n += 1
    _close_out(out)
    write_manifest(
        args.out, "rules",
        {"rules": args.rules, "dedup": args.dedup, "emitted": n},
        [args.input] + ([] if args.rules == "best64" else [args.rules]),
    )
    return EXIT_OK


def cmd_prince(args) -> int:
    index = prince.build_length_index(_stream_lines(args.input))
    if args.keyspace_only:
        print(prince.chain_keyspace(index, args.min_len, args.max_len, args.max_elems))
        return EXIT_OK
    out = _open_out(args.out)
    n = 0
    for cand in prince.enumerate_chains(index, args.min_len, args.max_len, args.max_elems):
        out.write(cand + "\n")
        n += 1
        if args.limit is not None and n >= args.limit:
            break
    _close_out(out)
    write_manifest(
        args.out, "prince",
        {"min_len": args.min_len, "max_len": args.max_len,
         "max_elems": args.max_elems, "limit": args.limit, "emitted": n},
        [args.input],
    )
    return EXIT_OK


def cmd_match(args) -> int:
    matcher = evaluation.build_matcher(_stream_lines(args.test))
    ledger = evaluation.match_stream(
        _stream_lines(args.input), matcher, args.checkpoints, max_unique=args.max_unique
    )
    out = _open_out(args.out)
    ledger.write_tsv(out)
    _close_out(out)
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            fh.write(ledger.to_json() + "\n")
    write_manifest(
        args.out, "match",
        {"test": args.test, "checkpoints": ",".join(map(str, args.checkpoints)),
         "test_size": matcher.size},
        [args.input, args.test],
    )
    return EXIT_OK


def cmd_rules_match(args) -> int:
    matcher = evaluation.build_matcher(_stream_lines(args.test))
    ruleset = _resolve_rules(args.rules)
    report = evaluation.rule_augmented_match(_stream_lines(args.input), ruleset, matcher)
    out = _open_out(args.out)
    report.write_tsv(out)
    _close_out(out)
    write_manifest(
        args.out, "rules-match",
        {"test": args.test, "rules": args.rules},
        [args.input, args.test] + ([] if args.rules == "best64" else [args.rules]),
    )
    return EXIT_OK


def cmd_stats(args) -> int:
    vocab = segmentation.SegmentVocab.load(args.vocab)
    reference = _load_records(args, args.reference)
    report = evaluation.stats_report(_stream_lines(args.input), reference, vocab)
    report.write_tsv(args.out_dir)
    write_manifest(
        os.path.join(args.out_dir, "l1.tsv"), "stats",
        {"vocab": args.vocab, "reference": args.reference},
        [args.input, args.reference, args.vocab],
    )
    return EXIT_OK


def cmd_topfreq(args) -> int:
    text, freq = evaluation.top_frequency(_stream_lines(args.input))
    out = _open_out(args.out)
    out.write(f"{text}\t{float(freq):.6e}\t{freq.numerator}/{freq.denominator}\n")
    _close_out(out)
    write_manifest(args.out, "topfreq", {}, [args.input])
    return EXIT_OK


def cmd_intersect(args) -> int:
    sets: dict[str, set[str]] = {}
    paths = []
    for spec in args.set:
        label, sep, path = spec.partition("=")
        if not sep:
            raise corpus.CorpusError(f"--set wants label=path, got {spec!r}")
        sets[label] = set(_stream_lines(path))
        paths.append(path)
    report = evaluation.intersections(sets)
    out = _open_out(args.out)
    report.write_tsv(out)
    _close_out(out)
    for line in report.summary_lines():
        print(line, file=sys.stderr)
    write_manifest(args.out, "intersect", {"sets": ",".join(args.set)}, paths)
    return EXIT_OK


# -- parser wiring -----------------------------------------------------


def build_parser() -> _Parser:
    parser = _Parser(prog="pwbench", description=__doc__)
    parser.add_argument("--version", action="store_true", help="print format versions and exit")
    sub = parser.add_subparsers(dest="command")

    def add(name, fn, **kwargs):
        p = sub.add_parser(name, **kwargs)
        p.set_defaults(fn=fn)
        p.add_argument("--threads", type=int, default=1,
                       help="worker count (only 1 is implemented)")
        p.add_argument("--deterministic", action="store_true",
                       help="force deterministic single-worker ordering")
        p.add_argument("--policy", help="charset policy file (or $PWBENCH_POLICY)")
        return p

    p = add("prep", cmd_prep, help="filter/normalize a wordlist under a policy")
    p.add_argument("input")
    p.add_argument("--out", required=True)
    p.add_argument("--weighted", action="store_true", help="input is text<TAB>count")
    p.add_argument("--weighted-out", action="store_true", help="write text<TAB>count")
    p.add_argument("--dedup", action="store_true")

    p = add("split", cmd_split, help="deterministic train/test split")
    p.add_argument("input")
    p.add_argument("--ratio", type=float, default=0.8)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--train-out", required=True)
    p.add_argument("--test-out", required=True)
    p.add_argument("--weighted", action="store_true")
    p.add_argument("--weighted-out", action="store_true")

    p = add("vocab", cmd_vocab, help="mine a segment vocabulary")
    p.add_argument("input")
    p.add_argument("--n", type=_count, default=30000)
    p.add_argument("--out", required=True)
    p.add_argument("--weighted", action="store_true")
    p.add_argument("--full-charset", action="store_true",
                   help="append fallback singles for the whole policy charset")

    p = add("train-markov", cmd_train_markov, help="train a character n-gram model")
    p.add_argument("input")
    p.add_argument("--order", type=int, default=3)
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--max-len", type=int, default=12)
    p.add_argument("--unique", action="store_true", help="dedup the stream before training")
    p.add_argument("--out", required=True)
    p.add_argument("--weighted", action="store_true")

    p = add("train-pcfg", cmd_train_pcfg, help="train a structure model")
    p.add_argument("input")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--weighted", action="store_true")

    p = add("gen", cmd_gen, help="generate candidates from a trained model")
    p.add_argument("--model", required=True,
                   help="n-gram model file, or structure-model directory")
    p.add_argument("--mode", choices=("enumerate", "sample"), default="enumerate")
    p.add_argument("--limit", type=_count, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--with-probs", action="store_true")
    p.add_argument("--out", default="-")

    p = add("rules", cmd_rules, help="expand a wordlist through a rule file")
    p.add_argument("input")
    p.add_argument("--rules", required=True, help="rule file path, or 'best64'")
    p.add_argument("--dedup", action="store_true")
    p.add_argument("--out", default="-")

    p = add("prince", cmd_prince, help="chain-combine words within a length window")
    p.add_argument("input")
    p.add_argument("--min-len", type=int, default=4)
    p.add_argument("--max-len", type=int, default=12)
    p.add_argument("--max-elems", type=int, default=8)
    p.add_argument("--limit", type=_count, default=None)
    p.add_argument("--keyspace-only", action="store_true")
    p.add_argument("--out", default="-")

    p = add("match", cmd_match, help="checkpointed matching against a test set")
    p.add_argument("input", help="candidate stream ('-' for stdin)")
    p.add_argument("--test", required=True)
    p.add_argument("--checkpoints", type=_checkpoints, required=True)
    p.add_argument("--max-unique", type=_count, default=None)
    p.add_argument("--json", help="also write a JSON ledger here")
    p.add_argument("--out", default="-")

    p = add("rules-match", cmd_rules_match, help="match raw + rule-mangled candidates")
    p.add_argument("input")
    p.add_argument("--test", required=True)
    p.add_argument("--rules", required=True)
    p.add_argument("--out", default="-")

    p = add("stats", cmd_stats, help="distribution statistics vs a reference corpus")
    p.add_argument("input")
    p.add_argument("--reference", required=True)
    p.add_argument("--vocab", required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--weighted", action="store_true")

    p = add("topfreq", cmd_topfreq, help="most common candidate and its frequency")
    p.add_argument("input")
    p.add_argument("--out", default="-")

    p = add("intersect", cmd_intersect, help="Venn region counts over match sets")
    p.add_argument("--set", action="append", required=True, metavar="LABEL=PATH")
    p.add_argument("--out", default="-")

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        if isinstance(exc.code, tuple):
            code, message = exc.code
            print(message, file=sys.stderr)
            return code
        return EXIT_USAGE if exc.code else EXIT_OK
    if args.version:
        print(f"pwbench {__version__}")
        for name, ver in FORMAT_VERSIONS.items():
            print(f"format:{name}={ver}")
        return EXIT_OK
    if not getattr(args, "command", None):
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    try:
        return args.fn(args)
    except evaluation.ResourceCapError as exc:
        print(f"pwbench: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (corpus.CorpusError, rules.RuleParseError, ValueError, OSError) as exc:
        print(f"pwbench: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
