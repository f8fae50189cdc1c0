"""The measurement loop: split, train, generate, match, compare.

Run:  python3 demos/03_evaluation.py
"""

import itertools
import random

from pwbench.corpus import DEFAULT_CHARSET, PasswordRecord, dedup_stream, split_corpus
from pwbench.evaluation import (
    build_matcher,
    intersections,
    match_stream,
    rule_augmented_match,
    stats_report,
    top_frequency,
)
from pwbench.markov import ngram_enumerate, train_ngram
from pwbench.pcfg import structure_enumerate, train_structure
from pwbench.rules import parse_ruleset
from pwbench.segmentation import build_vocab

rng = random.Random(0)
words = ["love", "star", "blue", "moon", "cat", "dog", "sun", "sky"]
corpus = [
    PasswordRecord(rng.choice(words) + str(rng.randint(0, 99)))
    for _ in range(5000)
]

split = split_corpus(corpus, ratio=0.8, seed=1)
matcher = build_matcher(split.test)
print(f"train {len(split.train)} records, test set of {matcher.size} unique texts")

markov = train_ngram(dedup_stream(split.train), order=3)
structure = train_structure(split.train)
markov_cands = [t for t, _ in itertools.islice(ngram_enumerate(markov), 2000)]
pcfg_cands = [t for t, _ in itertools.islice(structure_enumerate(structure), 2000)]

print("\n== checkpointed match ledgers ==")
for name, cands in (("markov", markov_cands), ("structure", pcfg_cands)):
    ledger = match_stream(iter(cands), matcher, [100, 500, 2000])
    print(f"  {name}:")
    for cp in ledger.checkpoints:
        print(f"    N0={cp.generated:<6} unique={cp.unique:<6} "
              f"matched={cp.matched} ({float(cp.matched_fraction):.1%})")

print("\n== rule-augmented matching ==")
ruleset = parse_ruleset(["$0", "$1", "$!", "c"], name="tiny")
report = rule_augmented_match(iter(markov_cands[:500]), ruleset, matcher)
print(f"  raw matches {report.matched_raw} -> with rules {report.matched_with_rules} "
      f"({report.rule_outputs} mangled candidates)")

print("\n== distribution statistics ==")
vocab = build_vocab(split.train, n=50, charset=DEFAULT_CHARSET)
stats = stats_report(pcfg_cands, split.train, vocab)
for stat, dist in stats.l1_distances().items():
    print(f"  L1({stat}) vs training = {float(dist):.3f}")

text, freq = top_frequency(iter(pcfg_cands))
print(f"\nmost common structure candidate: {text!r} at {float(freq):.2e}")

print("\n== who matches what ==")
venn = intersections({
    "markov": set(markov_cands) & matcher.texts,
    "structure": set(pcfg_cands) & matcher.texts,
})
for line in venn.summary_lines():
    print("  " + line)
