"""Mangling rules and the chain combinator.

Run:  python3 demos/02_rules_and_prince.py
"""

from pwbench.prince import build_length_index, chain_keyspace, enumerate_chains
from pwbench.rules import apply_chain, parse_rule_line, parse_ruleset, apply_ruleset

print("== single rule chains on 'passWord' ==")
for line in ["l", "c", "$1", "sa@", "c sa@ $1 $2", "l so0 sa@ ss5"]:
    chain = parse_rule_line(line)
    print(f"  {line:<15} -> {apply_chain(chain, 'passWord')}")

print()
print("== a small ruleset over a wordlist ==")
ruleset = parse_ruleset([":", "l $1", "c $2 $0", "se3 '6"], name="demo")
for candidate in apply_ruleset(ruleset, ["Secret", "hunter"], dedup=True):
    print("  ", candidate)

print()
print("== chain combinator ==")
index = build_length_index(["sun", "moon", "star", "99", "!!"])
window = dict(min_len=5, max_len=8, max_elems=2)
print("keyspace for window [5,8], up to 2 elements:",
      chain_keyspace(index, **window))
for candidate in enumerate_chains(index, **window):
    print("  ", candidate)
