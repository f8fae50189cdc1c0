"""Walk through the two trainable generators on a toy corpus.

Run:  python3 demos/01_generators.py
"""

import itertools

from pwbench.corpus import PasswordRecord
from pwbench.markov import ngram_prob, ngram_sample, train_ngram, ngram_enumerate
from pwbench.pcfg import structure_enumerate, structure_prob, structure_sample, train_structure

corpus = [
    PasswordRecord("hello1", 4),
    PasswordRecord("hello12", 2),
    PasswordRecord("world99", 3),
    PasswordRecord("hold12", 1),
    PasswordRecord("wold1", 1),
]

print("== character trigram model ==")
model = train_ngram(corpus, order=3, max_len=8)
print("ten most probable strings (best-first enumeration):")
for text, prob in itertools.islice(ngram_enumerate(model), 10):
    print(f"  {text:<10} {prob:.4f}")
print("score of a string the model never saw whole:",
      f"{ngram_prob(model, 'wold99'):.5f}")
print("five seeded samples:", list(itertools.islice(ngram_sample(model, seed=1), 5)))

print()
print("== structure model (run templates + terminal tables) ==")
structure = train_structure(corpus)
print("templates:", structure.templates)
print("most probable candidates:")
for text, prob in itertools.islice(structure_enumerate(structure), 8):
    print(f"  {text:<10} {prob:.4f}")
print("'hold99' was never observed but its parts were:",
      f"{structure_prob(structure, 'hold99'):.4f}")
print("five seeded samples:",
      list(itertools.islice(structure_sample(structure, seed=1), 5)))
