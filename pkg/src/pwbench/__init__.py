"""Password-guessing workbench.

Generators (character n-gram, structure model, mangling rules, chain
combinator) plus the measurement side: checkpointed matching against a
test set, rule-augmented matching, distribution statistics, and
cross-generator intersection reports. All corpora are newline-delimited
plaintext wordlists; no hashing anywhere.
"""

__version__ = "0.1.0"

from .corpus import CharsetPolicy, PasswordRecord, CorpusStats, CorpusSplit
from .segmentation import SegmentVocab

__all__ = [
    "CharsetPolicy",
    "PasswordRecord",
    "CorpusStats",
    "CorpusSplit",
    "SegmentVocab",
]
