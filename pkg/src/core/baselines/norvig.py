"""
Norvig-style spelling correction: candidate tiers by edit distance,
ranked by word frequency
"""
import re
import string
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, Iterable, Set

from ..errors import ParameterError

LETTERS = string.ascii_lowercase
# Ballot lines also contain spaces and hyphenated IDs
BALLOT_ALPHABET = LETTERS + " -"

MAX_TIER = 2


@dataclass(frozen=True)
class FrequencyDictionary:
    """Word -> occurrence count"""
    counts: Dict[str, int] = field(default_factory=dict)

    def __post_init__(self):
        bad = [w for w, c in self.counts.items() if c < 1]
        if bad:
            raise ParameterError(f"word counts must be at least 1: {bad[:3]}")

    @classmethod
    def from_text(cls, text: str) -> 'FrequencyDictionary':
        return cls(dict(Counter(re.findall(r"\w+", text.lower()))))

    @classmethod
    def from_words(cls, words: Iterable[str]) -> 'FrequencyDictionary':
        return cls(dict(Counter(words)))

    def __contains__(self, word: str) -> bool:
        return word in self.counts

    def __len__(self) -> int:
        return len(self.counts)

    def frequency(self, word: str) -> int:
        return self.counts.get(word, 0)


def norvig_edits1(word: str, alphabet: str = LETTERS) -> Set[str]:
    """All strings one deletion, transposition, replacement or insertion away"""
    splits = [(word[:i], word[i:]) for i in range(len(word) + 1)]
    deletes = [a + b[1:] for a, b in splits if b]
    transposes = [a + b[1] + b[0] + b[2:] for a, b in splits if len(b) > 1]
    replaces = [a + c + b[1:] for a, b in splits if b for c in alphabet]
    inserts = [a + c + b for a, b in splits for c in alphabet]
    return set(deletes + transposes + replaces + inserts)


def norvig_edits2(word: str, alphabet: str = LETTERS) -> Set[str]:
    return {e2 for e1 in norvig_edits1(word, alphabet) for e2 in norvig_edits1(e1, alphabet)}


def norvig_known(words: Iterable[str], dictionary: FrequencyDictionary) -> Set[str]:
    return {w for w in words if w in dictionary}


def _best(candidates: Set[str], dictionary: FrequencyDictionary) -> str:
    # Highest frequency, then lexicographically smallest
    return min(candidates, key=lambda w: (-dictionary.frequency(w), w))


def norvig_correct(word: str, dictionary: FrequencyDictionary, k: int = 2,
                   alphabet: str = LETTERS) -> str:
    """
    Most frequent known word in the nearest non-empty tier within k edits.
    A word with no known candidate is returned unchanged.
    """
    if not 0 <= k <= MAX_TIER:
        raise ParameterError(f"k must be in [0, {MAX_TIER}], got {k}")
    if word in dictionary:
        return word
    if k >= 1:
        tier1 = norvig_edits1(word, alphabet)
        known = norvig_known(tier1, dictionary)
        if known:
            return _best(known, dictionary)
        if k == 2:
            known = {e2 for e1 in tier1 for e2 in norvig_edits1(e1, alphabet) if e2 in dictionary}
            if known:
                return _best(known, dictionary)
    return word
