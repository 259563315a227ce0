"""
Word-level correction of whole ballot lines

Each token is corrected on its own against the lexicon's vocabulary and the
line is re-joined with single spaces. Split or merged tokens are beyond
its reach.
"""
import logging
from typing import Dict, List, Mapping, Sequence

from ..lexicon import Lexicon
from .norvig import BALLOT_ALPHABET, FrequencyDictionary, norvig_correct
from .symspell import symspell_build, symspell_correct

logger = logging.getLogger(__name__)

METHODS = ("symspell", "norvig")


class LineCorrector:
    """Token-by-token spell correction of OCR lines"""

    def __init__(self, lexicon: Lexicon, method: str = "symspell", max_distance: int = 2):
        if method not in METHODS:
            raise ValueError(f"Unknown correction method '{method}'; choose one of {METHODS}")
        self.method = method
        self.max_distance = max_distance
        tokens = [t for e in lexicon.entries for t in e.canonical_line.split()]
        self.frequencies = FrequencyDictionary.from_words(tokens)
        # Norvig works on folded tokens over the ballot alphabet
        self.folded = FrequencyDictionary.from_words(t.casefold() for t in tokens)
        self.unfold: Dict[str, str] = {}
        for token in sorted(self.frequencies.counts, key=lambda t: (-self.frequencies.frequency(t), t)):
            self.unfold.setdefault(token.casefold(), token)
        self.index = symspell_build(self.frequencies.counts, max_distance) if method == "symspell" else None
        self._cache: Dict[str, str] = {}
        logger.debug(f"LineCorrector({method}, k={max_distance}): {len(self.frequencies)} tokens")

    def correct_token(self, token: str) -> str:
        if token in self._cache:
            return self._cache[token]
        if self.method == "symspell":
            corrected = symspell_correct(self.index, token, self.max_distance, self.frequencies)
        else:
            folded = norvig_correct(token.casefold(), self.folded, self.max_distance, BALLOT_ALPHABET)
            corrected = self.unfold.get(folded, token)
        self._cache[token] = corrected
        return corrected

    def correct_line(self, line: str) -> str:
        return " ".join(self.correct_token(t) for t in line.split())

    def correct_corpus(self, lines_by_ballot: Mapping[str, Sequence[str]]) -> Dict[str, List[str]]:
        return {
            ballot_id: [self.correct_line(line) for line in lines]
            for ballot_id, lines in lines_by_ballot.items()
        }
