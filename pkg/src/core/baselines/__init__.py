"""
Spell-correction baselines compared against the iOCR matcher
"""

from .norvig import (
    BALLOT_ALPHABET,
    LETTERS,
    FrequencyDictionary,
    norvig_correct,
    norvig_edits1,
    norvig_edits2,
    norvig_known,
)
from .symspell import DeleteIndex, symspell_build, symspell_correct, symspell_lookup

__all__ = [
    'BALLOT_ALPHABET', 'LETTERS', 'FrequencyDictionary',
    'norvig_correct', 'norvig_edits1', 'norvig_edits2', 'norvig_known',
    'DeleteIndex', 'symspell_build', 'symspell_correct', 'symspell_lookup',
]
