"""
Symmetric-delete lookup: index delete variants of every term once,
then answer queries with deletes of the query only
"""
import itertools
import logging
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, Optional, Set, Tuple

from ..errors import ParameterError
from ..similarity import levenshtein_distance
from .norvig import FrequencyDictionary

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DeleteIndex:
    """Delete variant -> the dictionary terms it came from"""
    deletes: Dict[str, FrozenSet[str]]
    max_distance: int
    terms: FrozenSet[str]

    def __len__(self) -> int:
        return len(self.deletes)


def delete_variants(word: str, max_distance: int) -> Set[str]:
    """Every string reachable from word by at most max_distance deletions"""
    variants = set()
    for removed in range(min(max_distance, len(word)) + 1):
        for kept in itertools.combinations(range(len(word)), len(word) - removed):
            variants.add("".join(word[i] for i in kept))
    return variants


def symspell_build(terms: Iterable[str], max_distance: int) -> DeleteIndex:
    """Pre-compute the delete index; each term maps to itself"""
    if max_distance < 0:
        raise ParameterError(f"max_distance must be non-negative, got {max_distance}")
    index: Dict[str, Set[str]] = {}
    unique = frozenset(terms)
    for term in unique:
        for variant in delete_variants(term, max_distance):
            index.setdefault(variant, set()).add(term)
    logger.debug(f"SymSpell index: {len(unique)} terms, {len(index)} delete variants")
    return DeleteIndex(
        deletes={k: frozenset(v) for k, v in index.items()},
        max_distance=max_distance,
        terms=unique,
    )


def symspell_lookup(index: DeleteIndex, word: str, max_distance: int) -> Set[Tuple[str, int]]:
    """All terms within Levenshtein distance max_distance, with their distance"""
    if max_distance > index.max_distance:
        raise ParameterError(
            f"max_distance {max_distance} exceeds the index's {index.max_distance}")
    if max_distance < 0:
        raise ParameterError(f"max_distance must be non-negative, got {max_distance}")
    candidates: Set[str] = set()
    for variant in delete_variants(word, max_distance):
        candidates.update(index.deletes.get(variant, ()))
    results = set()
    for term in candidates:
        distance = levenshtein_distance(word, term)
        if distance <= max_distance:
            results.add((term, distance))
    return results


def symspell_correct(index: DeleteIndex, word: str, max_distance: int,
                     frequencies: Optional[FrequencyDictionary] = None) -> str:
    """Closest term, then most frequent, then lexicographic; word itself when none"""
    matches = symspell_lookup(index, word, max_distance)
    if not matches:
        return word
    freq = frequencies.frequency if frequencies is not None else (lambda _: 0)
    return min(matches, key=lambda m: (m[1], -freq(m[0]), m[0]))[0]
