"""
String similarity metrics used by the matcher and the baselines

Distances count Unicode scalar values, never bytes. Every score is
oriented so that 1.0 means an exact match.
"""
from rapidfuzz.distance import Jaro, Levenshtein

from .errors import ParameterError

DEFAULT_PREFIX_WEIGHT = 0.1
DEFAULT_MAX_PREFIX = 4
MAX_PREFIX_WEIGHT = 0.25


def levenshtein_distance(s1: str, s2: str) -> int:
    """Minimum number of single-character insertions, deletions and substitutions"""
    return Levenshtein.distance(s1, s2)


def levenshtein_similarity(s1: str, s2: str) -> float:
    """1 - distance / max(|s1|, |s2|); two empty strings are identical"""
    longest = max(len(s1), len(s2))
    if longest == 0:
        return 1.0
    return 1.0 - levenshtein_distance(s1, s2) / longest


def jaro(s1: str, s2: str) -> float:
    """Jaro similarity with the standard floor(max(|s1|, |s2|) / 2) - 1 window"""
    if s1 == s2:
        return 1.0
    if not s1 or not s2:
        return 0.0
    return Jaro.similarity(s1, s2)


def common_prefix_length(s1: str, s2: str, limit: int) -> int:
    length = 0
    for a, b in zip(s1[:limit], s2[:limit]):
        if a != b:
            break
        length += 1
    return length


def jaro_winkler(s1: str, s2: str,
                 prefix_weight: float = DEFAULT_PREFIX_WEIGHT,
                 max_prefix: int = DEFAULT_MAX_PREFIX) -> float:
    """
    Jaro similarity boosted by the shared prefix.

    jw = jaro + l * p * (1 - jaro) with l the common prefix length capped at
    max_prefix. The boost applies at every Jaro value.
    """
    if not 0.0 <= prefix_weight <= MAX_PREFIX_WEIGHT:
        raise ParameterError(
            f"prefix_weight must be in [0, {MAX_PREFIX_WEIGHT}], got {prefix_weight}"
        )
    if max_prefix < 0:
        raise ParameterError(f"max_prefix must be non-negative, got {max_prefix}")

    base = jaro(s1, s2)
    prefix = common_prefix_length(s1, s2, max_prefix)
    # l * p may exceed 1 for large caps; clamp keeps the score a similarity
    return min(1.0, base + prefix * prefix_weight * (1.0 - base))
