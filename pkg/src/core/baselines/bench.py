"""
Timing comparison of SymSpell lookup, a brute-force Levenshtein scan and
Norvig tier enumeration over a seeded synthetic dictionary
"""
import logging
import string
import time
from dataclasses import dataclass
from typing import Callable, List, Sequence, Set, Tuple

import numpy as np
import psutil

from ..similarity import levenshtein_distance
from .norvig import MAX_TIER, FrequencyDictionary, norvig_correct
from .symspell import symspell_build, symspell_lookup

logger = logging.getLogger(__name__)

BENCH_COLUMNS = ("algorithm", "dictionary_size", "queries", "mean_seconds", "p95_seconds", "rss_mb")


@dataclass(frozen=True)
class BenchRow:
    algorithm: str
    dictionary_size: int
    queries: int
    mean_seconds: float
    p95_seconds: float
    rss_mb: float

    def to_tsv(self) -> str:
        return (f"{self.algorithm}\t{self.dictionary_size}\t{self.queries}\t"
                f"{self.mean_seconds:.9f}\t{self.p95_seconds:.9f}\t{self.rss_mb:.1f}")


def synthetic_dictionary(size: int, seed: int = 0, min_length: int = 4, max_length: int = 10) -> List[str]:
    """size distinct lowercase words"""
    rng = np.random.default_rng([seed, 3])
    letters = np.array(list(string.ascii_lowercase))
    words: Set[str] = set()
    while len(words) < size:
        length = int(rng.integers(min_length, max_length + 1))
        words.add("".join(rng.choice(letters, size=length)))
    return sorted(words)


def perturb(word: str, edits: int, rng: np.random.Generator) -> str:
    """Apply `edits` random insertions, deletions or substitutions"""
    for _ in range(edits):
        op = int(rng.integers(0, 3)) if word else 0
        letter = string.ascii_lowercase[int(rng.integers(0, 26))]
        if op == 0:
            position = int(rng.integers(0, len(word) + 1))
            word = word[:position] + letter + word[position:]
            continue
        position = int(rng.integers(0, len(word)))
        if op == 1:
            word = word[:position] + word[position + 1:]
        else:
            word = word[:position] + letter + word[position + 1:]
    return word


def make_queries(terms: Sequence[str], count: int, max_distance: int, seed: int = 0) -> List[str]:
    rng = np.random.default_rng([seed, 4])
    queries = []
    for _ in range(count):
        term = terms[int(rng.integers(0, len(terms)))]
        queries.append(perturb(term, int(rng.integers(0, max_distance + 1)), rng))
    return queries


def brute_force_lookup(terms: Sequence[str], word: str, max_distance: int) -> Set[Tuple[str, int]]:
    """Levenshtein distance against every term"""
    results = set()
    for term in terms:
        distance = levenshtein_distance(word, term)
        if distance <= max_distance:
            results.add((term, distance))
    return results


def _time_queries(fn: Callable[[str], object], queries: Sequence[str]) -> np.ndarray:
    timings = np.empty(len(queries))
    for i, query in enumerate(queries):
        start = time.perf_counter()
        fn(query)
        timings[i] = time.perf_counter() - start
    return timings


def _rss_mb() -> float:
    return psutil.Process().memory_info().rss / (1024 * 1024)


def _row(algorithm: str, size: int, timings: np.ndarray) -> BenchRow:
    return BenchRow(
        algorithm=algorithm,
        dictionary_size=size,
        queries=len(timings),
        mean_seconds=float(timings.mean()) if len(timings) else 0.0,
        p95_seconds=float(np.percentile(timings, 95)) if len(timings) else 0.0,
        rss_mb=_rss_mb(),
    )


def run_benchmark(size: int = 10000, queries: int = 500, max_distance: int = 2,
                  seed: int = 0, norvig_queries: int = 50) -> List[BenchRow]:
    """Rows for symspell, brute_force and norvig, in that order"""
    terms = synthetic_dictionary(size, seed)
    query_words = make_queries(terms, queries, max_distance, seed)
    logger.info(f"Benchmark: {size} terms, {queries} queries, k={max_distance}")

    index = symspell_build(terms, max_distance)
    rows = [_row("symspell", size, _time_queries(lambda q: symspell_lookup(index, q, max_distance), query_words))]
    rows.append(_row("brute_force", size, _time_queries(lambda q: brute_force_lookup(terms, q, max_distance),
                                                        query_words)))

    dictionary = FrequencyDictionary.from_words(terms)
    norvig_words = query_words[:norvig_queries]
    rows.append(_row("norvig", size, _time_queries(lambda q: norvig_correct(q, dictionary, min(max_distance, MAX_TIER)),
                                                   norvig_words)))
    for row in rows:
        logger.info(f"{row.algorithm}: mean {row.mean_seconds * 1e3:.3f} ms over {row.queries} queries")
    return rows


def format_table(rows: Sequence[BenchRow]) -> str:
    return "\n".join(["\t".join(BENCH_COLUMNS)] + [row.to_tsv() for row in rows]) + "\n"
