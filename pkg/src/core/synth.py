"""
Synthetic ballots, ground truth and the text-level OCR noise channel
Every random choice flows from an explicit seed
"""
import hashlib
import itertools
import logging
import string
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from config.expected import ReferenceFigures

from .errors import LexiconError, NoiseModelError, ParameterError
from .lexicon import Lexicon, LexiconEntry, assign_candidate_ids, build_contest_index, render_line
from .matcher import selection_tail
from .sample_names import (
    CANDIDATE_NAMES,
    CONTEST_TITLES,
    PARTIES,
    SIMILAR_PAIR_PARTY,
    WRITE_IN_PARTY,
    WRITEIN_NAMES,
)
from .similarity import jaro_winkler, levenshtein_distance, levenshtein_similarity
from .tally import ExpectedOutcome, GroundTruth

logger = logging.getLogger(__name__)

MIN_CONTEST_SEPARATION = 8
MAX_CONTEST_DRAWS = 200
# A write-in must stay far from every selection so noise cannot pull it in
WRITEIN_MAX_LEV = 0.5
WRITEIN_MAX_JW = 0.65
WRITEIN_FALLBACK_LEV = 0.6
WRITEIN_FALLBACK_JW = 0.7
SIMILAR_PAIR_CONTEST = 8
# Characters OCR engines commonly emit for a misread leading glyph
CONFUSABLE_CHARS = "Il|!'?%"


@dataclass(frozen=True)
class ContestSpec:
    title: str
    candidates: Tuple[Tuple[str, str], ...]


@dataclass(frozen=True)
class BallotSpec:
    """What to generate; defaults give one 1000-ballot variant"""
    contests: Tuple[ContestSpec, ...]
    lines_per_ballot: int = 10
    unique_ballots: int = 50
    duplicates: int = 20
    writein_count: int = 10
    with_ids: bool = False
    seed: int = 0
    d_min: int = 3

    def __post_init__(self):
        if self.unique_ballots < 0 or self.duplicates < 0 or self.writein_count < 0:
            raise ParameterError("ballot counts must be non-negative")
        if self.writein_count > self.unique_ballots:
            raise ParameterError(
                f"writein_count ({self.writein_count}) exceeds unique_ballots ({self.unique_ballots})")
        if self.contests and len(self.contests) != self.lines_per_ballot:
            raise ParameterError(
                f"{len(self.contests)} contests cannot fill {self.lines_per_ballot} ballot lines")

    @property
    def total_ballots(self) -> int:
        return self.unique_ballots * self.duplicates

    @property
    def variant(self) -> str:
        return "ids" if self.with_ids else "noids"


@dataclass(frozen=True)
class Ballot:
    ballot_id: str
    lines: Tuple[str, ...]

    def render(self) -> str:
        return "\n".join(self.lines) + "\n"


class NoiseClass(str, Enum):
    SPACE_INSERTION = "SpaceInsertion"
    CHAR_DELETION = "CharDeletion"
    FIRST_CHAR_CORRUPTION = "FirstCharCorruption"


DEFAULT_ERROR_MIX = {
    NoiseClass.SPACE_INSERTION: 0.5,
    NoiseClass.CHAR_DELETION: 0.4,
    NoiseClass.FIRST_CHAR_CORRUPTION: 0.1,
}


@dataclass(frozen=True)
class NoiseModel:
    """Per-line corruption channel: one event per corrupted line"""
    line_error_rate: float
    error_mix: Mapping[NoiseClass, float] = field(default_factory=lambda: dict(DEFAULT_ERROR_MIX))
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.line_error_rate <= 1.0:
            raise NoiseModelError(f"line_error_rate must be in [0, 1], got {self.line_error_rate}")
        if not self.error_mix:
            raise NoiseModelError("error_mix is empty")
        if any(p < 0 for p in self.error_mix.values()):
            raise NoiseModelError("error_mix probabilities must be non-negative")
        total = sum(self.error_mix.values())
        if abs(total - 1.0) > 1e-9:
            raise NoiseModelError(f"error_mix probabilities sum to {total}, not 1")

    @classmethod
    def for_quality(cls, percent: int, seed: int = 0,
                    error_mix: Optional[Mapping[NoiseClass, float]] = None) -> 'NoiseModel':
        level = QualityLevel.for_percent(percent)
        return cls(line_error_rate=level.calibrated_line_error_rate,
                   error_mix=dict(error_mix or DEFAULT_ERROR_MIX), seed=seed)


@dataclass(frozen=True)
class QualityLevel:
    """Image quality expressed as the line error rate it produces"""
    percent: int
    calibrated_line_error_rate: float

    @classmethod
    def for_percent(cls, percent: int) -> 'QualityLevel':
        rates = ReferenceFigures.QUALITY_LINE_ERROR_RATES
        if percent not in rates:
            raise ParameterError(f"unknown quality level {percent}; choose one of {sorted(rates)}")
        return cls(percent=percent, calibrated_line_error_rate=rates[percent])


def default_contests(seed: int = 0, count: int = 10) -> Tuple[ContestSpec, ...]:
    """
    Ten contests of 2-4 candidates drawn from the sample pools.

    Every pair of lines within a contest ends up at least
    MIN_CONTEST_SEPARATION edits apart.
    """
    if not 1 <= count <= len(CONTEST_TITLES):
        raise ParameterError(f"count must be in [1, {len(CONTEST_TITLES)}], got {count}")
    rng = np.random.default_rng([seed, 0])
    unused = list(CANDIDATE_NAMES)
    contests = []
    for index in range(count):
        title = CONTEST_TITLES[index]
        for _ in range(MAX_CONTEST_DRAWS):
            size = int(rng.integers(2, 5))
            if size > len(unused):
                raise LexiconError("candidate pool exhausted")
            picks = [unused[i] for i in rng.choice(len(unused), size=size, replace=False)]
            parties = [PARTIES[i] for i in rng.choice(len(PARTIES), size=size, replace=False)]
            lines = [render_line(index, title, n, p) for n, p in zip(picks, parties)]
            if all(levenshtein_distance(a, b) >= MIN_CONTEST_SEPARATION
                   for a, b in itertools.combinations(lines, 2)):
                break
        else:
            raise LexiconError(f"could not draw well-separated candidates for contest {index} ({title})")
        for name in picks:
            unused.remove(name)
        contests.append(ContestSpec(title=title, candidates=tuple(zip(picks, parties))))
    return tuple(contests)


def add_similar_pair(contests: Sequence[ContestSpec], contest_index: int = SIMILAR_PAIR_CONTEST,
                     pair: Tuple[str, str] = ReferenceFigures.SIMILAR_PAIR,
                     party: str = SIMILAR_PAIR_PARTY) -> Tuple[ContestSpec, ...]:
    """Add two near-identical names, same party, to one contest"""
    if not 0 <= contest_index < len(contests):
        raise ParameterError(f"contest_index {contest_index} outside [0, {len(contests)})")
    contests = list(contests)
    target = contests[contest_index]
    existing = {name for name, _ in target.candidates}
    if existing & set(pair):
        raise LexiconError(f"contest {contest_index} already contains {sorted(existing & set(pair))}")
    contests[contest_index] = ContestSpec(
        title=target.title,
        candidates=target.candidates + tuple((name, party) for name in pair),
    )
    return tuple(contests)


def build_lexicon(contests: Sequence[ContestSpec]) -> Lexicon:
    if not contests:
        raise LexiconError("no contests to build a lexicon from")
    entries = [
        LexiconEntry(contest_index=index, contest_title=contest.title, candidate_name=name, party=party)
        for index, contest in enumerate(contests)
        for name, party in contest.candidates
    ]
    return Lexicon(entries=tuple(entries), with_ids=False, lines_per_ballot=len(contests))


def write_in_line(contest_index: int, contest_title: str, name: str) -> str:
    return render_line(contest_index, contest_title, name, WRITE_IN_PARTY)


def _writein_scores(line: str, group: Sequence[LexiconEntry]) -> Tuple[float, float]:
    lev = max(levenshtein_similarity(e.selection, selection_tail(line, e.selection)) for e in group)
    jw = max(jaro_winkler(e.selection, selection_tail(line, e.selection)) for e in group)
    return lev, jw


def pick_write_in(contest_index: int, group: Sequence[LexiconEntry], rng: np.random.Generator) -> str:
    """A write-in line for the contest that no selection resembles"""
    title = group[0].contest_title
    scored = []
    for name in WRITEIN_NAMES:
        line = write_in_line(contest_index, title, name)
        scored.append((line, *_writein_scores(line, group)))
    eligible = [line for line, lev, jw in scored if lev <= WRITEIN_MAX_LEV and jw <= WRITEIN_MAX_JW]
    if not eligible:
        eligible = [line for line, lev, jw in scored
                    if lev <= WRITEIN_FALLBACK_LEV and jw <= WRITEIN_FALLBACK_JW]
    if not eligible:
        raise LexiconError(f"no write-in name is distinct enough for contest {contest_index} ({title})")
    return eligible[int(rng.integers(0, len(eligible)))]


def ballot_id_for(variant: str, unique: int, duplicate: int) -> str:
    return f"{variant}-b{unique:03d}-d{duplicate:02d}"


def generate_ballots(spec: BallotSpec) -> Tuple[List[Ballot], Lexicon, GroundTruth]:
    """
    Build the lexicon, the ballots and their ground truth.

    Each unique ballot picks one candidate per contest; writein_count of
    them replace one line with a write-in. Every unique ballot is then
    repeated `duplicates` times.
    """
    lexicon = build_lexicon(spec.contests)
    if spec.with_ids:
        lexicon = assign_candidate_ids(lexicon, d_min=spec.d_min, seed=spec.seed)
    index = build_contest_index(lexicon)

    rng = np.random.default_rng([spec.seed, 1])
    writein_ballots = set()
    if spec.writein_count:
        writein_ballots = {int(u) for u in rng.choice(spec.unique_ballots, size=spec.writein_count, replace=False)}

    ballots: List[Ballot] = []
    expected: Dict[str, Tuple[ExpectedOutcome, ...]] = {}
    for unique in range(spec.unique_ballots):
        outcomes = []
        for contest_index in range(spec.lines_per_ballot):
            group = index.group(contest_index)
            choice = group[int(rng.integers(0, len(group)))]
            outcomes.append(ExpectedOutcome(text=choice.canonical_line))
        if unique in writein_ballots:
            contest_index = int(rng.integers(0, spec.lines_per_ballot))
            line = pick_write_in(contest_index, index.group(contest_index), rng)
            outcomes[contest_index] = ExpectedOutcome(text=line, write_in=True)
        outcomes = tuple(outcomes)
        for duplicate in range(spec.duplicates):
            ballot_id = ballot_id_for(spec.variant, unique, duplicate)
            ballots.append(Ballot(ballot_id=ballot_id, lines=tuple(o.text for o in outcomes)))
            expected[ballot_id] = outcomes

    truth = GroundTruth(ballots=expected, lines_per_ballot=spec.lines_per_ballot,
                        with_ids=spec.with_ids, lexicon_fingerprint=lexicon.fingerprint)
    logger.info(f"Generated {len(ballots)} ballots ({spec.variant}, {spec.unique_ballots} unique, "
                f"{len(writein_ballots)} with a write-in)")
    return ballots, lexicon, truth


def similar_pair_ballots(lexicon: Lexicon, counts: Optional[Mapping[str, int]] = None,
                         seed: int = 0) -> Tuple[List[Ballot], GroundTruth]:
    """
    Ballots that vote for one of the similar names in its contest, the
    other lines drawn at random. counts maps candidate name to ballots.
    """
    counts = dict(counts or ReferenceFigures.SIMILAR_PAIR_COUNTS)
    index = build_contest_index(lexicon)
    variant = "ids" if lexicon.with_ids else "noids"
    by_name = {e.candidate_name: e for e in lexicon.entries}
    missing = [name for name in counts if name not in by_name]
    if missing:
        raise LexiconError(f"lexicon has no candidate named {missing[0]!r}")

    rng = np.random.default_rng([seed, 2])
    ballots: List[Ballot] = []
    expected: Dict[str, Tuple[ExpectedOutcome, ...]] = {}
    for name in sorted(counts):
        target = by_name[name]
        slug = name.lower().replace(" ", "")
        for n in range(counts[name]):
            lines = []
            for contest_index in range(lexicon.lines_per_ballot):
                if contest_index == target.contest_index:
                    lines.append(target.canonical_line)
                else:
                    group = index.group(contest_index)
                    lines.append(group[int(rng.integers(0, len(group)))].canonical_line)
            ballot_id = f"{variant}-{slug}-{n:03d}"
            ballots.append(Ballot(ballot_id=ballot_id, lines=tuple(lines)))
            expected[ballot_id] = tuple(ExpectedOutcome(text=line) for line in lines)

    truth = GroundTruth(ballots=expected, lines_per_ballot=lexicon.lines_per_ballot,
                        with_ids=lexicon.with_ids, lexicon_fingerprint=lexicon.fingerprint)
    return ballots, truth


def _stream(seed: int, stream_key: str) -> np.random.Generator:
    key = int.from_bytes(hashlib.sha256(stream_key.encode("utf-8")).digest()[:8], "big")
    return np.random.default_rng(np.random.SeedSequence([seed, key]))


def _corrupt_line(line: str, noise: NoiseClass, rng: np.random.Generator) -> str:
    if noise == NoiseClass.SPACE_INSERTION:
        spaces = " " * int(rng.integers(1, 3))
        position = int(rng.integers(1, max(2, len(line))))
        return line[:position] + spaces + line[position:]
    if noise == NoiseClass.CHAR_DELETION:
        position = int(rng.integers(0, len(line)))
        return line[:position] + line[position + 1:]
    choices = [c for c in CONFUSABLE_CHARS if c != line[0]]
    return choices[int(rng.integers(0, len(choices)))] + line[1:]


def inject_noise(ballot_text: str, model: NoiseModel, stream_key: str = "") -> str:
    """
    Corrupt each non-blank line with probability line_error_rate.

    The line count is preserved; the stream is keyed by (seed, stream_key)
    so every ballot is corrupted independently and reproducibly.
    """
    if model.line_error_rate == 0.0:
        return ballot_text
    rng = _stream(model.seed, stream_key)
    classes = list(model.error_mix)
    weights = np.array([model.error_mix[c] for c in classes], dtype=float)
    out = []
    for line in ballot_text.split("\n"):
        if line.strip() and rng.random() < model.line_error_rate:
            noise = classes[int(rng.choice(len(classes), p=weights))]
            line = _corrupt_line(line, noise, rng)
        out.append(line)
    return "\n".join(out)


def corrupt_corpus(ballots: Sequence[Ballot], model: NoiseModel) -> List[Ballot]:
    """Apply the channel to every ballot, keyed by ballot id"""
    corrupted = []
    for ballot in ballots:
        text = inject_noise(ballot.render(), model, stream_key=ballot.ballot_id)
        corrupted.append(Ballot(ballot_id=ballot.ballot_id, lines=tuple(text.split("\n")[:-1])))
    return corrupted


def changed_lines(original: Sequence[Ballot], other: Sequence[Ballot]) -> int:
    """Number of positions whose text differs between two corpora of the same ballots"""
    by_id = {b.ballot_id: b for b in other}
    return sum(
        1 for ballot in original
        for a, b in itertools.zip_longest(ballot.lines, by_id[ballot.ballot_id].lines)
        if a != b
    )


def _differentiating_index(a: str, b: str) -> int:
    if len(a) != len(b) or a == b:
        raise ParameterError(f"targets must be distinct names of equal length: {a!r}, {b!r}")
    return next(i for i, (x, y) in enumerate(zip(a, b)) if x != y)


def misspell_similar_pair(ballots: Sequence[Ballot], target_a: str, target_b: str,
                          seed: int = 0) -> List[Ballot]:
    """
    Replace the differentiating letter of each target wherever it appears.

    Replacements cycle through ASCII letters and digits, minus both
    differentiating letters, in an order shuffled once under seed.
    """
    if not ballots:
        return []
    position = _differentiating_index(target_a, target_b)
    excluded = {target_a[position], target_b[position]}
    alphabet = [c for c in string.ascii_letters + string.digits if c not in excluded]
    order = np.random.default_rng(seed).permutation(len(alphabet))
    replacements = itertools.cycle(alphabet[int(i)] for i in order)

    found = {target_a: 0, target_b: 0}
    result = []
    for ballot in ballots:
        lines = []
        for line in ballot.lines:
            for target in (target_a, target_b):
                start = line.find(target)
                while start != -1:
                    found[target] += 1
                    at = start + position
                    line = line[:at] + next(replacements) + line[at + 1:]
                    start = line.find(target, start + 1)
            lines.append(line)
        result.append(replace(ballot, lines=tuple(lines)))

    absent = [t for t, n in found.items() if n == 0]
    if absent:
        raise ParameterError(f"target {absent[0]!r} does not appear in the ballots")
    logger.info(f"Misspelled {found[target_a]} '{target_a}' and {found[target_b]} '{target_b}' lines")
    return result
