"""
Election lexicon: dictionary parsing, per-contest grouping and candidate IDs

Dictionary file layout (UTF-8):

    #contest 0 Governor
    0. Governor: Ann Lee (Blue Party)
    0. Governor: Bo Diaz (Green Party)
    #contest 1 Sheriff
    1. Sheriff: Cy Park-482 (Blue Party)

Candidate IDs are digit strings appended to the name with a hyphen.
"""
import hashlib
import itertools
import logging
import re
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import DictionaryFormatError, LexiconError
from .similarity import levenshtein_distance

logger = logging.getLogger(__name__)

HEADER_PREFIX = "#contest"
ID_MIN_LENGTH = 2
ID_MAX_LENGTH = 6
MAX_ID_ATTEMPTS = 2000

_HEADER_RE = re.compile(r"^#contest\s+(\d+)\s+(\S.*?)\s*$")
_LINE_RE = re.compile(r"^(\d+)\. (.+?): (.+?) \(([^()]+)\)$")
_ID_RE = re.compile(r"^(.*\S)-(\d+)$")


def render_line(contest_index: int, contest_title: str, candidate_name: str,
                party: str, candidate_id: Optional[str] = None) -> str:
    """Render the printed ballot line for one selection"""
    name = f"{candidate_name}-{candidate_id}" if candidate_id else candidate_name
    return f"{contest_index}. {contest_title}: {name} ({party})"


def contest_header(contest_index: int, contest_title: str) -> str:
    """The part of a ballot line that precedes the selection"""
    return f"{contest_index}. {contest_title}: "


@dataclass(frozen=True)
class LexiconEntry:
    """One legal ballot line"""
    contest_index: int
    contest_title: str
    candidate_name: str
    party: str
    candidate_id: Optional[str] = None
    canonical_line: str = ""

    def __post_init__(self):
        if not self.canonical_line:
            object.__setattr__(self, "canonical_line", render_line(
                self.contest_index, self.contest_title, self.candidate_name,
                self.party, self.candidate_id))
        if "\n" in self.canonical_line or "\r" in self.canonical_line:
            raise LexiconError(f"canonical line contains a line break: {self.canonical_line!r}")
        if self.candidate_id is not None and not self.candidate_id.isdigit():
            raise LexiconError(f"candidate ID must be a non-empty digit string: {self.candidate_id!r}")

    @property
    def selection(self) -> str:
        """Name, optional ID and party: the text the voter chose"""
        return self.canonical_line[len(contest_header(self.contest_index, self.contest_title)):]

    def with_id(self, candidate_id: Optional[str]) -> 'LexiconEntry':
        return replace(self, candidate_id=candidate_id, canonical_line=render_line(
            self.contest_index, self.contest_title, self.candidate_name,
            self.party, candidate_id))


@dataclass(frozen=True)
class Lexicon:
    """All legal ballot lines of one dictionary variant"""
    entries: Tuple[LexiconEntry, ...]
    with_ids: bool = False
    lines_per_ballot: int = 0

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))
        if not self.lines_per_ballot and self.entries:
            object.__setattr__(self, "lines_per_ballot",
                               max(e.contest_index for e in self.entries) + 1)
        seen = set()
        for entry in self.entries:
            if entry.canonical_line in seen:
                raise LexiconError(f"duplicate canonical line: {entry.canonical_line!r}")
            seen.add(entry.canonical_line)
            if not 0 <= entry.contest_index < self.lines_per_ballot:
                raise LexiconError(
                    f"contest index {entry.contest_index} outside [0, {self.lines_per_ballot})")

    @property
    def fingerprint(self) -> str:
        """sha256 of the canonical lines, used to pair tallies with their lexicon"""
        digest = hashlib.sha256()
        for entry in self.entries:
            digest.update(entry.canonical_line.encode("utf-8"))
            digest.update(b"\n")
        return digest.hexdigest()

    def contest_titles(self) -> Dict[int, str]:
        titles: Dict[int, str] = {}
        for entry in self.entries:
            titles.setdefault(entry.contest_index, entry.contest_title)
        return titles

    def find(self, canonical_line: str) -> Optional[LexiconEntry]:
        for entry in self.entries:
            if entry.canonical_line == canonical_line:
                return entry
        return None


@dataclass(frozen=True)
class ContestIndex:
    """Lexicon entries grouped by contest, in lexicon order"""
    groups: Dict[int, Tuple[LexiconEntry, ...]] = field(default_factory=dict)
    lines_per_ballot: int = 0

    @property
    def all_entries(self) -> Tuple[LexiconEntry, ...]:
        return tuple(e for key in sorted(self.groups) for e in self.groups[key])

    def group(self, contest_index: int) -> Tuple[LexiconEntry, ...]:
        return self.groups.get(contest_index, ())


@dataclass(frozen=True)
class ContestSeparation:
    """Closest pair of lines within one contest"""
    contest_index: int
    contest_title: str
    entry_count: int
    min_distance: Optional[int]
    closest_pair: Optional[Tuple[str, str]]
    flagged: bool


@dataclass(frozen=True)
class SeparationReport:
    contests: Tuple[ContestSeparation, ...]
    threshold: int

    @property
    def flagged(self) -> List[ContestSeparation]:
        return [c for c in self.contests if c.flagged]

    @property
    def passed(self) -> bool:
        return not self.flagged

    @property
    def min_distance(self) -> Optional[int]:
        distances = [c.min_distance for c in self.contests if c.min_distance is not None]
        return min(distances) if distances else None

    def to_tsv(self) -> str:
        rows = ["contest_index\ttitle\tentries\tmin_distance\tclosest_a\tclosest_b\tflagged"]
        for c in self.contests:
            distance = "n/a" if c.min_distance is None else str(c.min_distance)
            a, b = c.closest_pair if c.closest_pair else ("n/a", "n/a")
            rows.append(f"{c.contest_index}\t{c.contest_title}\t{c.entry_count}\t"
                        f"{distance}\t{a}\t{b}\t{'yes' if c.flagged else 'no'}")
        return "\n".join(rows) + "\n"


def parse_dictionary(text: str) -> Lexicon:
    """Parse a dictionary document into a Lexicon"""
    entries: List[LexiconEntry] = []
    current: Optional[Tuple[int, str]] = None
    contest_sizes: Dict[int, int] = {}
    header_lines: Dict[int, int] = {}
    seen_lines: Dict[str, int] = {}
    id_presence: List[Tuple[int, bool]] = []

    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue

        if line.startswith("#"):
            match = _HEADER_RE.match(line)
            if not match:
                raise DictionaryFormatError(f"malformed contest header {line!r}", number)
            index, title = int(match.group(1)), match.group(2)
            if index in contest_sizes:
                raise DictionaryFormatError(f"contest {index} declared twice", number)
            if ":" in title:
                raise DictionaryFormatError(f"contest title may not contain ':' ({title!r})", number)
            _check_previous_contest(current, contest_sizes, header_lines)
            current = (index, title)
            contest_sizes[index] = 0
            header_lines[index] = number
            continue

        if current is None:
            raise DictionaryFormatError(f"ballot line before any contest header: {line!r}", number)

        match = _LINE_RE.match(line)
        if not match:
            raise DictionaryFormatError(f"ballot line does not follow the layout: {line!r}", number)
        index, title, name_part, party = int(match.group(1)), match.group(2), match.group(3), match.group(4)
        if (index, title) != current:
            raise DictionaryFormatError(
                f"ballot line belongs to '{index}. {title}' but follows header "
                f"'{current[0]} {current[1]}': {line!r}", number)
        if line in seen_lines:
            raise DictionaryFormatError(
                f"duplicate ballot line (first seen on line {seen_lines[line]}): {line!r}", number)
        seen_lines[line] = number

        id_match = _ID_RE.match(name_part)
        candidate_name, candidate_id = (id_match.group(1), id_match.group(2)) if id_match else (name_part, None)
        id_presence.append((number, candidate_id is not None))

        entries.append(LexiconEntry(
            contest_index=index,
            contest_title=title,
            candidate_name=candidate_name,
            party=party,
            candidate_id=candidate_id,
            canonical_line=line,
        ))
        contest_sizes[index] += 1

    if not contest_sizes:
        raise DictionaryFormatError("no contests")
    _check_previous_contest(current, contest_sizes, header_lines)

    with_ids = id_presence[0][1]
    for number, has_id in id_presence:
        if has_id != with_ids:
            state = "has" if has_id else "lacks"
            raise DictionaryFormatError(
                f"mixed candidate ID presence: this line {state} an ID unlike line {id_presence[0][0]}",
                number)

    lexicon = Lexicon(entries=tuple(entries), with_ids=with_ids,
                      lines_per_ballot=max(contest_sizes) + 1)
    logger.debug(f"Parsed dictionary: {len(entries)} entries in {len(contest_sizes)} contests, "
                 f"with_ids={with_ids}")
    return lexicon


def _check_previous_contest(current, contest_sizes, header_lines):
    if current is not None and contest_sizes[current[0]] == 0:
        raise DictionaryFormatError(f"contest {current[0]} has no ballot lines",
                                    header_lines[current[0]])


def serialize_dictionary(lex: Lexicon) -> str:
    """Inverse of parse_dictionary"""
    out: List[str] = []
    for contest_index, group in build_contest_index(lex).groups.items():
        out.append(f"{HEADER_PREFIX} {contest_index} {group[0].contest_title}")
        out.extend(entry.canonical_line for entry in group)
    return "\n".join(out) + "\n"


def build_contest_index(lex: Lexicon) -> ContestIndex:
    """Group entries per contest; within-group order follows the lexicon"""
    groups: Dict[int, List[LexiconEntry]] = {}
    for entry in lex.entries:
        groups.setdefault(entry.contest_index, []).append(entry)
    return ContestIndex(
        groups={key: tuple(groups[key]) for key in sorted(groups)},
        lines_per_ballot=lex.lines_per_ballot,
    )


def closest_lines(lines: Sequence[str]) -> Tuple[Optional[int], Optional[Tuple[str, str]]]:
    best: Optional[int] = None
    pair: Optional[Tuple[str, str]] = None
    for a, b in itertools.combinations(lines, 2):
        distance = levenshtein_distance(a, b)
        if best is None or distance < best:
            best, pair = distance, (a, b)
    return best, pair


def validate_lexicon(lex: Lexicon, d_min: Optional[int] = None) -> SeparationReport:
    """
    Report the closest pair of lines in every contest.

    Without d_min a contest is flagged when two lines are at most one edit
    apart; with d_min it is flagged below d_min + 1.
    """
    threshold = 1 if d_min is None else d_min
    contests = []
    for contest_index, group in build_contest_index(lex).groups.items():
        distance, pair = closest_lines([e.canonical_line for e in group])
        contests.append(ContestSeparation(
            contest_index=contest_index,
            contest_title=group[0].contest_title,
            entry_count=len(group),
            min_distance=distance,
            closest_pair=pair,
            flagged=distance is not None and distance <= threshold,
        ))
    report = SeparationReport(contests=tuple(contests), threshold=threshold)
    for contest in report.flagged:
        logger.warning(f"Contest {contest.contest_index} ({contest.contest_title}): "
                       f"closest lines only {contest.min_distance} edit(s) apart")
    return report


def _id_lengths(count: int, rng: np.random.Generator) -> List[int]:
    """Pairwise-distinct lengths while the 2..6 range allows, then cycle"""
    span = list(range(ID_MIN_LENGTH, ID_MAX_LENGTH + 1))
    lengths = [span[i % len(span)] for i in range(count)]
    return [int(x) for x in rng.permutation(lengths)]


def _random_id(length: int, rng: np.random.Generator) -> str:
    digits = rng.integers(0, 10, size=length)
    # Leading zero would survive as text but reads like a padding artefact
    digits[0] = rng.integers(1, 10)
    return "".join(str(int(d)) for d in digits)


def assign_candidate_ids(lex: Lexicon, d_min: int = 3, seed: int = 0) -> Lexicon:
    """
    Give every candidate a digit ID so that, within each contest, lines are
    at least d_min + 1 edits apart.

    Contests are processed independently, each from its own seeded stream,
    so adding a contest never changes the IDs of another.
    """
    if lex.with_ids:
        raise LexiconError("lexicon already carries candidate IDs")
    if d_min < 1:
        raise LexiconError(f"d_min must be at least 1, got {d_min}")

    assigned: Dict[str, LexiconEntry] = {}
    for contest_index, group in build_contest_index(lex).groups.items():
        rng = np.random.default_rng([seed, contest_index])
        for attempt in range(1, MAX_ID_ATTEMPTS + 1):
            lengths = _id_lengths(len(group), rng)
            ids = [_random_id(length, rng) for length in lengths]
            candidates = [entry.with_id(cid) for entry, cid in zip(group, ids)]
            distance, _ = closest_lines([c.canonical_line for c in candidates])
            if distance is None or distance >= d_min + 1:
                logger.debug(f"Contest {contest_index}: IDs assigned after {attempt} attempt(s)")
                break
        else:
            raise LexiconError(
                f"contest {contest_index} ({group[0].contest_title}): could not separate lines "
                f"by {d_min + 1} edits within {MAX_ID_ATTEMPTS} attempts")
        for entry, candidate in zip(group, candidates):
            assigned[entry.canonical_line] = candidate

    return Lexicon(
        entries=tuple(assigned[e.canonical_line] for e in lex.entries),
        with_ids=True,
        lines_per_ballot=lex.lines_per_ballot,
    )
