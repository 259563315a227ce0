"""
iOCR matcher: clean raw OCR text and resolve each line against its contest
Lines that cannot be resolved safely are kept for human review
"""
import functools
import logging
import math
import unicodedata
from dataclasses import dataclass, field, fields
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Tuple

from .errors import BallotStructureError, MatcherConfigurationError, ParameterError
from .lexicon import ContestIndex, LexiconEntry, closest_lines
from .similarity import (
    MAX_PREFIX_WEIGHT,
    jaro_winkler,
    levenshtein_distance,
    levenshtein_similarity,
)

logger = logging.getLogger(__name__)


class DecisionKind(str, Enum):
    CONFIDENT = "Confident"
    CONFUSION = "Confusion"
    WRITE_IN = "WriteIn"
    UNREADABLE = "Unreadable"


class ConfusionReason(str, Enum):
    METRIC_DISAGREEMENT = "MetricDisagreement"
    LEVENSHTEIN_TIE = "LevenshteinTie"
    JARO_WINKLER_TIE = "JaroWinklerTie"


@dataclass(frozen=True)
class MatcherConfig:
    """Matching parameters; defaults reproduce the reference experiments"""
    prefix_weight: float = 0.1
    max_prefix: int = 4
    writein_threshold_lev: float = 0.65
    writein_threshold_jw: float = 0.75
    garbage_min_alnum: int = 3
    case_fold: bool = False
    position_keyed: bool = True
    collapse_whitespace: bool = False
    tie_tolerance: float = 1e-12

    def __post_init__(self):
        if not 0.0 <= self.prefix_weight <= MAX_PREFIX_WEIGHT:
            raise ParameterError(f"prefix_weight must be in [0, {MAX_PREFIX_WEIGHT}], got {self.prefix_weight}")
        for name in ("writein_threshold_lev", "writein_threshold_jw"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ParameterError(f"{name} must be in [0, 1], got {value}")
        if self.max_prefix < 0:
            raise ParameterError(f"max_prefix must be non-negative, got {self.max_prefix}")
        if self.garbage_min_alnum < 0:
            raise ParameterError(f"garbage_min_alnum must be non-negative, got {self.garbage_min_alnum}")
        if self.tie_tolerance < 0:
            raise ParameterError(f"tie_tolerance must be non-negative, got {self.tie_tolerance}")

    def to_dict(self) -> Dict[str, Any]:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'MatcherConfig':
        known = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in data.items() if k in known})


@dataclass(frozen=True)
class BallotLine:
    """One cleaned OCR line"""
    ballot_id: str
    line_position: int
    raw_text: str
    cleaned_text: str


@dataclass(frozen=True)
class ScoredCandidate:
    entry: LexiconEntry
    lev_similarity: float
    jw_similarity: float
    distance: int


@dataclass(frozen=True)
class MatchDecision:
    """Outcome of resolving one ballot line"""
    kind: DecisionKind
    ballot_id: str
    line_position: int
    contest_index: int
    raw_text: str
    matched_entry: Optional[LexiconEntry] = None
    candidates: Tuple[ScoredCandidate, ...] = field(default_factory=tuple)
    reason: Optional[ConfusionReason] = None
    captured_text: Optional[str] = None
    note: str = ""

    @property
    def needs_review(self) -> bool:
        return self.kind != DecisionKind.CONFIDENT


def _normalize(text: str) -> str:
    return unicodedata.normalize("NFC", text)


def _alnum_count(text: str) -> int:
    return sum(1 for ch in text if ch.isalnum())


def clean_lines(raw_ocr_text: str, ballot_id: str, lines_per_ballot: int,
                cfg: Optional[MatcherConfig] = None) -> List[BallotLine]:
    """
    Drop blank and garbage lines, trim the rest and number them.

    Raises BallotStructureError when position keying is on and the number of
    surviving lines differs from lines_per_ballot.
    """
    cfg = cfg or MatcherConfig()
    lines: List[BallotLine] = []
    for raw in _normalize(raw_ocr_text).splitlines():
        cleaned = raw.strip()
        if not cleaned:
            continue
        if _alnum_count(cleaned) < cfg.garbage_min_alnum:
            logger.debug(f"Ballot {ballot_id}: dropping garbage line {cleaned!r}")
            continue
        if cfg.collapse_whitespace:
            cleaned = " ".join(cleaned.split())
        lines.append(BallotLine(
            ballot_id=ballot_id,
            line_position=len(lines),
            raw_text=raw,
            cleaned_text=cleaned,
        ))

    if cfg.position_keyed and len(lines) != lines_per_ballot:
        raise BallotStructureError(
            ballot_id, f"expected {lines_per_ballot} lines after cleaning, found {len(lines)}")
    return lines


def _fold(text: str, cfg: MatcherConfig) -> str:
    return text.casefold() if cfg.case_fold else text


def _group_for(line: BallotLine, index: ContestIndex, cfg: MatcherConfig) -> Tuple[LexiconEntry, ...]:
    if cfg.position_keyed:
        group = index.group(line.line_position)
        if not group:
            raise MatcherConfigurationError(
                f"no lexicon entries for contest {line.line_position} "
                f"(ballot {line.ballot_id}, line {line.line_position})")
        return group
    group = index.all_entries
    if not group:
        raise MatcherConfigurationError("contest index is empty")
    return group


def selection_tail(text: str, selection: str) -> str:
    return text[-len(selection):] if len(selection) < len(text) else text


def _is_write_in(text: str, group: Sequence[LexiconEntry], cfg: MatcherConfig) -> bool:
    """True when no entry's selection resembles the end of the line"""
    best_lev = 0.0
    best_jw = 0.0
    for entry in group:
        selection = _fold(entry.selection, cfg)
        tail = selection_tail(text, selection)
        best_lev = max(best_lev, levenshtein_similarity(selection, tail))
        best_jw = max(best_jw, jaro_winkler(selection, tail, cfg.prefix_weight, cfg.max_prefix))
    return best_lev < cfg.writein_threshold_lev and best_jw < cfg.writein_threshold_jw


@functools.lru_cache(maxsize=1024)
def _separation(canonical_lines: Tuple[str, ...]) -> Optional[int]:
    distance, _ = closest_lines(canonical_lines)
    return distance


def group_separation(group: Sequence[LexiconEntry], cfg: MatcherConfig) -> Optional[int]:
    """Smallest edit distance between two lines of the group, None for a single entry"""
    return _separation(tuple(_fold(e.canonical_line, cfg) for e in group))


def score_candidates(text: str, group: Sequence[LexiconEntry], cfg: MatcherConfig) -> List[ScoredCandidate]:
    """Full-line Levenshtein and Jaro-Winkler scores against every entry"""
    text = _fold(text, cfg)
    scored = []
    for entry in group:
        canonical = _fold(entry.canonical_line, cfg)
        scored.append(ScoredCandidate(
            entry=entry,
            lev_similarity=levenshtein_similarity(text, canonical),
            jw_similarity=jaro_winkler(text, canonical, cfg.prefix_weight, cfg.max_prefix),
            distance=levenshtein_distance(text, canonical),
        ))
    return scored


def match_line(line: BallotLine, index: ContestIndex, cfg: Optional[MatcherConfig] = None) -> MatchDecision:
    """
    Resolve one line against its contest group.

    Order of checks: write-in screen, correction radius, Levenshtein tie,
    Jaro-Winkler tie, metric disagreement, then a confident match on the
    agreed entry.

    The write-in screen runs first, on the selection tail only, so a
    far-off line that happens to tie two candidates is a write-in and not
    a confusion. A line closer to one entry than half the group's
    separation can only have been corrupted from that entry, so it is
    Confident whatever Jaro-Winkler ranks first; the tie and disagreement
    checks apply outside that radius.
    """
    cfg = cfg or MatcherConfig()
    group = _group_for(line, index, cfg)
    scored = score_candidates(line.cleaned_text, group, cfg)

    min_distance = min(c.distance for c in scored)
    max_jw = max(c.jw_similarity for c in scored)
    lev_tied = [c for c in scored if c.distance == min_distance]
    jw_tied = [c for c in scored if math.isclose(c.jw_similarity, max_jw, rel_tol=0.0, abs_tol=cfg.tie_tolerance)]
    best_l = lev_tied[0]
    # First entry at the maximum keeps the choice stable under equal scores
    best_j = next(c for c in scored if c.jw_similarity == max_jw)

    base = dict(
        ballot_id=line.ballot_id,
        line_position=line.line_position,
        contest_index=line.line_position if cfg.position_keyed else best_l.entry.contest_index,
        raw_text=line.raw_text,
    )

    if _is_write_in(_fold(line.cleaned_text, cfg), group, cfg):
        return MatchDecision(kind=DecisionKind.WRITE_IN, candidates=(best_l,),
                             captured_text=line.cleaned_text,
                             note="no selection resembles the line", **base)

    separation = group_separation(group, cfg)
    if len(lev_tied) == 1 and separation is not None and 2 * min_distance < separation:
        return MatchDecision(kind=DecisionKind.CONFIDENT, matched_entry=best_l.entry,
                             candidates=(best_l,), **base)

    if len(lev_tied) >= 2:
        return MatchDecision(kind=DecisionKind.CONFUSION, candidates=tuple(lev_tied),
                             reason=ConfusionReason.LEVENSHTEIN_TIE,
                             note=f"{len(lev_tied)} entries at distance {min_distance}", **base)

    if len(jw_tied) >= 2:
        return MatchDecision(kind=DecisionKind.CONFUSION, candidates=tuple(jw_tied),
                             reason=ConfusionReason.JARO_WINKLER_TIE,
                             note=f"{len(jw_tied)} entries at Jaro-Winkler {max_jw:.6f}", **base)

    if best_l.entry != best_j.entry:
        return MatchDecision(kind=DecisionKind.CONFUSION, candidates=(best_l, best_j),
                             reason=ConfusionReason.METRIC_DISAGREEMENT,
                             note="closest by Levenshtein differs from closest by Jaro-Winkler", **base)

    return MatchDecision(kind=DecisionKind.CONFIDENT, matched_entry=best_l.entry,
                         candidates=(best_l,), **base)


def unreadable_ballot(ballot_id: str, lines_per_ballot: int, note: str,
                      lines: Sequence[BallotLine] = ()) -> List[MatchDecision]:
    """One Unreadable decision per expected line position"""
    decisions = []
    for position in range(lines_per_ballot):
        raw = lines[position].raw_text if position < len(lines) else ""
        decisions.append(MatchDecision(
            kind=DecisionKind.UNREADABLE,
            ballot_id=ballot_id,
            line_position=position,
            contest_index=position,
            raw_text=raw,
            note=note,
        ))
    return decisions


def resolve_ballot(raw_ocr_text: str, ballot_id: str, index: ContestIndex,
                   cfg: Optional[MatcherConfig] = None) -> List[MatchDecision]:
    """Clean one ballot and match every line, in line order"""
    cfg = cfg or MatcherConfig()
    try:
        lines = clean_lines(raw_ocr_text, ballot_id, index.lines_per_ballot, cfg)
    except BallotStructureError as e:
        logger.warning(f"{e}; routing ballot to review")
        relaxed = MatcherConfig.from_dict({**cfg.to_dict(), "position_keyed": False})
        lines = clean_lines(raw_ocr_text, ballot_id, index.lines_per_ballot, relaxed)
        return unreadable_ballot(ballot_id, index.lines_per_ballot, str(e), lines)

    decisions = [match_line(line, index, cfg) for line in lines]
    for decision in decisions:
        logger.debug(f"{ballot_id}:{decision.line_position} {decision.kind.value}"
                     f"{' ' + decision.reason.value if decision.reason else ''}")
    return decisions


def _escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace("\t", "\\t").replace("\n", "\\n").replace("\r", "\\r")


def confusion_record(decision: MatchDecision) -> str:
    """
    One confusion-log row:
    ballot_id, line_position, raw_text, reason, then (candidate, lev, jw)
    triples, tab separated.
    """
    if decision.reason is not None:
        reason = decision.reason.value
    else:
        reason = decision.kind.value
    columns = [_escape(decision.ballot_id), str(decision.line_position), _escape(decision.raw_text), reason]
    for candidate in decision.candidates:
        columns.extend([
            _escape(candidate.entry.canonical_line),
            f"{candidate.lev_similarity:.6f}",
            f"{candidate.jw_similarity:.6f}",
        ])
    return "\t".join(columns)


def review_records(decisions: Sequence[MatchDecision]) -> List[str]:
    """Log rows for every decision that needs a human"""
    return [confusion_record(d) for d in decisions if d.needs_review]
