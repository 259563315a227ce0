"""
Election tally and accuracy scoring
Tallies are values: accumulate and merge return new tallies
"""
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .errors import ScoringError, TallyMergeError
from .matcher import DecisionKind, MatchDecision
from .similarity import levenshtein_distance

logger = logging.getLogger(__name__)

REPORT_HEADER = "iOCR election results"
WRITE_IN_PREFIX = "write-in: "

Key = Tuple[int, str]


def _add_maps(a: Mapping[Key, int], b: Mapping[Key, int]) -> Dict[Key, int]:
    out = dict(a)
    for key, count in b.items():
        out[key] = out.get(key, 0) + count
    return out


@dataclass(frozen=True)
class Tally:
    """Per-candidate counts plus the lines left for review"""
    counts: Mapping[Key, int] = field(default_factory=dict)
    writeins: Mapping[Key, int] = field(default_factory=dict)
    confusion_count: int = 0
    unreadable_count: int = 0
    lexicon_fingerprint: str = ""

    @classmethod
    def empty(cls, lexicon_fingerprint: str = "") -> 'Tally':
        return cls(lexicon_fingerprint=lexicon_fingerprint)

    @property
    def total_decisions(self) -> int:
        return (sum(self.counts.values()) + sum(self.writeins.values())
                + self.confusion_count + self.unreadable_count)

    def to_dict(self) -> Dict[str, Any]:
        """Structured results; lists are sorted so output is stable"""
        return {
            "lexicon_fingerprint": self.lexicon_fingerprint,
            "counts": [
                {"contest_index": k[0], "line": k[1], "count": v}
                for k, v in sorted(self.counts.items())
            ],
            "writeins": [
                {"contest_index": k[0], "text": k[1], "count": v}
                for k, v in sorted(self.writeins.items())
            ],
            "confusion_count": self.confusion_count,
            "unreadable_count": self.unreadable_count,
            "total_decisions": self.total_decisions,
        }


def accumulate(t: Tally, decisions: Iterable[MatchDecision]) -> Tally:
    """Return t plus the votes in decisions"""
    counts = dict(t.counts)
    writeins = dict(t.writeins)
    confusion = t.confusion_count
    unreadable = t.unreadable_count

    for decision in decisions:
        if decision.kind == DecisionKind.CONFIDENT:
            key = (decision.matched_entry.contest_index, decision.matched_entry.canonical_line)
            counts[key] = counts.get(key, 0) + 1
        elif decision.kind == DecisionKind.WRITE_IN:
            key = (decision.contest_index, decision.captured_text)
            writeins[key] = writeins.get(key, 0) + 1
        elif decision.kind == DecisionKind.CONFUSION:
            confusion += 1
        else:
            unreadable += 1

    return Tally(counts=counts, writeins=writeins, confusion_count=confusion,
                 unreadable_count=unreadable, lexicon_fingerprint=t.lexicon_fingerprint)


def merge(t1: Tally, t2: Tally) -> Tally:
    """Pointwise sum; the fingerprint-less empty tally is the identity"""
    if t1.lexicon_fingerprint and t2.lexicon_fingerprint \
            and t1.lexicon_fingerprint != t2.lexicon_fingerprint:
        raise TallyMergeError(
            f"cannot merge tallies of different lexicons "
            f"({t1.lexicon_fingerprint[:12]} vs {t2.lexicon_fingerprint[:12]})")
    return Tally(
        counts=_add_maps(t1.counts, t2.counts),
        writeins=_add_maps(t1.writeins, t2.writeins),
        confusion_count=t1.confusion_count + t2.confusion_count,
        unreadable_count=t1.unreadable_count + t2.unreadable_count,
        lexicon_fingerprint=t1.lexicon_fingerprint or t2.lexicon_fingerprint,
    )


def report(t: Tally, contest_titles: Optional[Mapping[int, str]] = None) -> str:
    """
    Human-readable results.

    Contests in index order; within a contest by count descending, then
    text. An empty tally renders the header only.
    """
    titles = contest_titles or {}
    out: List[str] = [REPORT_HEADER, "=" * len(REPORT_HEADER)]
    if t.total_decisions == 0:
        return "\n".join(out) + "\n"

    rows: Dict[int, List[Tuple[int, str]]] = {}
    for (contest, line), count in t.counts.items():
        rows.setdefault(contest, []).append((count, line))
    for (contest, text), count in t.writeins.items():
        rows.setdefault(contest, []).append((count, f"{WRITE_IN_PREFIX}{text}"))

    for contest in sorted(rows):
        title = titles.get(contest)
        out.append("")
        out.append(f"Contest {contest}: {title}" if title else f"Contest {contest}")
        for count, text in sorted(rows[contest], key=lambda r: (-r[0], r[1])):
            out.append(f"{count:>8}  {text}")

    out.append("")
    out.append(f"Confusion (pending review): {t.confusion_count}")
    out.append(f"Unreadable: {t.unreadable_count}")
    out.append(f"Total lines: {t.total_decisions}")
    return "\n".join(out) + "\n"


@dataclass(frozen=True)
class ExpectedOutcome:
    """What a ballot line should resolve to"""
    text: str
    write_in: bool = False

    def to_dict(self) -> Dict[str, Any]:
        return {"text": self.text, "write_in": self.write_in}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'ExpectedOutcome':
        return cls(text=data["text"], write_in=bool(data.get("write_in", False)))


@dataclass(frozen=True)
class GroundTruth:
    """Hand-tally equivalent: the expected outcome of every ballot line"""
    ballots: Mapping[str, Tuple[ExpectedOutcome, ...]]
    lines_per_ballot: int = 10
    with_ids: bool = False
    lexicon_fingerprint: str = ""

    def __post_init__(self):
        for ballot_id, outcomes in self.ballots.items():
            if len(outcomes) != self.lines_per_ballot:
                raise ScoringError(
                    f"ballot {ballot_id}: {len(outcomes)} expected outcomes, "
                    f"need {self.lines_per_ballot}")

    def merged(self, other: 'GroundTruth') -> 'GroundTruth':
        overlap = set(self.ballots) & set(other.ballots)
        if overlap:
            raise ScoringError(f"ballot ids present in both ground truths: {sorted(overlap)[:3]}")
        if other.lines_per_ballot != self.lines_per_ballot:
            raise ScoringError("ground truths disagree on lines per ballot")
        return GroundTruth(
            ballots={**self.ballots, **other.ballots},
            lines_per_ballot=self.lines_per_ballot,
            with_ids=self.with_ids,
            lexicon_fingerprint=self.lexicon_fingerprint,
        )

    def expected_tally(self) -> Tally:
        """The tally a perfect reader would produce"""
        counts: Dict[Key, int] = {}
        writeins: Dict[Key, int] = {}
        for outcomes in self.ballots.values():
            for position, outcome in enumerate(outcomes):
                target = writeins if outcome.write_in else counts
                key = (position, outcome.text)
                target[key] = target.get(key, 0) + 1
        return Tally(counts=counts, writeins=writeins, lexicon_fingerprint=self.lexicon_fingerprint)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "lines_per_ballot": self.lines_per_ballot,
            "with_ids": self.with_ids,
            "lexicon_fingerprint": self.lexicon_fingerprint,
            "ballots": {
                ballot_id: [o.to_dict() for o in self.ballots[ballot_id]]
                for ballot_id in sorted(self.ballots)
            },
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'GroundTruth':
        return cls(
            ballots={
                ballot_id: tuple(ExpectedOutcome.from_dict(o) for o in outcomes)
                for ballot_id, outcomes in data.get("ballots", {}).items()
            },
            lines_per_ballot=data.get("lines_per_ballot", 10),
            with_ids=data.get("with_ids", False),
            lexicon_fingerprint=data.get("lexicon_fingerprint", ""),
        )


@dataclass(frozen=True)
class ScoringConfig:
    """
    How decisions are compared with the ground truth.

    A write-in is correct when its captured text equals the expected line.
    writein_tolerance relaxes that to a number of edits; it is a knob for
    runs whose ballots went through the noise channel, where the captured
    text carries the OCR errors of the line it was read from.
    """
    # Score a confusion as correct when review would pick the expected line
    adjudicate_confusion: bool = False
    # Edits allowed between a captured write-in and the expected line
    writein_tolerance: int = 0


@dataclass(frozen=True)
class AccuracyReport:
    """Line and per-ballot accuracy of one system against the ground truth"""
    total_lines: int
    correct_lines: int
    line_accuracy: float
    per_ballot_accuracy: Tuple[float, ...]
    confusion_lines: int = 0
    ballot_ids: Tuple[str, ...] = ()
    system: str = "iocr"

    @property
    def wrong_lines(self) -> int:
        return self.total_lines - self.correct_lines

    def to_dict(self) -> Dict[str, Any]:
        return {
            "system": self.system,
            "total_lines": self.total_lines,
            "correct_lines": self.correct_lines,
            "line_accuracy": self.line_accuracy,
            "confusion_lines": self.confusion_lines,
            "ballots": [
                {"ballot_id": b, "accuracy": a}
                for b, a in zip(self.ballot_ids, self.per_ballot_accuracy)
            ],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'AccuracyReport':
        ballots = data.get("ballots", [])
        return cls(
            total_lines=data["total_lines"],
            correct_lines=data["correct_lines"],
            line_accuracy=data["line_accuracy"],
            per_ballot_accuracy=tuple(b["accuracy"] for b in ballots),
            confusion_lines=data.get("confusion_lines", 0),
            ballot_ids=tuple(b["ballot_id"] for b in ballots),
            system=data.get("system", "iocr"),
        )

    def to_tsv(self) -> str:
        rows = [
            f"system\t{self.system}",
            f"total_lines\t{self.total_lines}",
            f"correct_lines\t{self.correct_lines}",
            f"line_accuracy\t{self.line_accuracy:.6f}",
            f"confusion_lines\t{self.confusion_lines}",
            "",
            "ballot_id\taccuracy",
        ]
        rows.extend(f"{b}\t{a:.6f}" for b, a in zip(self.ballot_ids, self.per_ballot_accuracy))
        return "\n".join(rows) + "\n"


def _build_report(system: str, per_ballot: List[Tuple[str, int]], lines_per_ballot: int,
                  confusion: int) -> AccuracyReport:
    total = lines_per_ballot * len(per_ballot)
    correct = sum(c for _, c in per_ballot)
    return AccuracyReport(
        total_lines=total,
        correct_lines=correct,
        line_accuracy=correct / total if total else 0.0,
        per_ballot_accuracy=tuple(c / lines_per_ballot for _, c in per_ballot),
        confusion_lines=confusion,
        ballot_ids=tuple(b for b, _ in per_ballot),
        system=system,
    )


def _decision_correct(decision: Optional[MatchDecision], expected: ExpectedOutcome,
                      cfg: ScoringConfig) -> bool:
    if decision is None:
        return False
    if decision.kind == DecisionKind.CONFIDENT:
        return not expected.write_in and decision.matched_entry.canonical_line == expected.text
    if decision.kind == DecisionKind.WRITE_IN:
        return expected.write_in and \
            levenshtein_distance(decision.captured_text, expected.text) <= cfg.writein_tolerance
    if decision.kind == DecisionKind.CONFUSION and cfg.adjudicate_confusion:
        return not expected.write_in and \
            any(c.entry.canonical_line == expected.text for c in decision.candidates)
    return False


def score(decisions_by_ballot: Mapping[str, Sequence[MatchDecision]], truth: GroundTruth,
          cfg: Optional[ScoringConfig] = None, system: str = "iocr") -> AccuracyReport:
    """Score matcher decisions line by line against the ground truth"""
    cfg = cfg or ScoringConfig()
    per_ballot: List[Tuple[str, int]] = []
    confusion = 0
    for ballot_id in sorted(decisions_by_ballot):
        if ballot_id not in truth.ballots:
            raise ScoringError(f"ballot {ballot_id} is not in the ground truth")
        expected = truth.ballots[ballot_id]
        by_position = {d.line_position: d for d in decisions_by_ballot[ballot_id]}
        confusion += sum(1 for d in by_position.values() if d.kind == DecisionKind.CONFUSION)
        correct = sum(
            1 for position, outcome in enumerate(expected)
            if _decision_correct(by_position.get(position), outcome, cfg)
        )
        per_ballot.append((ballot_id, correct))
    result = _build_report(system, per_ballot, truth.lines_per_ballot, confusion)
    logger.info(f"Scored {len(per_ballot)} ballots ({system}): line accuracy {result.line_accuracy:.4f}")
    return result


def score_raw(raw_lines_by_ballot: Mapping[str, Sequence[str]], truth: GroundTruth,
              system: str = "raw") -> AccuracyReport:
    """Baseline without post-processing: exact equality at each position"""
    per_ballot: List[Tuple[str, int]] = []
    for ballot_id in sorted(raw_lines_by_ballot):
        if ballot_id not in truth.ballots:
            raise ScoringError(f"ballot {ballot_id} is not in the ground truth")
        lines = raw_lines_by_ballot[ballot_id]
        correct = sum(
            1 for position, outcome in enumerate(truth.ballots[ballot_id])
            if position < len(lines) and lines[position] == outcome.text
        )
        per_ballot.append((ballot_id, correct))
    result = _build_report(system, per_ballot, truth.lines_per_ballot, 0)
    logger.info(f"Scored {len(per_ballot)} ballots ({system}): line accuracy {result.line_accuracy:.4f}")
    return result
