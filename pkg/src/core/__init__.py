"""
iOCR Core Components
"""

from .errors import IOCRError
from .lexicon import Lexicon, LexiconEntry, ContestIndex, parse_dictionary, build_contest_index
from .matcher import MatcherConfig, MatchDecision, DecisionKind, resolve_ballot
from .tally import Tally, GroundTruth, AccuracyReport, accumulate, merge, report, score

__all__ = [
    'IOCRError',
    'Lexicon',
    'LexiconEntry',
    'ContestIndex',
    'parse_dictionary',
    'build_contest_index',
    'MatcherConfig',
    'MatchDecision',
    'DecisionKind',
    'resolve_ballot',
    'Tally',
    'GroundTruth',
    'AccuracyReport',
    'accumulate',
    'merge',
    'report',
    'score',
]
