"""
iOCR exception hierarchy
Library code raises these; the CLI and the experiment runner translate them
"""
from typing import Optional


class IOCRError(Exception):
    """Base class for every data error iOCR reports"""


class DictionaryFormatError(IOCRError):
    """Dictionary file does not follow the contest/line layout"""

    def __init__(self, message: str, line_number: Optional[int] = None):
        self.line_number = line_number
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)


class LexiconError(IOCRError):
    """Lexicon cannot be built or transformed as requested"""


class ParameterError(IOCRError, ValueError):
    """A numeric parameter is outside its valid range"""


class BallotStructureError(IOCRError):
    """Cleaned ballot does not have the expected line layout"""

    def __init__(self, ballot_id: str, message: str):
        self.ballot_id = ballot_id
        super().__init__(f"ballot {ballot_id}: {message}")


class MatcherConfigurationError(IOCRError):
    """Contest index cannot serve the requested line"""


class TallyMergeError(IOCRError):
    """Tallies built against different lexicons"""


class ScoringError(IOCRError):
    """Decisions cannot be scored against the ground truth"""


class NoiseModelError(IOCRError, ValueError):
    """Noise channel parameters are inconsistent"""


class CorpusError(IOCRError):
    """Ballot corpus on disk is missing or malformed"""


class StatisticsError(IOCRError):
    """Statistical test is undefined for the given samples"""
