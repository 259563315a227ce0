"""
Shared fixtures
Config and cache directories point at a throwaway location before config is imported
"""
import os
import tempfile

_SANDBOX = tempfile.mkdtemp(prefix="iocr-tests-")
os.environ.setdefault("IOCR_CONFIG_DIR", os.path.join(_SANDBOX, "config"))
os.environ.setdefault("IOCR_CACHE_DIR", os.path.join(_SANDBOX, "cache"))

import pytest  # noqa: E402

from src.core.lexicon import LexiconEntry, Lexicon, build_contest_index, parse_dictionary  # noqa: E402
from src.core.synth import BallotSpec, add_similar_pair, default_contests, generate_ballots  # noqa: E402

SMALL_DICTIONARY = """\
#contest 0 Governor
0. Governor: Ann Lee (Blue Party)
0. Governor: Bo Diaz (Green Party)
0. Governor: Cy Park (Harbor Party)
#contest 1 Sheriff
1. Sheriff: Mark Day (Unity Party)
1. Sheriff: Mark May (Unity Party)
1. Sheriff: Rosa Quint (Civic Union)
"""


@pytest.fixture
def small_lexicon() -> Lexicon:
    return parse_dictionary(SMALL_DICTIONARY)


@pytest.fixture
def small_index(small_lexicon):
    return build_contest_index(small_lexicon)


@pytest.fixture
def pair_lexicon() -> Lexicon:
    """One contest holding the two similar names"""
    return Lexicon(entries=(
        LexiconEntry(0, "Sheriff", "Mark Day", "Unity Party"),
        LexiconEntry(0, "Sheriff", "Mark May", "Unity Party"),
    ))


@pytest.fixture(scope="session")
def contests():
    return default_contests(seed=7)


@pytest.fixture(scope="session")
def pair_contests(contests):
    return add_similar_pair(contests)


@pytest.fixture(scope="session")
def small_corpus(contests):
    """5 unique ballots x 2 copies, one write-in, no IDs"""
    spec = BallotSpec(contests=contests, unique_ballots=5, duplicates=2, writein_count=1, seed=7)
    return generate_ballots(spec)


@pytest.fixture(scope="session")
def small_corpus_ids(contests):
    spec = BallotSpec(contests=contests, unique_ballots=5, duplicates=2, writein_count=1,
                      with_ids=True, seed=7)
    return generate_ballots(spec)
