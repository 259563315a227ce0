"""
Synthetic ballots and the OCR noise channel
"""
import itertools

import numpy as np
import pytest

from config.expected import ReferenceFigures
from src.core.errors import LexiconError, NoiseModelError, ParameterError
from src.core.lexicon import build_contest_index
from src.core.similarity import levenshtein_distance
from src.core.synth import (
    CONFUSABLE_CHARS,
    MIN_CONTEST_SEPARATION,
    WRITEIN_FALLBACK_JW,
    WRITEIN_FALLBACK_LEV,
    Ballot,
    BallotSpec,
    NoiseClass,
    NoiseModel,
    QualityLevel,
    add_similar_pair,
    build_lexicon,
    changed_lines,
    corrupt_corpus,
    default_contests,
    generate_ballots,
    inject_noise,
    misspell_similar_pair,
    pick_write_in,
    similar_pair_ballots,
    _writein_scores,
)

BALLOT_TEXT = "0. Governor: Ann Lee (Blue Party)\n\n1. Sheriff: Rosa Quint (Civic Union)\n"


def only(noise: NoiseClass) -> NoiseModel:
    return NoiseModel(line_error_rate=1.0, error_mix={noise: 1.0}, seed=3)


class TestContests:
    def test_default_contests_are_separated(self, contests):
        assert len(contests) == 10
        for contest in contests:
            assert 2 <= len(contest.candidates) <= 4
        lexicon = build_lexicon(contests)
        for group in build_contest_index(lexicon).groups.values():
            for a, b in itertools.combinations(group, 2):
                assert levenshtein_distance(a.canonical_line, b.canonical_line) >= MIN_CONTEST_SEPARATION

    def test_candidates_not_reused(self, contests):
        names = [name for contest in contests for name, _ in contest.candidates]
        assert len(names) == len(set(names))

    def test_deterministic(self):
        assert default_contests(seed=4) == default_contests(seed=4)

    def test_count_range(self):
        with pytest.raises(ParameterError):
            default_contests(count=0)

    def test_similar_pair_added(self, contests, pair_contests):
        sheriff = pair_contests[8]
        assert sheriff.title == contests[8].title
        assert sheriff.candidates[-2:] == (("Mark Day", "Unity Party"), ("Mark May", "Unity Party"))
        assert pair_contests[:8] == contests[:8]

    def test_similar_pair_added_once(self, pair_contests):
        with pytest.raises(LexiconError):
            add_similar_pair(pair_contests)


class TestBallotSpec:
    def test_write_ins_bounded_by_unique_ballots(self, contests):
        with pytest.raises(ParameterError):
            BallotSpec(contests=contests, unique_ballots=2, writein_count=3)

    def test_contests_fill_the_ballot(self, contests):
        with pytest.raises(ParameterError):
            BallotSpec(contests=contests[:9])

    def test_variant_and_total(self, contests):
        spec = BallotSpec(contests=contests, with_ids=True)
        assert spec.variant == "ids"
        assert spec.total_ballots == 1000


class TestGenerateBallots:
    def test_shape(self, small_corpus):
        ballots, lexicon, truth = small_corpus
        assert len(ballots) == 10
        assert ballots[0].ballot_id == "noids-b000-d00"
        assert all(len(b.lines) == 10 for b in ballots)
        assert set(truth.ballots) == {b.ballot_id for b in ballots}
        assert truth.lexicon_fingerprint == lexicon.fingerprint

    def test_duplicates_share_lines(self, small_corpus):
        ballots, _, _ = small_corpus
        by_id = {b.ballot_id: b for b in ballots}
        for unique in range(5):
            assert by_id[f"noids-b{unique:03d}-d00"].lines == by_id[f"noids-b{unique:03d}-d01"].lines

    def test_lines_come_from_lexicon_or_write_ins(self, small_corpus):
        ballots, lexicon, truth = small_corpus
        legal = {e.canonical_line for e in lexicon.entries}
        writein_lines = 0
        for ballot in ballots:
            for line, outcome in zip(ballot.lines, truth.ballots[ballot.ballot_id]):
                assert line == outcome.text
                if outcome.write_in:
                    writein_lines += 1
                    assert line.endswith("(Write-in)")
                else:
                    assert line in legal
        assert writein_lines == 2

    def test_ids_variant(self, small_corpus_ids):
        ballots, lexicon, truth = small_corpus_ids
        assert lexicon.with_ids and truth.with_ids
        assert ballots[0].ballot_id.startswith("ids-")

    def test_deterministic(self, contests):
        spec = BallotSpec(contests=contests, unique_ballots=3, duplicates=1, writein_count=1, seed=11)
        assert generate_ballots(spec) == generate_ballots(spec)

    def test_render(self):
        assert Ballot("b", ("x", "y")).render() == "x\ny\n"


class TestWriteIns:
    def test_write_in_is_distinct_from_every_selection(self, contests):
        index = build_contest_index(build_lexicon(contests))
        rng = np.random.default_rng(0)
        for contest_index, group in index.groups.items():
            line = pick_write_in(contest_index, group, rng)
            lev, jw = _writein_scores(line, group)
            assert lev <= WRITEIN_FALLBACK_LEV and jw <= WRITEIN_FALLBACK_JW


class TestSimilarPairBallots:
    def test_counts(self, pair_contests):
        lexicon = build_lexicon(pair_contests)
        ballots, truth = similar_pair_ballots(lexicon, seed=1)
        assert len(ballots) == 50
        day = [b for b in ballots if "Mark Day (Unity Party)" in b.lines[8]]
        may = [b for b in ballots if "Mark May (Unity Party)" in b.lines[8]]
        assert (len(day), len(may)) == (20, 30)
        assert "noids-markmay-000" in truth.ballots
        assert truth.lexicon_fingerprint == lexicon.fingerprint

    def test_unknown_name(self, contests):
        with pytest.raises(LexiconError, match="no candidate named"):
            similar_pair_ballots(build_lexicon(contests))


class TestNoiseModel:
    def test_quality_levels(self):
        assert QualityLevel.for_percent(50).calibrated_line_error_rate == 0.012
        assert NoiseModel.for_quality(20, seed=1).line_error_rate == 0.084
        assert NoiseModel.for_quality(100).line_error_rate == 0.0

    def test_unknown_quality(self):
        with pytest.raises(ParameterError):
            QualityLevel.for_percent(30)

    @pytest.mark.parametrize("kwargs", [
        {"line_error_rate": 1.5},
        {"line_error_rate": 0.1, "error_mix": {}},
        {"line_error_rate": 0.1, "error_mix": {NoiseClass.CHAR_DELETION: 0.9}},
        {"line_error_rate": 0.1, "error_mix": {NoiseClass.CHAR_DELETION: 1.5,
                                               NoiseClass.SPACE_INSERTION: -0.5}},
    ])
    def test_invalid(self, kwargs):
        with pytest.raises(NoiseModelError):
            NoiseModel(**kwargs)

    def test_noise_error_is_a_value_error(self):
        with pytest.raises(ValueError):
            NoiseModel(line_error_rate=-0.1)


class TestInjectNoise:
    def test_zero_rate_is_identity(self):
        assert inject_noise(BALLOT_TEXT, NoiseModel(line_error_rate=0.0)) == BALLOT_TEXT

    def test_line_count_and_blank_lines_preserved(self):
        noisy = inject_noise(BALLOT_TEXT, NoiseModel(line_error_rate=1.0, seed=5), "b1")
        before, after = BALLOT_TEXT.split("\n"), noisy.split("\n")
        assert len(after) == len(before)
        assert after[1] == "" and after[3] == ""
        assert after[0] != before[0] and after[2] != before[2]

    def test_space_insertion(self):
        noisy = inject_noise(BALLOT_TEXT, only(NoiseClass.SPACE_INSERTION), "b1")
        for a, b in zip(BALLOT_TEXT.split("\n"), noisy.split("\n")):
            assert a.replace(" ", "") == b.replace(" ", "")
            assert 0 <= len(b) - len(a) <= 2
            assert b[:1] == a[:1]

    def test_char_deletion(self):
        noisy = inject_noise(BALLOT_TEXT, only(NoiseClass.CHAR_DELETION), "b1")
        for a, b in zip(BALLOT_TEXT.split("\n"), noisy.split("\n")):
            if a:
                assert len(b) == len(a) - 1
                assert levenshtein_distance(a, b) == 1

    def test_first_char_corruption(self):
        noisy = inject_noise(BALLOT_TEXT, only(NoiseClass.FIRST_CHAR_CORRUPTION), "b1")
        for a, b in zip(BALLOT_TEXT.split("\n"), noisy.split("\n")):
            if a:
                assert b[1:] == a[1:]
                assert b[0] in CONFUSABLE_CHARS and b[0] != a[0]

    def test_reproducible_per_stream(self):
        model = NoiseModel(line_error_rate=0.5, seed=9)
        assert inject_noise(BALLOT_TEXT, model, "b7") == inject_noise(BALLOT_TEXT, model, "b7")

    @pytest.mark.parametrize("quality", [50, 20])
    def test_corpus_line_error_rate(self, contests, quality):
        changed = total = 0
        for seed in range(5):
            for with_ids in (False, True):
                spec = BallotSpec(contests=contests, unique_ballots=25, duplicates=20,
                                  writein_count=5, with_ids=with_ids, seed=seed)
                ballots, _, _ = generate_ballots(spec)
                noisy = corrupt_corpus(ballots, NoiseModel.for_quality(quality, seed=seed))
                changed += changed_lines(ballots, noisy)
                total += sum(len(b.lines) for b in ballots)
        accuracy = 1 - changed / total
        assert accuracy == pytest.approx(ReferenceFigures.RAW_LINE_ACCURACY[quality],
                                         abs=ReferenceFigures.RAW_ACCURACY_TOLERANCE)

    def test_corrupt_corpus_keeps_ids_and_lengths(self, small_corpus):
        ballots, _, _ = small_corpus
        noisy = corrupt_corpus(ballots, NoiseModel.for_quality(20, seed=2))
        assert [b.ballot_id for b in noisy] == [b.ballot_id for b in ballots]
        assert all(len(b.lines) == 10 for b in noisy)


class TestMisspellSimilarPair:
    def test_every_target_changed(self, pair_contests):
        ballots, _ = similar_pair_ballots(build_lexicon(pair_contests), seed=2)
        misspelled = misspell_similar_pair(ballots, "Mark Day", "Mark May", seed=2)
        assert changed_lines(ballots, misspelled) == 50
        for ballot in misspelled:
            line = ballot.lines[8]
            assert "Mark Day" not in line and "Mark May" not in line
            letter = line[line.index("Mark ") + 5]
            assert letter not in "DM"

    def test_other_lines_untouched(self, pair_contests):
        ballots, _ = similar_pair_ballots(build_lexicon(pair_contests), seed=2)
        misspelled = misspell_similar_pair(ballots, "Mark Day", "Mark May")
        for before, after in zip(ballots, misspelled):
            assert before.lines[:8] == after.lines[:8]
            assert before.lines[9:] == after.lines[9:]

    def test_empty_corpus(self):
        assert misspell_similar_pair([], "Mark Day", "Mark May") == []

    def test_absent_target(self):
        with pytest.raises(ParameterError, match="Mark May"):
            misspell_similar_pair([Ballot("b", ("Mark Day",))], "Mark Day", "Mark May")

    def test_targets_must_differ_in_place(self):
        with pytest.raises(ParameterError):
            misspell_similar_pair([Ballot("b", ("Mark Day",))], "Mark Day", "Mark Dayton")
