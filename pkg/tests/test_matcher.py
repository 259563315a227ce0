"""
Line cleaning, per-line matching and the confusion fail-safe
"""
import string

import pytest
from hypothesis import assume, given, settings, strategies as st

from src.core.errors import BallotStructureError, MatcherConfigurationError, ParameterError
from src.core.lexicon import (
    ContestIndex,
    Lexicon,
    LexiconEntry,
    assign_candidate_ids,
    build_contest_index,
    validate_lexicon,
)
from src.core.matcher import (
    BallotLine,
    ConfusionReason,
    DecisionKind,
    MatchDecision,
    MatcherConfig,
    clean_lines,
    confusion_record,
    match_line,
    resolve_ballot,
    review_records,
)
from src.core.synth import SIMILAR_PAIR_CONTEST, add_similar_pair, build_lexicon, default_contests

# Printable characters an OCR engine can emit on a ballot line
EDIT_ALPHABET = string.ascii_letters + string.digits + string.punctuation + " "


def line_at(position: int, text: str, ballot_id: str = "b1") -> BallotLine:
    return BallotLine(ballot_id=ballot_id, line_position=position, raw_text=text, cleaned_text=text.strip())


def single_edits(text: str):
    for i in range(len(text)):
        yield text[:i] + text[i + 1:]
        for ch in EDIT_ALPHABET:
            if ch != text[i]:
                yield text[:i] + ch + text[i + 1:]
    for i in range(len(text) + 1):
        for ch in EDIT_ALPHABET:
            yield text[:i] + ch + text[i:]


class TestMatcherConfig:
    def test_defaults(self):
        cfg = MatcherConfig()
        assert (cfg.prefix_weight, cfg.max_prefix) == (0.1, 4)
        assert (cfg.writein_threshold_lev, cfg.writein_threshold_jw) == (0.65, 0.75)
        assert cfg.garbage_min_alnum == 3
        assert cfg.position_keyed and not cfg.case_fold and not cfg.collapse_whitespace

    @pytest.mark.parametrize("field, value", [
        ("prefix_weight", 0.3),
        ("writein_threshold_lev", 1.5),
        ("writein_threshold_jw", -0.1),
        ("max_prefix", -1),
        ("garbage_min_alnum", -2),
    ])
    def test_rejects_out_of_range(self, field, value):
        with pytest.raises(ParameterError):
            MatcherConfig(**{field: value})

    def test_dict_round_trip_ignores_unknown_keys(self):
        cfg = MatcherConfig(case_fold=True, max_prefix=2)
        assert MatcherConfig.from_dict({**cfg.to_dict(), "colour": "blue"}) == cfg


class TestCleanLines:
    def test_blank_and_garbage_dropped(self):
        content = [f"{i}. Contest {i}: Name {i} (Party)" for i in range(10)]
        text = "\n".join(content[:4] + ["", "~.", "   "] + content[4:] + ["", ""])
        lines = clean_lines(text, "b1", 10)
        assert [line.line_position for line in lines] == list(range(10))
        assert [line.cleaned_text for line in lines] == content

    def test_lines_trimmed(self):
        lines = clean_lines("  0. Governor: Ann Lee (Blue Party)  \n", "b1", 1)
        assert lines[0].cleaned_text == "0. Governor: Ann Lee (Blue Party)"
        assert lines[0].raw_text == "  0. Governor: Ann Lee (Blue Party)  "

    def test_empty_document(self):
        with pytest.raises(BallotStructureError, match="b9"):
            clean_lines("", "b9", 10)

    def test_count_not_checked_without_position_keying(self):
        cfg = MatcherConfig(position_keyed=False)
        assert len(clean_lines("0. Governor: Ann Lee (Blue Party)\n", "b1", 10, cfg)) == 1

    def test_whitespace_collapse_is_opt_in(self):
        text = "0. Governor:  Ann   Lee (Blue Party)"
        assert clean_lines(text, "b1", 1)[0].cleaned_text == text
        collapsed = clean_lines(text, "b1", 1, MatcherConfig(collapse_whitespace=True))
        assert collapsed[0].cleaned_text == "0. Governor: Ann Lee (Blue Party)"

    def test_unicode_normalized(self):
        decomposed = "0. Governor: Jose\u0301 Lee (Blue Party)"
        assert clean_lines(decomposed, "b1", 1)[0].cleaned_text == "0. Governor: Jos\u00e9 Lee (Blue Party)"

    def test_generated_ballot_round_trips(self, small_corpus):
        ballots, _, _ = small_corpus
        ballot = ballots[0]
        lines = clean_lines(ballot.render(), ballot.ballot_id, 10)
        assert tuple(line.cleaned_text for line in lines) == ballot.lines


class TestMatchLine:
    def test_exact_match(self, small_index):
        decision = match_line(line_at(0, "0. Governor: Bo Diaz (Green Party)"), small_index)
        assert decision.kind == DecisionKind.CONFIDENT
        assert decision.matched_entry.candidate_name == "Bo Diaz"
        assert len(decision.candidates) == 1
        assert decision.candidates[0].lev_similarity == 1.0
        assert decision.candidates[0].jw_similarity == 1.0
        assert not decision.needs_review

    def test_similar_names_without_ids_tie(self, small_index):
        decision = match_line(line_at(1, "1. Sheriff: Mark Xay (Unity Party)"), small_index)
        assert decision.kind == DecisionKind.CONFUSION
        assert decision.reason == ConfusionReason.LEVENSHTEIN_TIE
        assert {c.entry.candidate_name for c in decision.candidates} == {"Mark Day", "Mark May"}
        assert decision.matched_entry is None

    def test_similar_names_with_ids_resolve(self):
        lexicon = Lexicon(entries=(
            LexiconEntry(0, "Sheriff", "Mark Day", "Unity Party", "12"),
            LexiconEntry(0, "Sheriff", "Mark May", "Unity Party", "3456"),
        ))
        decision = match_line(line_at(0, "0. Sheriff: Mark Xay-12 (Unity Party)"), build_contest_index(lexicon))
        assert decision.kind == DecisionKind.CONFIDENT
        assert decision.matched_entry.candidate_name == "Mark Day"

    def test_write_in(self, small_index):
        text = "1. Sheriff: Zyx Quobb (Write-in)"
        decision = match_line(line_at(1, text), small_index)
        assert decision.kind == DecisionKind.WRITE_IN
        assert decision.captured_text == text
        assert decision.contest_index == 1
        assert decision.needs_review

    def test_metric_disagreement(self):
        lexicon = Lexicon(entries=(
            LexiconEntry(0, "T", "a", "p", canonical_line="XBCDEFGHI"),
            LexiconEntry(0, "T", "b", "p", canonical_line="ABCDEFGHIJK"),
        ))
        cfg = MatcherConfig(writein_threshold_lev=0.0, writein_threshold_jw=0.0)
        decision = match_line(line_at(0, "ABCDEFGH"), build_contest_index(lexicon), cfg)
        assert decision.kind == DecisionKind.CONFUSION
        assert decision.reason == ConfusionReason.METRIC_DISAGREEMENT
        closest_by_edits, closest_by_jw = decision.candidates
        assert closest_by_edits.entry.canonical_line == "XBCDEFGHI"
        assert closest_by_jw.entry.canonical_line == "ABCDEFGHIJK"

    def test_jaro_winkler_tie(self, small_index):
        cfg = MatcherConfig(tie_tolerance=1.0)
        decision = match_line(line_at(1, "1. Sheriff: Rosa Quint (Civic Unio)"), small_index, cfg)
        assert decision.reason == ConfusionReason.JARO_WINKLER_TIE
        assert len(decision.candidates) == 3

    def test_case_fold(self, small_index):
        text = "0. GOVERNOR: ANN LEE (BLUE PARTY)"
        folded = match_line(line_at(0, text), small_index, MatcherConfig(case_fold=True))
        assert folded.kind == DecisionKind.CONFIDENT
        assert folded.matched_entry.candidate_name == "Ann Lee"
        assert match_line(line_at(0, text), small_index).kind != DecisionKind.CONFIDENT

    def test_scan_mode_derives_contest(self, small_index):
        cfg = MatcherConfig(position_keyed=False)
        decision = match_line(line_at(0, "1. Sheriff: Rosa Quint (Civic Union)"), small_index, cfg)
        assert decision.kind == DecisionKind.CONFIDENT
        assert decision.contest_index == 1

    def test_empty_group(self, small_index):
        with pytest.raises(MatcherConfigurationError):
            match_line(line_at(4, "4. Mayor: Ann Lee (Blue Party)"), small_index)

    def test_empty_index_in_scan_mode(self):
        with pytest.raises(MatcherConfigurationError):
            match_line(line_at(0, "anything"), ContestIndex(), MatcherConfig(position_keyed=False))

    def test_deterministic(self, small_index):
        line = line_at(1, "1. Sheriff: Mark  Day (Unity Party)")
        assert match_line(line, small_index) == match_line(line, small_index)

    def test_first_character_misread(self, small_index):
        decision = match_line(line_at(1, "l. Sheriff: Rosa Quint (Civic Union)"), small_index)
        assert decision.kind == DecisionKind.CONFIDENT
        assert decision.matched_entry.candidate_name == "Rosa Quint"

    def test_non_confident_keeps_evidence(self, small_index):
        texts = ["1. Sheriff: Mark Xay (Unity Party)", "1. Sheriff: Zyx Quobb (Write-in)"]
        for text in texts:
            decision = match_line(line_at(1, text), small_index)
            if decision.kind == DecisionKind.CONFUSION:
                assert len(decision.candidates) >= 2
            else:
                assert decision.captured_text == text
            assert decision.raw_text == text


@st.composite
def lexicons_three_apart(draw) -> Lexicon:
    """Two candidates whose lines differ by exactly three substitutions"""
    name = draw(st.text(alphabet=string.ascii_letters, min_size=6, max_size=12))
    positions = draw(st.lists(st.integers(0, len(name) - 1), min_size=3, max_size=3, unique=True))
    other = list(name)
    for p in positions:
        other[p] = draw(st.sampled_from([c for c in string.ascii_letters if c != name[p]]))
    lexicon = Lexicon(entries=(
        LexiconEntry(0, "Governor", name, "Blue Party"),
        LexiconEntry(0, "Governor", "".join(other), "Blue Party"),
    ))
    assume(validate_lexicon(lexicon).min_distance == 3)
    return lexicon


def assert_single_edits_recover(lexicon: Lexicon, contests=None):
    """Every single edit of every line resolves Confident to the line it came from"""
    assert validate_lexicon(lexicon, d_min=2).passed
    index = build_contest_index(lexicon)
    cfg = MatcherConfig()
    for entry in lexicon.entries:
        if contests is not None and entry.contest_index not in contests:
            continue
        for edited in single_edits(entry.canonical_line):
            decision = match_line(line_at(entry.contest_index, edited), index, cfg)
            assert decision.kind == DecisionKind.CONFIDENT, (edited, decision.reason)
            assert decision.matched_entry == entry, edited


class TestSingleEditRecovery:
    @settings(max_examples=10, deadline=None)
    @given(lexicon=lexicons_three_apart())
    def test_lines_three_edits_apart(self, lexicon):
        assert_single_edits_recover(lexicon)

    def test_shared_prefix_edit_with_ids(self):
        lexicon = Lexicon(entries=(
            LexiconEntry(8, "Sheriff", "Mark Day", "Unity Party", "68486"),
            LexiconEntry(8, "Sheriff", "Mark May", "Unity Party", "12"),
        ))
        index = build_contest_index(lexicon)
        for edited in ("8.5Sheriff: Mark Day-68486 (Unity Party)",
                       "8. 6heriff: Mark Day-68486 (Unity Party)",
                       "8. Sh6riff: Mark Day-68486 (Unity Party)"):
            decision = match_line(line_at(8, edited), index)
            assert decision.kind == DecisionKind.CONFIDENT, edited
            assert decision.matched_entry.candidate_name == "Mark Day"


@pytest.mark.slow
class TestSingleEditRecoveryOnGeneratedLexicons:
    def test_ten_contest_lexicon(self, contests):
        assert_single_edits_recover(build_lexicon(contests))

    @pytest.mark.parametrize("d_min", [2, 3])
    @pytest.mark.parametrize("seed", range(6))
    def test_similar_pair_contest_with_ids(self, seed, d_min):
        lexicon = assign_candidate_ids(build_lexicon(add_similar_pair(default_contests(seed=seed))),
                                       d_min=d_min, seed=seed)
        assert_single_edits_recover(lexicon, contests={SIMILAR_PAIR_CONTEST})


class TestResolveBallot:
    def test_clean_ballot(self, small_corpus):
        ballots, lexicon, truth = small_corpus
        index = build_contest_index(lexicon)
        for ballot in ballots:
            decisions = resolve_ballot(ballot.render(), ballot.ballot_id, index)
            assert [d.line_position for d in decisions] == list(range(10))
            for decision, expected in zip(decisions, truth.ballots[ballot.ballot_id]):
                if expected.write_in:
                    assert decision.kind == DecisionKind.WRITE_IN
                    assert decision.captured_text == expected.text
                else:
                    assert decision.kind == DecisionKind.CONFIDENT
                    assert decision.matched_entry.canonical_line == expected.text

    def test_write_in_ballot(self, small_corpus):
        ballots, lexicon, truth = small_corpus
        ballot = next(b for b in ballots if any(o.write_in for o in truth.ballots[b.ballot_id]))
        kinds = [d.kind for d in resolve_ballot(ballot.render(), ballot.ballot_id, build_contest_index(lexicon))]
        assert kinds.count(DecisionKind.CONFIDENT) == 9
        assert kinds.count(DecisionKind.WRITE_IN) == 1

    def test_every_first_character_misread(self, small_corpus_ids):
        ballots, lexicon, truth = small_corpus_ids
        ballot = next(b for b in ballots if not any(o.write_in for o in truth.ballots[b.ballot_id]))
        text = "\n".join("I" + line[1:] for line in ballot.lines)
        decisions = resolve_ballot(text, ballot.ballot_id, build_contest_index(lexicon))
        assert all(d.kind == DecisionKind.CONFIDENT for d in decisions)
        assert [d.matched_entry.canonical_line for d in decisions] == list(ballot.lines)

    def test_wrong_line_count_is_unreadable(self, small_corpus):
        ballots, lexicon, _ = small_corpus
        ballot = ballots[0]
        text = "\n".join(ballot.lines[:7])
        decisions = resolve_ballot(text, ballot.ballot_id, build_contest_index(lexicon))
        assert len(decisions) == 10
        assert all(d.kind == DecisionKind.UNREADABLE for d in decisions)
        assert "found 7" in decisions[0].note
        assert decisions[6].raw_text == ballot.lines[6]
        assert decisions[9].raw_text == ""


class TestConfusionLog:
    def test_tie_record(self, small_index):
        decision = match_line(line_at(1, "1. Sheriff: Mark Xay (Unity Party)"), small_index)
        assert confusion_record(decision) == "\t".join([
            "b1", "1", "1. Sheriff: Mark Xay (Unity Party)", "LevenshteinTie",
            "1. Sheriff: Mark Day (Unity Party)", "0.970588", "0.988235",
            "1. Sheriff: Mark May (Unity Party)", "0.970588", "0.988235",
        ])

    def test_escaping(self):
        decision = MatchDecision(kind=DecisionKind.UNREADABLE, ballot_id="b2", line_position=3,
                                 contest_index=3, raw_text="a\tb\\c\nd")
        assert confusion_record(decision) == "b2\t3\ta\\tb\\\\c\\nd\tUnreadable"

    def test_only_review_decisions_logged(self, small_index):
        decisions = [
            match_line(line_at(0, "0. Governor: Ann Lee (Blue Party)"), small_index),
            match_line(line_at(1, "1. Sheriff: Mark Xay (Unity Party)"), small_index),
            match_line(line_at(1, "1. Sheriff: Zyx Quobb (Write-in)"), small_index),
        ]
        rows = review_records(decisions)
        assert len(rows) == 2
        assert rows[1].split("\t")[3] == "WriteIn"
