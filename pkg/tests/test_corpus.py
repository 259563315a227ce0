"""
Corpus directories: ballots, manifest, dictionary and report files
"""
import json

import pytest

from src.core.corpus import (
    DICTIONARY_FILENAME,
    MANIFEST_FILENAME,
    decode_ballot,
    load_accuracy_report,
    load_dictionary,
    load_manifest,
    read_ballot_dir,
    write_accuracy_report,
    write_confusion_log,
    write_corpus,
    write_tally_report,
)
from src.core.errors import CorpusError, DictionaryFormatError
from src.core.lexicon import build_contest_index
from src.core.matcher import DecisionKind, resolve_ballot
from src.core.tally import AccuracyReport, Tally, accumulate


@pytest.fixture
def corpus_dir(tmp_path, small_corpus):
    ballots, lexicon, truth = small_corpus
    return write_corpus(tmp_path / "corpus", ballots, truth, lexicon)


class TestWriteAndRead:
    def test_layout(self, corpus_dir, small_corpus):
        ballots, _, _ = small_corpus
        assert (corpus_dir / MANIFEST_FILENAME).is_file()
        assert (corpus_dir / DICTIONARY_FILENAME).is_file()
        assert len(list(corpus_dir.glob("*.txt"))) == len(ballots) + 1

    def test_ballots_read_back(self, corpus_dir, small_corpus):
        ballots, _, _ = small_corpus
        texts = read_ballot_dir(corpus_dir)
        assert "dictionary" not in texts
        assert texts == {b.ballot_id: b.render() for b in ballots}

    def test_manifest_and_dictionary_read_back(self, corpus_dir, small_corpus):
        _, lexicon, truth = small_corpus
        assert load_manifest(corpus_dir / MANIFEST_FILENAME) == truth
        assert load_dictionary(corpus_dir / DICTIONARY_FILENAME) == lexicon

    def test_manifest_is_stable_json(self, corpus_dir):
        text = (corpus_dir / MANIFEST_FILENAME).read_text(encoding="utf-8")
        data = json.loads(text)
        assert list(data) == sorted(data)
        assert text.endswith("\n")


class TestDecode:
    def test_utf8_bom_stripped(self):
        assert decode_ballot("\ufeff0. Governor: José Lee".encode("utf-8")) == "0. Governor: José Lee"

    def test_binary_is_unreadable(self):
        assert decode_ballot(b"\x89PNG\r\n\x1a\n\x00\x00\x00\rIHDR") is None

    def test_unreadable_file_in_directory(self, corpus_dir):
        (corpus_dir / "broken.txt").write_bytes(b"\x00\x01\x02\x03")
        assert read_ballot_dir(corpus_dir)["broken"] is None


class TestErrors:
    def test_missing_directory(self, tmp_path):
        with pytest.raises(CorpusError, match="not found"):
            read_ballot_dir(tmp_path / "nowhere")

    def test_directory_without_ballots(self, tmp_path):
        (tmp_path / DICTIONARY_FILENAME).write_text("#contest 0 A\n0. A: B Cd (E)\n", encoding="utf-8")
        with pytest.raises(CorpusError, match="no ballot files"):
            read_ballot_dir(tmp_path)

    def test_missing_dictionary(self, tmp_path):
        with pytest.raises(CorpusError):
            load_dictionary(tmp_path / DICTIONARY_FILENAME)

    def test_malformed_dictionary_names_file(self, tmp_path):
        path = tmp_path / DICTIONARY_FILENAME
        path.write_text("#contest 0 Governor\nnot a ballot line\n", encoding="utf-8")
        with pytest.raises(DictionaryFormatError, match=DICTIONARY_FILENAME):
            load_dictionary(path)

    def test_invalid_manifest(self, tmp_path):
        path = tmp_path / MANIFEST_FILENAME
        path.write_text("{not json", encoding="utf-8")
        with pytest.raises(CorpusError, match="invalid manifest"):
            load_manifest(path)

    def test_invalid_accuracy_report(self, tmp_path):
        path = tmp_path / "accuracy.json"
        path.write_text("{}", encoding="utf-8")
        with pytest.raises(CorpusError):
            load_accuracy_report(path)


class TestReports:
    def test_confusion_log(self, tmp_path, small_index):
        text = "0. Governor: Ann Lee (Blue Party)\n1. Sheriff: Mark Xay (Unity Party)\n"
        decisions = resolve_ballot(text, "b1", small_index)
        assert [d.kind for d in decisions] == [DecisionKind.CONFIDENT, DecisionKind.CONFUSION]
        path = tmp_path / "logs" / "confusion.tsv"
        assert write_confusion_log(path, decisions) == 1
        assert write_confusion_log(path, decisions) == 1
        rows = path.read_text(encoding="utf-8").splitlines()
        assert len(rows) == 2
        assert rows[0].split("\t")[:4] == ["b1", "1", "1. Sheriff: Mark Xay (Unity Party)", "LevenshteinTie"]

    def test_confusion_log_starts_over(self, tmp_path, small_index):
        decisions = resolve_ballot("0. Governor: Ann Lee (Blue Party)\n1. Sheriff: Mark Xay (Unity Party)\n",
                                   "b1", small_index)
        path = tmp_path / "confusion.tsv"
        write_confusion_log(path, decisions)
        write_confusion_log(path, decisions)
        assert write_confusion_log(path, decisions, append=False) == 1
        assert len(path.read_text(encoding="utf-8").splitlines()) == 1

    def test_tally_report_files(self, tmp_path, small_corpus):
        ballots, lexicon, _ = small_corpus
        index = build_contest_index(lexicon)
        tally = Tally.empty(lexicon.fingerprint)
        for ballot in ballots:
            tally = accumulate(tally, resolve_ballot(ballot.render(), ballot.ballot_id, index))
        text = write_tally_report(tmp_path, tally, lexicon.contest_titles())
        assert (tmp_path / "tally.txt").read_text(encoding="utf-8") == text
        data = json.loads((tmp_path / "tally.json").read_text(encoding="utf-8"))
        assert data["total_decisions"] == 100
        assert data["lexicon_fingerprint"] == lexicon.fingerprint

    def test_accuracy_report_round_trip(self, tmp_path):
        result = AccuracyReport(total_lines=20, correct_lines=18, line_accuracy=0.9,
                                per_ballot_accuracy=(1.0, 0.8), ballot_ids=("a", "b"), system="raw")
        write_accuracy_report(tmp_path, result, "raw_accuracy")
        assert (tmp_path / "raw_accuracy.tsv").is_file()
        assert load_accuracy_report(tmp_path / "raw_accuracy.json") == result
