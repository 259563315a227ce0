"""
Ballot corpus on disk: the boundary between an OCR engine and iOCR

A corpus directory holds one `<ballot_id>.txt` per ballot (plain OCR text),
`manifest.json` with the ground truth and `dictionary.txt` with the lexicon.
"""
import json
import logging
from pathlib import Path
from typing import Dict, Iterable, Mapping, Optional, Sequence

import chardet

from .errors import CorpusError, DictionaryFormatError
from .lexicon import Lexicon, parse_dictionary, serialize_dictionary
from .matcher import MatchDecision, review_records
from .synth import Ballot
from .tally import AccuracyReport, GroundTruth, Tally, report

logger = logging.getLogger(__name__)

MANIFEST_FILENAME = "manifest.json"
DICTIONARY_FILENAME = "dictionary.txt"
BALLOT_SUFFIX = ".txt"
# chardet guesses below this confidence are treated as unreadable
MIN_DETECTION_CONFIDENCE = 0.5


def write_text(path: Path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', encoding='utf-8', newline='\n') as f:
        f.write(text)
    return path


def write_json(path: Path, data: Mapping) -> Path:
    """Stable JSON: sorted keys, two-space indent, trailing newline"""
    return write_text(path, json.dumps(data, indent=2, ensure_ascii=False, sort_keys=True) + "\n")


def write_corpus(out_dir: Path, ballots: Sequence[Ballot], truth: GroundTruth,
                 lexicon: Lexicon) -> Path:
    """Write ballots, manifest and dictionary into out_dir"""
    out_dir = Path(out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        for ballot in ballots:
            write_text(out_dir / f"{ballot.ballot_id}{BALLOT_SUFFIX}", ballot.render())
        write_json(out_dir / MANIFEST_FILENAME, truth.to_dict())
        write_text(out_dir / DICTIONARY_FILENAME, serialize_dictionary(lexicon))
    except OSError as e:
        raise CorpusError(f"cannot write corpus to {out_dir}: {e}") from e
    logger.info(f"Wrote {len(ballots)} ballots to {out_dir}")
    return out_dir


def decode_ballot(raw: bytes, name: str = "") -> Optional[str]:
    """UTF-8 first, then chardet; None for binary or undetectable content"""
    if b"\x00" in raw:
        logger.warning(f"Ballot file {name} looks binary; marking unreadable")
        return None
    try:
        return raw.decode('utf-8-sig')
    except UnicodeDecodeError:
        pass

    detected = chardet.detect(raw)
    encoding = detected.get('encoding')
    confidence = detected.get('confidence') or 0.0
    if not encoding or confidence < MIN_DETECTION_CONFIDENCE:
        logger.warning(f"Ballot file {name}: encoding not detected (confidence {confidence:.2f})")
        return None
    try:
        text = raw.decode(encoding)
    except (UnicodeDecodeError, LookupError) as e:
        logger.warning(f"Ballot file {name}: cannot decode as {encoding}: {e}")
        return None
    logger.debug(f"Ballot file {name} decoded as {encoding} ({confidence:.2f})")
    return text


def read_ballot_dir(path: Path) -> Dict[str, Optional[str]]:
    """ballot_id -> OCR text, or None when the file cannot be decoded"""
    path = Path(path)
    if not path.is_dir():
        raise CorpusError(f"ballot directory not found: {path}")
    files = sorted(p for p in path.glob(f"*{BALLOT_SUFFIX}")
                   if p.is_file() and p.name != DICTIONARY_FILENAME)
    if not files:
        raise CorpusError(f"no ballot files ({BALLOT_SUFFIX}) in {path}")

    texts: Dict[str, Optional[str]] = {}
    for file in files:
        try:
            texts[file.stem] = decode_ballot(file.read_bytes(), file.name)
        except OSError as e:
            logger.warning(f"Cannot read {file}: {e}")
            texts[file.stem] = None
    logger.info(f"Read {len(texts)} ballot files from {path}")
    return texts


def load_dictionary(path: Path) -> Lexicon:
    path = Path(path)
    if not path.is_file():
        raise CorpusError(f"dictionary not found: {path}")
    try:
        text = path.read_text(encoding='utf-8')
    except (OSError, UnicodeDecodeError) as e:
        raise CorpusError(f"cannot read dictionary {path}: {e}") from e
    try:
        return parse_dictionary(text)
    except DictionaryFormatError as e:
        raise DictionaryFormatError(f"{path}: {e}") from e


def load_manifest(path: Path) -> GroundTruth:
    path = Path(path)
    if not path.is_file():
        raise CorpusError(f"manifest not found: {path}")
    try:
        with open(path, 'r', encoding='utf-8') as f:
            data = json.load(f)
        return GroundTruth.from_dict(data)
    except (OSError, json.JSONDecodeError, KeyError, TypeError) as e:
        raise CorpusError(f"invalid manifest {path}: {e}") from e


def write_confusion_log(path: Path, decisions: Iterable[MatchDecision], append: bool = True) -> int:
    """Add review rows to the log (append=False starts it over); returns how many were written"""
    rows = review_records(list(decisions))
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'a' if append else 'w', encoding='utf-8', newline='\n') as f:
        for row in rows:
            f.write(row + "\n")
    return len(rows)


def write_tally_report(out_dir: Path, tally: Tally, contest_titles: Optional[Mapping[int, str]] = None) -> str:
    """tally.txt (console report) and tally.json"""
    text = report(tally, contest_titles)
    write_text(Path(out_dir) / "tally.txt", text)
    write_json(Path(out_dir) / "tally.json", tally.to_dict())
    return text


def write_accuracy_report(out_dir: Path, accuracy: AccuracyReport, stem: str = "accuracy") -> None:
    write_text(Path(out_dir) / f"{stem}.tsv", accuracy.to_tsv())
    write_json(Path(out_dir) / f"{stem}.json", accuracy.to_dict())


def load_accuracy_report(path: Path) -> AccuracyReport:
    path = Path(path)
    try:
        with open(path, 'r', encoding='utf-8') as f:
            return AccuracyReport.from_dict(json.load(f))
    except (OSError, json.JSONDecodeError, KeyError, TypeError) as e:
        raise CorpusError(f"invalid accuracy report {path}: {e}") from e
