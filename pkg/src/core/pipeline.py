"""
Corpus-level resolution: shard ballots, resolve each shard, merge tallies
"""
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .lexicon import ContestIndex
from .matcher import (
    DecisionKind,
    MatchDecision,
    MatcherConfig,
    clean_lines,
    resolve_ballot,
    unreadable_ballot,
)
from .tally import Tally, accumulate, merge

logger = logging.getLogger(__name__)

UNDECODABLE_NOTE = "ballot file could not be decoded"

Shard = List[Tuple[str, Optional[str]]]


def shard_ballots(ballot_texts: Mapping[str, Optional[str]], workers: int) -> List[Shard]:
    """Contiguous shards of the id-sorted ballots"""
    items = sorted(ballot_texts.items())
    if not items:
        return []
    size = math.ceil(len(items) / max(1, workers))
    return [items[i:i + size] for i in range(0, len(items), size)]


def _resolve_shard(shard: Shard, index: ContestIndex, cfg: MatcherConfig,
                   lexicon_fingerprint: str) -> Tuple[Tally, Dict[str, List[MatchDecision]]]:
    tally = Tally.empty(lexicon_fingerprint)
    decisions: Dict[str, List[MatchDecision]] = {}
    for ballot_id, text in shard:
        if text is None:
            resolved = unreadable_ballot(ballot_id, index.lines_per_ballot, UNDECODABLE_NOTE)
        else:
            resolved = resolve_ballot(text, ballot_id, index, cfg)
        decisions[ballot_id] = resolved
        tally = accumulate(tally, resolved)
    return tally, decisions


def resolve_corpus(ballot_texts: Mapping[str, Optional[str]], index: ContestIndex,
                   cfg: Optional[MatcherConfig] = None, workers: int = 1,
                   lexicon_fingerprint: str = "") -> Tuple[Tally, Dict[str, List[MatchDecision]]]:
    """
    Resolve every ballot and tally the result.

    The outcome does not depend on `workers`: shards are contiguous runs of
    the sorted ids and their tallies are merged with the tally monoid.
    """
    cfg = cfg or MatcherConfig()
    logger.info(f"Resolving {len(ballot_texts)} ballots with {workers} worker(s); "
                f"matcher settings {cfg.to_dict()}")
    shards = shard_ballots(ballot_texts, workers)

    if workers > 1 and len(shards) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_resolve_shard, s, index, cfg, lexicon_fingerprint) for s in shards]
            results = [f.result() for f in futures]
    else:
        results = [_resolve_shard(s, index, cfg, lexicon_fingerprint) for s in shards]

    tally = Tally.empty(lexicon_fingerprint)
    decisions: Dict[str, List[MatchDecision]] = {}
    for shard_tally, shard_decisions in results:
        tally = merge(tally, shard_tally)
        decisions.update(shard_decisions)

    review = tally.confusion_count + tally.unreadable_count
    if review:
        logger.warning(f"{tally.confusion_count} confusion and {tally.unreadable_count} "
                       f"unreadable lines need review")
    return tally, decisions


def raw_lines(ballot_texts: Mapping[str, Optional[str]],
              cfg: Optional[MatcherConfig] = None) -> Dict[str, List[str]]:
    """Cleaned lines per ballot without any matching, for the raw-OCR baseline"""
    relaxed = MatcherConfig.from_dict({**(cfg or MatcherConfig()).to_dict(), "position_keyed": False})
    return {
        ballot_id: [] if text is None else
        [line.cleaned_text for line in clean_lines(text, ballot_id, 0, relaxed)]
        for ballot_id, text in ballot_texts.items()
    }


def unreadable_ballots(decisions: Mapping[str, Sequence[MatchDecision]]) -> List[str]:
    """Ids of ballots resolved as a whole to Unreadable"""
    return sorted(
        ballot_id for ballot_id, resolved in decisions.items()
        if resolved and all(d.kind == DecisionKind.UNREADABLE for d in resolved)
    )
