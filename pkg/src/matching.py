"""Turn gold and candidate records into confusion tallies.

Itemized records are matched on exact artifact ids. Count-only records go
through `reconcile_tally`. Categories never affect membership; an id found on
both sides with different polarity is reported, and still counts as retrieved.
"""
from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass
from datetime import datetime
from typing import Optional, Sequence

from src.core_model import (
    Artifact, ConfusionTally, DeclaredTally, Decision, ExaminationRecord, Mode, parse_timestamp,
)
from src.errors import InconsistentTallyError, PairingError
from src.metrics import CaseMetrics, score_case

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MatchResult:
    tp_ids: frozenset
    fp_ids: frozenset
    fn_ids: frozenset
    polarity_mismatches: frozenset = frozenset()


@dataclass(frozen=True)
class ScoredComparison:
    case_id: str
    exhibit_id: str
    examiner_id: str
    process_id: str
    timestamp: str
    decision: Optional[Decision]
    gold_relevant: int
    metrics: CaseMetrics
    polarity_mismatches: frozenset = frozenset()

    @property
    def instant(self) -> datetime:
        return parse_timestamp(self.timestamp)


def _index(artifacts: Sequence[Artifact], side: str) -> dict[str, Artifact]:
    counts = Counter(a.id for a in artifacts)
    duplicates = sorted(i for i, n in counts.items() if n > 1)
    if duplicates:
        raise PairingError(f"duplicate artifact ids in {side} list: {', '.join(duplicates)}")
    return {a.id: a for a in artifacts}


def match_artifacts(gold: Sequence[Artifact], candidate: Sequence[Artifact]) -> MatchResult:
    gold_by_id = _index(gold, "gold")
    cand_by_id = _index(candidate, "candidate")
    gold_ids, cand_ids = set(gold_by_id), set(cand_by_id)
    tp = gold_ids & cand_ids
    return MatchResult(
        tp_ids=frozenset(tp),
        fp_ids=frozenset(cand_ids - gold_ids),
        fn_ids=frozenset(gold_ids - cand_ids),
        polarity_mismatches=frozenset(
            i for i in tp if gold_by_id[i].category != cand_by_id[i].category
        ),
    )


def tally_from_match(m: MatchResult) -> ConfusionTally:
    return ConfusionTally.from_counts(tp=len(m.tp_ids), fp=len(m.fp_ids), fn=len(m.fn_ids))


def reconcile_tally(declared: DeclaredTally, gold_relevant: int) -> ConfusionTally:
    tp = declared.retrieved - declared.false_positives
    if tp > gold_relevant:
        raise InconsistentTallyError({
            "retrieved": declared.retrieved,
            "false_positives": declared.false_positives,
            "relevant_retrieved": tp,
            "gold_relevant": gold_relevant,
        })
    return ConfusionTally(tp=tp, fp=declared.false_positives, fn=gold_relevant - tp,
                          retrieved=declared.retrieved, relevant=gold_relevant)


def gold_relevant_count(gold: ExaminationRecord) -> int:
    if gold.mode is Mode.ITEMIZED:
        return len(gold.artifacts or ())
    return gold.declared_tally.retrieved - gold.declared_tally.false_positives


def tally_for_pair(gold: ExaminationRecord,
                   candidate: ExaminationRecord) -> tuple[ConfusionTally, Optional[MatchResult]]:
    if candidate.mode is Mode.TALLY:
        return reconcile_tally(candidate.declared_tally, gold_relevant_count(gold)), None
    if gold.mode is not Mode.ITEMIZED:
        raise PairingError(
            f"itemized candidate {candidate.examiner_id} on {candidate.case_id}/"
            f"{candidate.exhibit_id} needs an itemized gold record"
        )
    result = match_artifacts(gold.artifacts or (), candidate.artifacts or ())
    if result.polarity_mismatches:
        logger.warning("polarity mismatch on %s/%s for %s: %s", candidate.case_id,
                       candidate.exhibit_id, candidate.examiner_id,
                       ", ".join(sorted(result.polarity_mismatches)))
    return tally_from_match(result), result


def score_pair(gold: ExaminationRecord, candidate: ExaminationRecord) -> ScoredComparison:
    tally, match = tally_for_pair(gold, candidate)
    relevant = gold_relevant_count(gold)
    return ScoredComparison(
        case_id=candidate.case_id,
        exhibit_id=candidate.exhibit_id,
        examiner_id=candidate.examiner_id,
        process_id=candidate.process_id,
        timestamp=candidate.timestamp,
        decision=candidate.decision,
        gold_relevant=relevant,
        metrics=score_case(relevant, tally),
        polarity_mismatches=match.polarity_mismatches if match else frozenset(),
    )
