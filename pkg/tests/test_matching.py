import logging

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.core_model import Artifact, Category, ConfusionTally, DeclaredTally, Decision, Mode
from src.errors import InconsistentTallyError, PairingError
from src.matching import (
    gold_relevant_count, match_artifacts, reconcile_tally, score_pair, tally_for_pair,
    tally_from_match,
)
from src.rendering import fmt_value

INC = Category.INCULPATORY
EXC = Category.EXCULPATORY


def _worked_example():
    gold = [Artifact(f"g{i:02d}", INC) for i in range(1, 10)] + [Artifact("g10", EXC)]
    candidate = ([Artifact(f"g{i:02d}", INC) for i in range(1, 5)]
                 + [Artifact("g10", EXC), Artifact("x01", EXC), Artifact("x02", EXC)])
    return gold, candidate


class TestMatchArtifacts:
    def test_worked_example_sets(self):
        result = match_artifacts(*_worked_example())
        assert result.tp_ids == {"g01", "g02", "g03", "g04", "g10"}
        assert result.fp_ids == {"x01", "x02"}
        assert result.fn_ids == {"g05", "g06", "g07", "g08", "g09"}
        assert not result.polarity_mismatches
        tally = tally_from_match(result)
        assert (tally.tp, tally.fp, tally.fn, tally.retrieved, tally.relevant) == (5, 2, 5, 7, 10)

    def test_polarity_mismatch_still_counts_as_retrieved(self):
        result = match_artifacts([Artifact("a", INC), Artifact("b", EXC)],
                                 [Artifact("a", EXC), Artifact("b", EXC)])
        assert result.tp_ids == {"a", "b"}
        assert result.polarity_mismatches == {"a"}

    def test_duplicate_ids_are_rejected(self):
        with pytest.raises(PairingError, match="candidate"):
            match_artifacts([Artifact("a", INC)], [Artifact("a", INC), Artifact("a", EXC)])

    def test_empty_lists(self):
        assert tally_from_match(match_artifacts([], [])).relevant == 0


class TestReconcileTally:
    def test_triage_exam_one(self):
        tally = reconcile_tally(DeclaredTally(retrieved=6, false_positives=2), gold_relevant=12)
        assert (tally.tp, tally.fp, tally.fn) == (4, 2, 8)

    def test_everything_false(self):
        tally = reconcile_tally(DeclaredTally(retrieved=5, false_positives=5), gold_relevant=1)
        assert (tally.tp, tally.fn) == (0, 1)

    def test_more_hits_than_gold_holds(self):
        with pytest.raises(InconsistentTallyError) as excinfo:
            reconcile_tally(DeclaredTally(retrieved=30, false_positives=0), gold_relevant=20)
        assert excinfo.value.report == {
            "retrieved": 30, "false_positives": 0, "relevant_retrieved": 30, "gold_relevant": 20,
        }


class TestPairs:
    def test_tally_candidate_against_itemized_gold(self, make_record, make_gold, make_artifacts):
        gold = make_gold(mode=Mode.ITEMIZED, declared_tally=None,
                         artifacts=make_artifacts("a", "b", "c", "d"))
        candidate = make_record(declared_tally=DeclaredTally(3, 1))
        tally, match = tally_for_pair(gold, candidate)
        assert match is None
        assert (tally.tp, tally.fp, tally.fn) == (2, 1, 2)

    def test_itemized_candidate_needs_itemized_gold(self, make_record, make_gold, make_artifacts):
        candidate = make_record(mode=Mode.ITEMIZED, declared_tally=None,
                                artifacts=make_artifacts("a"))
        with pytest.raises(PairingError):
            tally_for_pair(make_gold(), candidate)

    def test_polarity_mismatch_is_logged(self, make_record, make_gold, make_artifacts, caplog):
        gold = make_gold(mode=Mode.ITEMIZED, declared_tally=None, artifacts=make_artifacts("a"))
        candidate = make_record(mode=Mode.ITEMIZED, declared_tally=None,
                                artifacts=make_artifacts("a", category=EXC))
        with caplog.at_level(logging.WARNING, logger="src.matching"):
            scored = score_pair(gold, candidate)
        assert scored.polarity_mismatches == {"a"}
        assert scored.metrics.tally.tp == 1
        assert "polarity mismatch" in caplog.text

    def test_score_pair_carries_identity(self, make_record, make_gold):
        candidate = make_record(decision=Decision.FURTHER_ANALYSIS_YES)
        scored = score_pair(make_gold(relevant=8), candidate)
        assert (scored.case_id, scored.exhibit_id, scored.examiner_id) == (
            "case-x", "exhibit-1", "alice")
        assert scored.timestamp == candidate.timestamp
        assert scored.gold_relevant == 8
        assert scored.decision is Decision.FURTHER_ANALYSIS_YES
        assert fmt_value(scored.metrics.precision) == "0.80"

    def test_gold_relevant_count(self, make_gold, make_artifacts):
        assert gold_relevant_count(make_gold(relevant=19)) == 19
        itemized = make_gold(mode=Mode.ITEMIZED, declared_tally=None,
                             artifacts=make_artifacts("a", "b"))
        assert gold_relevant_count(itemized) == 2


many = settings(max_examples=1000, deadline=None)
artifact_lists = st.lists(
    st.builds(Artifact, id=st.integers(0, 29).map(lambda i: f"a{i:02d}"),
              category=st.sampled_from(Category)),
    max_size=15, unique_by=lambda a: a.id,
)


@many
@given(gold=artifact_lists, candidate=artifact_lists)
def test_swapping_sides_swaps_misses_and_false_hits(gold, candidate):
    forward = match_artifacts(gold, candidate)
    backward = match_artifacts(candidate, gold)
    assert backward.tp_ids == forward.tp_ids
    assert (backward.fp_ids, backward.fn_ids) == (forward.fn_ids, forward.fp_ids)
    assert backward.polarity_mismatches == forward.polarity_mismatches


@many
@given(artifacts=artifact_lists)
def test_a_list_matched_against_itself_is_perfect(artifacts):
    m = match_artifacts(artifacts, artifacts)
    assert tally_from_match(m) == ConfusionTally.from_counts(tp=len(artifacts), fp=0, fn=0)
    assert not m.polarity_mismatches
