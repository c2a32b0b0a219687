from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.core_model import (
    Artifact, Category, ConfusionTally, DeclaredTally, ExaminationRecord, Mode, MetricValue, Role,
    UndefinedReason, parse_timestamp, validate_record,
)
from src.errors import TallyError


class TestConfusionTally:
    def test_from_counts_derives_totals(self):
        tally = ConfusionTally.from_counts(tp=5, fp=2, fn=5)
        assert (tally.retrieved, tally.relevant) == (7, 10)

    @pytest.mark.parametrize("counts", [
        {"tp": 1, "fp": 1, "fn": 0, "retrieved": 3, "relevant": 1},
        {"tp": 1, "fp": 0, "fn": 1, "retrieved": 1, "relevant": 3},
        {"tp": -1, "fp": 1, "fn": 1, "retrieved": 0, "relevant": 0},
    ])
    def test_inconsistent_counts_are_rejected(self, counts):
        with pytest.raises(TallyError):
            ConfusionTally(**counts)


class TestMetricValue:
    def test_defined_holds_a_fraction(self):
        value = MetricValue.defined(Fraction(5, 7))
        assert value.is_defined
        assert value.as_float() == pytest.approx(0.714285, abs=1e-6)

    def test_undefined_keeps_its_reason(self):
        value = MetricValue.undefined("gold_empty")
        assert not value.is_defined
        assert value.reason is UndefinedReason.GOLD_EMPTY
        assert value.as_float() is None

    def test_out_of_range_value_is_rejected(self):
        with pytest.raises(ValueError):
            MetricValue.defined(Fraction(3, 2))

    def test_value_and_reason_are_exclusive(self):
        with pytest.raises(ValueError):
            MetricValue(Fraction(1, 2), UndefinedReason.ZERO_DENOMINATOR)


class TestParseTimestamp:
    def test_accepts_zulu_suffix(self):
        assert parse_timestamp("2013-01-20T10:00:00Z").utcoffset().total_seconds() == 0

    def test_rejects_naive_timestamp(self):
        with pytest.raises(ValueError, match="offset"):
            parse_timestamp("2013-01-20T10:00:00")


def _codes(record):
    return [v.code for v in validate_record(record)]


class TestValidateRecord:
    def test_well_formed_tally_record(self, make_record):
        assert validate_record(make_record()) == []

    def test_well_formed_itemized_record(self, make_record, make_artifacts):
        record = make_record(mode=Mode.ITEMIZED, declared_tally=None,
                             artifacts=make_artifacts("a", "b"))
        assert validate_record(record) == []

    def test_empty_identity_fields(self, make_record):
        violations = validate_record(make_record(case_id="", examiner_id=""))
        assert [(v.code, v.field) for v in violations] == [
            ("missing_field", "case_id"), ("missing_field", "examiner_id"),
        ]

    def test_timestamp_without_offset(self, make_record):
        assert _codes(make_record(timestamp="2020-01-01T09:00:00")) == ["timestamp"]

    def test_itemized_record_needs_artifacts(self, make_record):
        assert "mode_mismatch" in _codes(make_record(mode=Mode.ITEMIZED))

    def test_tally_record_must_not_carry_artifacts(self, make_record, make_artifacts):
        assert _codes(make_record(artifacts=make_artifacts("a"))) == ["mode_mismatch"]

    def test_duplicate_and_empty_artifact_ids(self, make_record, make_artifacts):
        record = make_record(mode=Mode.ITEMIZED, declared_tally=None,
                             artifacts=make_artifacts("b", "a", "", "b", "a"))
        assert _codes(record) == ["empty_artifact_id", "duplicate_artifact_id",
                                  "duplicate_artifact_id"]
        assert "'a'" in validate_record(record)[1].message

    def test_false_positives_exceed_retrieved(self, make_record):
        record = make_record(declared_tally=DeclaredTally(retrieved=2, false_positives=3))
        assert _codes(record) == ["tally_arithmetic"]

    def test_relevant_retrieved_must_agree(self, make_record):
        record = make_record(declared_tally=DeclaredTally(6, 2, relevant_retrieved=3))
        assert _codes(record) == ["tally_arithmetic"]

    def test_negative_count(self, make_record):
        record = make_record(declared_tally=DeclaredTally(retrieved=-1, false_positives=0))
        assert _codes(record) == ["negative_count"]

    def test_gold_cannot_declare_false_positives(self, make_record):
        record = make_record(role=Role.GOLD,
                             declared_tally=DeclaredTally(retrieved=5, false_positives=1))
        assert _codes(record) == ["tally_arithmetic"]

    def test_key_identifies_role(self, make_record, make_gold):
        assert make_record().key[-1] == "candidate"
        assert make_gold().key[-1] == "gold"


# small id pool, so duplicates and empty ids come up often
artifact_lists = st.lists(
    st.builds(Artifact, id=st.sampled_from(["", "a", "b", "c", "d"]),
              category=st.sampled_from(Category)),
    max_size=8,
)


@settings(max_examples=1000, deadline=None)
@given(data=st.data(), artifacts=artifact_lists)
def test_violations_do_not_depend_on_artifact_order(data, artifacts):
    shuffled = data.draw(st.permutations(artifacts))

    def record(items):
        return ExaminationRecord(
            case_id="case-x", exhibit_id="exhibit-1", examiner_id="alice", process_id="triage",
            role=Role.CANDIDATE, timestamp="2020-01-01T09:00:00+00:00", mode=Mode.ITEMIZED,
            artifacts=tuple(items),
        )

    assert validate_record(record(shuffled)) == validate_record(record(artifacts))
