from fractions import Fraction

import pytest

from src.core_model import ConfusionTally, Decision, UndefinedReason
from src.errors import EmptyInputError, PairingError
from src.metrics import (
    AggregationPolicy, UndefinedHandling, compare_processes, decision_confusion, f_measure,
    gold_decision, macro_average, score_case,
)
from src.rendering import fmt_delta, fmt_value

YES = Decision.FURTHER_ANALYSIS_YES
NO = Decision.FURTHER_ANALYSIS_NO

# retrieved and false positives per exam, and the relevant count from the full analysis
TRIAGE_EXAMS = [(6, 2, 12), (5, 5, 1), (200, 0, 200), (216, 200, 30), (26, 22, 34)]


def _triage_cases():
    return [score_case(relevant, ConfusionTally(retrieved - fp, fp, relevant - retrieved + fp,
                                                retrieved, relevant))
            for retrieved, fp, relevant in TRIAGE_EXAMS]


def test_worked_example():
    metrics = score_case(10, ConfusionTally.from_counts(tp=5, fp=2, fn=5))
    assert metrics.precision.value == Fraction(5, 7)
    assert metrics.recall.value == Fraction(1, 2)
    assert metrics.f_measure.value == Fraction(10, 17)
    assert [fmt_value(metrics.precision), fmt_value(metrics.recall),
            fmt_value(metrics.f_measure)] == ["0.71", "0.50", "0.59"]
    assert metrics.fp_error.value == Fraction(2, 7)
    assert metrics.fn_error.value == Fraction(1, 2)


def test_nothing_relevant_found_scores_zero():
    metrics = score_case(1, ConfusionTally.from_counts(tp=0, fp=5, fn=1))
    assert metrics.f_measure.value == 0
    assert fmt_value(metrics.f_measure) == "0.00"


def test_empty_gold_makes_recall_and_f_undefined():
    metrics = score_case(0, ConfusionTally.from_counts(tp=0, fp=4, fn=0))
    assert metrics.precision.value == 0
    assert metrics.recall.reason is UndefinedReason.GOLD_EMPTY
    assert metrics.f_measure.reason is UndefinedReason.GOLD_EMPTY
    assert metrics.fp_error.value == 1
    assert metrics.fn_error.reason is UndefinedReason.GOLD_EMPTY
    assert fmt_value(metrics.f_measure) == "n/a"


def test_nothing_retrieved_makes_precision_undefined():
    metrics = score_case(5, ConfusionTally.from_counts(tp=0, fp=0, fn=5))
    assert metrics.precision.reason is UndefinedReason.ZERO_DENOMINATOR
    assert metrics.recall.value == 0
    assert metrics.f_measure.reason is UndefinedReason.ZERO_DENOMINATOR
    assert metrics.fn_error.value == 1


def test_gold_empty_dominates_when_both_undefined():
    metrics = score_case(0, ConfusionTally.from_counts(0, 0, 0))
    assert metrics.f_measure.reason is UndefinedReason.GOLD_EMPTY
    assert f_measure(metrics.precision, metrics.recall).reason is UndefinedReason.GOLD_EMPTY


def test_score_case_rejects_mismatched_gold():
    with pytest.raises(PairingError):
        score_case(12, ConfusionTally.from_counts(tp=4, fp=2, fn=2))


class TestTriageTool:
    @pytest.mark.parametrize("index, expected", [
        (0, ("0.67", "0.33", "0.44")),
        (1, ("0.00", "0.00", "0.00")),
        (2, ("1.00", "1.00", "1.00")),
        (3, ("0.07", "0.53", "0.13")),
        (4, ("0.15", "0.12", "0.13")),
    ])
    def test_per_exam_scores(self, index, expected):
        m = _triage_cases()[index]
        assert (fmt_value(m.precision), fmt_value(m.recall), fmt_value(m.f_measure)) == expected

    def test_exam_four_f_from_unrounded_inputs(self):
        f = _triage_cases()[3].f_measure.value
        assert f == Fraction(16, 123)
        assert fmt_value(f) == "0.13"

    def test_macro_averages(self):
        average = macro_average(_triage_cases())
        assert fmt_value(average.mean_precision) == "0.38"
        assert fmt_value(average.mean_recall) == "0.40"
        assert fmt_value(average.mean_f) == "0.34"
        assert average.n_cases == 5
        assert average.n_undefined_f == 0


class TestMacroAverage:
    def test_empty_input_is_rejected(self):
        with pytest.raises(EmptyInputError):
            macro_average([])

    def test_accuracy_skips_undefined_and_error_rates_zero_fill(self, case_metrics):
        cases = [case_metrics(2, 2, 0), case_metrics(0, 4, 0), case_metrics(0, 0, 0)]
        average = macro_average(cases)
        # only the first case has a defined recall and F
        assert average.mean_recall.value == 1
        assert average.mean_f.value == Fraction(2, 3)
        assert average.n_undefined_f == 2
        # fp errors 1/2, 1 and undefined -> (1/2 + 1 + 0) / 3
        assert average.mean_fp_error.value == Fraction(1, 2)
        assert average.mean_fn_error.value == 0

    def test_policy_can_skip_error_rates(self, case_metrics):
        cases = [case_metrics(2, 2, 0), case_metrics(0, 4, 0), case_metrics(0, 0, 0)]
        policy = AggregationPolicy(error_rates=UndefinedHandling.SKIP)
        assert macro_average(cases, policy).mean_fp_error.value == Fraction(3, 4)

    def test_all_undefined_stays_undefined(self, case_metrics):
        average = macro_average([case_metrics(0, 3, 0), case_metrics(0, 0, 0)])
        assert average.mean_f.reason is UndefinedReason.GOLD_EMPTY
        assert fmt_value(average.mean_f) == "n/a"


class TestDecisions:
    def test_gold_decision_follows_relevant_count(self):
        assert gold_decision(19) is YES
        assert gold_decision(0) is NO

    def test_single_false_positive_over_five_media(self):
        pairs = [(NO, YES), (YES, YES), (NO, NO), (NO, NO), (YES, YES)]
        rates = decision_confusion(pairs, "examiner-1")
        assert (rates.decision_fp, rates.decision_fp_rate) == (1, Fraction(1, 5))
        assert (rates.decision_fn, rates.decision_fn_rate) == (0, 0)
        assert rates.n_cases == 5

    def test_missed_exhibit_is_a_false_negative(self):
        rates = decision_confusion([(YES, NO), (NO, NO)])
        assert rates.decision_fn == 1
        assert rates.decision_fn_rate == Fraction(1, 2)

    def test_empty_input_is_rejected(self):
        with pytest.raises(EmptyInputError):
            decision_confusion([])

    def test_missing_decision_is_rejected(self):
        with pytest.raises(PairingError):
            decision_confusion([(YES, None)])


class TestCompareProcesses:
    def test_delta_is_first_minus_second(self, case_metrics):
        a = macro_average([case_metrics(3, 1, 0)])
        b = macro_average([case_metrics(1, 1, 2)])
        deltas = {d.name: d for d in compare_processes(a, b)}
        assert deltas["mean_precision"].delta == Fraction(1, 4)
        assert fmt_delta(deltas["mean_precision"].delta) == "+0.25"
        assert fmt_delta(-deltas["mean_recall"].delta) == "-0.67"

    def test_undefined_side_is_incomparable(self, case_metrics):
        a = macro_average([case_metrics(0, 3, 0)])
        b = macro_average([case_metrics(1, 1, 1)])
        delta_f = next(d for d in compare_processes(a, b) if d.name == "mean_f")
        assert not delta_f.comparable
        assert delta_f.delta is None
        assert fmt_delta(delta_f.delta) == "incomparable"
