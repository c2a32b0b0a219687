"""Precision, recall, F-measure, error rates and their macro-averages.

All values are exact fractions; rounding happens only when a report renders them.
Undefined values keep their reason so that "n/a" (nothing to find) stays distinct
from a legitimate zero.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Optional, Sequence

from src.core_model import ConfusionTally, Decision, MetricValue, UndefinedReason
from src.errors import EmptyInputError, PairingError

GOLD_EMPTY = UndefinedReason.GOLD_EMPTY
ZERO_DENOMINATOR = UndefinedReason.ZERO_DENOMINATOR


class UndefinedHandling(str, Enum):
    SKIP = "skip"            # average defined entries only
    ZERO_FILL = "zero_fill"  # undefined counts as 0, denominator is every case


@dataclass(frozen=True)
class AggregationPolicy:
    """How undefined entries enter a macro-average, per metric family.

    The default reproduces the published conventions: accuracy metrics (P, R, F)
    skip undefined cases, error rates zero-fill them over all cases.
    """

    accuracy: UndefinedHandling = UndefinedHandling.SKIP
    error_rates: UndefinedHandling = UndefinedHandling.ZERO_FILL


DEFAULT_POLICY = AggregationPolicy()


@dataclass(frozen=True)
class CaseMetrics:
    tally: ConfusionTally
    precision: MetricValue
    recall: MetricValue
    f_measure: MetricValue
    fp_error: MetricValue
    fn_error: MetricValue


@dataclass(frozen=True)
class AggregateMetrics:
    mean_precision: MetricValue
    mean_recall: MetricValue
    mean_f: MetricValue
    mean_fp_error: MetricValue
    mean_fn_error: MetricValue
    n_cases: int
    n_undefined_f: int
    policy: AggregationPolicy = field(default=DEFAULT_POLICY)


@dataclass(frozen=True)
class DecisionErrorRates:
    examiner_id: str
    n_cases: int
    decision_fp: int
    decision_fp_rate: Fraction
    decision_fn: int
    decision_fn_rate: Fraction


@dataclass(frozen=True)
class MetricDelta:
    name: str
    a: MetricValue
    b: MetricValue

    @property
    def comparable(self) -> bool:
        return self.a.is_defined and self.b.is_defined

    @property
    def delta(self) -> Optional[Fraction]:
        return self.a.value - self.b.value if self.comparable else None


AGGREGATE_FIELDS = ("mean_precision", "mean_recall", "mean_f", "mean_fp_error", "mean_fn_error")


def _ratio(numerator: int, denominator: int, reason: UndefinedReason) -> MetricValue:
    if denominator == 0:
        return MetricValue.undefined(reason)
    return MetricValue.defined(Fraction(numerator, denominator))


def _dominant_reason(values: Sequence[MetricValue]) -> UndefinedReason:
    reasons = {v.reason for v in values if not v.is_defined}
    return GOLD_EMPTY if GOLD_EMPTY in reasons or not reasons else ZERO_DENOMINATOR


def precision(tally: ConfusionTally) -> MetricValue:
    return _ratio(tally.tp, tally.retrieved, ZERO_DENOMINATOR)


def recall(tally: ConfusionTally) -> MetricValue:
    return _ratio(tally.tp, tally.relevant, GOLD_EMPTY)


def f_measure(p: MetricValue, r: MetricValue) -> MetricValue:
    """Harmonic mean of precision and recall.

    Undefined inputs propagate (gold_empty wins); P = R = 0 is defined as 0.
    """
    if not (p.is_defined and r.is_defined):
        return MetricValue.undefined(_dominant_reason([p, r]))
    total = p.value + r.value
    if total == 0:
        return MetricValue.defined(0)
    return MetricValue.defined(2 * p.value * r.value / total)


def score_case(gold_relevant: int, candidate: ConfusionTally) -> CaseMetrics:
    if candidate.relevant != gold_relevant:
        raise PairingError(
            f"candidate tally expects {candidate.relevant} relevant items, "
            f"gold holds {gold_relevant}; wrong gold record paired?"
        )
    p = precision(candidate)
    r = recall(candidate)
    return CaseMetrics(
        tally=candidate,
        precision=p,
        recall=r,
        f_measure=f_measure(p, r),
        fp_error=_ratio(candidate.fp, candidate.retrieved, ZERO_DENOMINATOR),
        fn_error=_ratio(candidate.fn, candidate.relevant, GOLD_EMPTY),
    )


def _mean(values: Sequence[MetricValue], handling: UndefinedHandling) -> MetricValue:
    defined = [v.value for v in values if v.is_defined]
    if handling is UndefinedHandling.ZERO_FILL:
        return MetricValue.defined(sum(defined, Fraction(0)) / len(values))
    if not defined:
        return MetricValue.undefined(_dominant_reason(values))
    return MetricValue.defined(sum(defined, Fraction(0)) / len(defined))


def macro_average(cases: Sequence[CaseMetrics],
                  policy: AggregationPolicy = DEFAULT_POLICY) -> AggregateMetrics:
    if not cases:
        raise EmptyInputError("macro_average needs at least one case")
    return AggregateMetrics(
        mean_precision=_mean([c.precision for c in cases], policy.accuracy),
        mean_recall=_mean([c.recall for c in cases], policy.accuracy),
        mean_f=_mean([c.f_measure for c in cases], policy.accuracy),
        mean_fp_error=_mean([c.fp_error for c in cases], policy.error_rates),
        mean_fn_error=_mean([c.fn_error for c in cases], policy.error_rates),
        n_cases=len(cases),
        n_undefined_f=sum(1 for c in cases if not c.f_measure.is_defined),
        policy=policy,
    )


def gold_decision(gold_relevant: int) -> Decision:
    """Ground-truth further-analysis decision: yes iff the gold record found anything."""
    return Decision.FURTHER_ANALYSIS_YES if gold_relevant > 0 else Decision.FURTHER_ANALYSIS_NO


def decision_confusion(pairs: Sequence[tuple[Decision, Decision]],
                       examiner_id: str = "") -> DecisionErrorRates:
    if not pairs:
        raise EmptyInputError("decision_confusion needs at least one decision pair")
    if any(g is None or c is None for g, c in pairs):
        raise PairingError(f"missing further-analysis decision for {examiner_id or 'examiner'}")
    yes, no = Decision.FURTHER_ANALYSIS_YES, Decision.FURTHER_ANALYSIS_NO
    fp = sum(1 for g, c in pairs if c is yes and g is no)
    fn = sum(1 for g, c in pairs if c is no and g is yes)
    n = len(pairs)
    return DecisionErrorRates(
        examiner_id=examiner_id,
        n_cases=n,
        decision_fp=fp,
        decision_fp_rate=Fraction(fp, n),
        decision_fn=fn,
        decision_fn_rate=Fraction(fn, n),
    )


def compare_processes(a: AggregateMetrics, b: AggregateMetrics) -> tuple[MetricDelta, ...]:
    """Signed a − b per aggregate field; undefined on either side is incomparable."""
    return tuple(MetricDelta(name, getattr(a, name), getattr(b, name)) for name in AGGREGATE_FIELDS)
