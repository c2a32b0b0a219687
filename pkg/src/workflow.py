"""Measurement campaigns, sample scheduling, the decision gate and trend alerts."""
from __future__ import annotations

import logging
import random
from dataclasses import dataclass, replace
from enum import Enum
from fractions import Fraction
from typing import Optional, Sequence

from src.core_model import parse_timestamp
from src.errors import CampaignError, EmptyInputError
from src.metrics import (
    DEFAULT_POLICY, AggregateMetrics, AggregationPolicy, CaseMetrics, DecisionErrorRates,
    decision_confusion, gold_decision, macro_average,
)
from src.rendering import fmt_value

logger = logging.getLogger(__name__)

STEP_TITLES = (
    "Identify what is being measured",
    "Identify the gold standard",
    "Identify how the measured process fits the investigation workflow",
    "Conduct the measured process",
    "Conduct the gold standard process",
    "Measure the measured output against the gold standard output",
)
SCORING_STEP = 5

GROUP_KEYS = ("examiner_id", "process_id", "case_id", "exhibit_id", "all")


class SamplingMode(str, Enum):
    FULL = "full"
    INTERVAL = "interval"


@dataclass(frozen=True)
class SamplingPlan:
    mode: SamplingMode = SamplingMode.FULL
    interval: int = 1
    phase: int = 0

    def __post_init__(self):
        if self.interval < 1:
            raise ValueError(f"sampling interval must be >= 1, got {self.interval}")
        if not 0 <= self.phase < self.interval:
            raise ValueError(f"sampling phase must be in [0, {self.interval}), got {self.phase}")

    @classmethod
    def full(cls) -> "SamplingPlan":
        return cls()

    @classmethod
    def every(cls, interval: int, phase: int = 0) -> "SamplingPlan":
        return cls(mode=SamplingMode.INTERVAL, interval=interval, phase=phase)


@dataclass(frozen=True)
class CampaignStep:
    number: int
    title: str
    done: bool = False
    evidence: Optional[str] = None


@dataclass(frozen=True)
class MeasurementCampaign:
    campaign_id: str
    measured_process: str
    gold_process: str
    steps: tuple[CampaignStep, ...]
    sampling: SamplingPlan = SamplingPlan()
    needs_review: bool = False

    @property
    def next_step(self) -> Optional[int]:
        return next((s.number for s in self.steps if not s.done), None)

    @property
    def complete(self) -> bool:
        return self.next_step is None

    @property
    def scoring_permitted(self) -> bool:
        return all(s.done for s in self.steps[:SCORING_STEP])


@dataclass(frozen=True)
class GateResult:
    passed: bool
    reason: Optional[str] = None


class AlertKind(str, Enum):
    F_DROP = "f_drop"
    RECALL_FLOOR = "recall_floor"


@dataclass(frozen=True)
class TrendAlert:
    index: int
    kind: AlertKind
    detail: str


@dataclass(frozen=True)
class TrendSeries:
    points: tuple[tuple[str, CaseMetrics], ...]
    window: int
    alerts: tuple[TrendAlert, ...]


def new_campaign(campaign_id: str, measured_process: str, gold_process: str,
                 sampling: Optional[SamplingPlan] = None) -> MeasurementCampaign:
    if not campaign_id:
        raise CampaignError("campaign id must be non-empty")
    steps = tuple(CampaignStep(i, title) for i, title in enumerate(STEP_TITLES, start=1))
    return MeasurementCampaign(campaign_id, measured_process, gold_process, steps,
                               sampling or SamplingPlan.full())


def advance_campaign(c: MeasurementCampaign, step: int, evidence: str) -> MeasurementCampaign:
    if c.next_step is None:
        raise CampaignError(f"campaign {c.campaign_id} is already complete")
    if step != c.next_step:
        raise CampaignError(
            f"campaign {c.campaign_id}: step {step} cannot be done before step {c.next_step}"
        )
    steps = tuple(replace(s, done=True, evidence=evidence) if s.number == step else s
                  for s in c.steps)
    logger.info("campaign %s: step %d done", c.campaign_id, step)
    return replace(c, steps=steps)


def require_scoring_permitted(c: MeasurementCampaign) -> None:
    if not c.scoring_permitted:
        raise CampaignError(
            f"campaign {c.campaign_id}: scoring needs steps 1-{SCORING_STEP} done "
            f"(next pending step is {c.next_step})"
        )


def is_measured_case(plan: SamplingPlan, case_ordinal: int) -> bool:
    if case_ordinal < 1:
        raise ValueError(f"case ordinals start at 1, got {case_ordinal}")
    if plan.mode is SamplingMode.FULL:
        return True
    return case_ordinal % plan.interval == plan.phase


def next_measured_ordinals(plan: SamplingPlan, count: int, start: int = 1) -> list[int]:
    if plan.mode is SamplingMode.FULL:
        return list(range(start, start + count))
    first = start + (plan.phase - start) % plan.interval
    return [first + k * plan.interval for k in range(count)]


def random_phase_plan(interval: int, seed) -> SamplingPlan:
    """Interval plan whose phase is drawn uniformly; the same seed gives the same phase."""
    phase = random.Random(str(seed)).randrange(interval)
    return SamplingPlan.every(interval, phase)


def decision_gate_check(rates: DecisionErrorRates) -> GateResult:
    """Decision false negatives fail the gate; false positives never do."""
    if rates.decision_fn > 0:
        return GateResult(False, f"{rates.examiner_id or 'examiner'} sent "
                                 f"{rates.decision_fn} exhibit(s) with relevant content "
                                 f"away from further analysis")
    return GateResult(True)


def _mean(values: Sequence[Fraction]) -> Fraction:
    return sum(values, Fraction(0)) / len(values)


def trend_series(metrics: Sequence[tuple[str, CaseMetrics]], window: int = 4,
                 drop_threshold=Fraction(1, 4), recall_floor=Fraction(1, 2)) -> TrendSeries:
    if not metrics:
        raise EmptyInputError("trend_series needs at least one point")
    if window < 1:
        raise ValueError(f"window must be >= 1, got {window}")
    drop = Fraction(str(drop_threshold))
    floor = Fraction(str(recall_floor))
    points = tuple(sorted(metrics, key=lambda p: parse_timestamp(p[0])))

    alerts = []
    for i, (_, m) in enumerate(points):
        prior = [p.f_measure.value for _, p in points[max(0, i - window):i]
                 if p.f_measure.is_defined]
        if m.f_measure.is_defined and prior:
            limit = _mean(prior) * (1 - drop)
            if m.f_measure.value < limit:
                detail = (f"F {fmt_value(m.f_measure)} below {fmt_value(limit)} "
                          f"(trailing mean {fmt_value(_mean(prior))})")
                alerts.append(TrendAlert(i, AlertKind.F_DROP, detail))
        if i + 1 >= window:
            recalls = [p.recall.value for _, p in points[i + 1 - window:i + 1]
                       if p.recall.is_defined]
            if recalls and _mean(recalls) < floor:
                detail = (f"mean recall {fmt_value(_mean(recalls))} over last {window} "
                          f"below {fmt_value(floor)}")
                alerts.append(TrendAlert(i, AlertKind.RECALL_FLOOR, detail))
    return TrendSeries(points=points, window=window, alerts=tuple(alerts))


def _sort_key(scored):
    return (scored.instant, scored.examiner_id, scored.case_id, scored.exhibit_id)


def group_points(scored: Sequence, group_by: str) -> dict[str, list[tuple[str, CaseMetrics]]]:
    if group_by not in GROUP_KEYS:
        raise ValueError(f"unknown group-by key {group_by!r}; choose from {', '.join(GROUP_KEYS)}")
    groups: dict[str, list] = {}
    for s in sorted(scored, key=_sort_key):
        name = "all" if group_by == "all" else getattr(s, group_by)
        groups.setdefault(name, []).append((s.timestamp, s.metrics))
    return dict(sorted(groups.items()))


def examiner_summaries(scored: Sequence,
                       policy: AggregationPolicy = DEFAULT_POLICY) -> dict[str, AggregateMetrics]:
    by_examiner: dict[str, list[CaseMetrics]] = {}
    for s in sorted(scored, key=_sort_key):
        by_examiner.setdefault(s.examiner_id, []).append(s.metrics)
    return {name: macro_average(cases, policy) for name, cases in sorted(by_examiner.items())}


def examiner_decisions(scored: Sequence) -> dict[str, DecisionErrorRates]:
    """Decision error rates per examiner, over comparisons that carry a decision."""
    pairs: dict[str, list] = {}
    for s in sorted(scored, key=_sort_key):
        if s.decision is not None:
            pairs.setdefault(s.examiner_id, []).append((gold_decision(s.gold_relevant), s.decision))
    return {name: decision_confusion(p, name) for name, p in sorted(pairs.items())}


def mark_needs_review(c: MeasurementCampaign) -> MeasurementCampaign:
    return replace(c, needs_review=True)
