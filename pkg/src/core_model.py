"""Domain vocabulary: artifacts, examination records, tallies and metric values.

Every type is a frozen value. Records may be built in an invalid state so that
`validate_record` can report what is wrong with them; `ConfusionTally` and
`MetricValue` refuse invalid construction outright.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from datetime import datetime
from enum import Enum
from fractions import Fraction
from typing import Optional

from src.errors import TallyError


class Category(str, Enum):
    INCULPATORY = "inculpatory"
    EXCULPATORY = "exculpatory"


class Role(str, Enum):
    GOLD = "gold"
    CANDIDATE = "candidate"


class Decision(str, Enum):
    FURTHER_ANALYSIS_YES = "further_analysis_yes"
    FURTHER_ANALYSIS_NO = "further_analysis_no"


class Mode(str, Enum):
    ITEMIZED = "itemized"
    TALLY = "tally"


class UndefinedReason(str, Enum):
    ZERO_DENOMINATOR = "zero_denominator"
    GOLD_EMPTY = "gold_empty"


@dataclass(frozen=True)
class Artifact:
    id: str
    category: Category
    source: str = ""
    note: Optional[str] = None


@dataclass(frozen=True)
class DeclaredTally:
    retrieved: int
    false_positives: int
    relevant_retrieved: Optional[int] = None


@dataclass(frozen=True)
class ExaminationRecord:
    case_id: str
    exhibit_id: str
    examiner_id: str
    process_id: str
    role: Role
    timestamp: str
    mode: Mode
    decision: Optional[Decision] = None
    artifacts: Optional[tuple[Artifact, ...]] = None
    declared_tally: Optional[DeclaredTally] = None
    notes: str = ""
    # free text: what one "piece of information" means for this record
    granularity: Optional[str] = None

    @property
    def key(self) -> tuple[str, str, str, str, str]:
        return (self.case_id, self.exhibit_id, self.examiner_id, self.process_id, self.role.value)

    @property
    def instant(self) -> datetime:
        return parse_timestamp(self.timestamp)


@dataclass(frozen=True)
class ConfusionTally:
    tp: int
    fp: int
    fn: int
    retrieved: int
    relevant: int

    def __post_init__(self):
        counts = (self.tp, self.fp, self.fn, self.retrieved, self.relevant)
        if any(not isinstance(c, int) or isinstance(c, bool) or c < 0 for c in counts):
            raise TallyError(f"counts must be non-negative integers: {counts}")
        if self.tp + self.fp != self.retrieved:
            raise TallyError(f"tp + fp = {self.tp + self.fp} but retrieved = {self.retrieved}")
        if self.tp + self.fn != self.relevant:
            raise TallyError(f"tp + fn = {self.tp + self.fn} but relevant = {self.relevant}")

    @classmethod
    def from_counts(cls, tp: int, fp: int, fn: int) -> "ConfusionTally":
        return cls(tp=tp, fp=fp, fn=fn, retrieved=tp + fp, relevant=tp + fn)


@dataclass(frozen=True)
class MetricValue:
    """A ratio in [0, 1] or an explicit undefined state with its reason."""

    value: Optional[Fraction] = None
    reason: Optional[UndefinedReason] = None

    def __post_init__(self):
        if (self.value is None) == (self.reason is None):
            raise ValueError("MetricValue needs exactly one of value or reason")
        if self.value is not None and not 0 <= self.value <= 1:
            raise ValueError(f"metric value {self.value} outside [0, 1]")

    @classmethod
    def defined(cls, value) -> "MetricValue":
        return cls(value=Fraction(value))

    @classmethod
    def undefined(cls, reason: UndefinedReason) -> "MetricValue":
        return cls(reason=UndefinedReason(reason))

    @property
    def is_defined(self) -> bool:
        return self.value is not None

    def as_float(self) -> Optional[float]:
        return None if self.value is None else float(self.value)


@dataclass(frozen=True)
class Violation:
    code: str
    field: str
    message: str


def parse_timestamp(text: str) -> datetime:
    """Parse an ISO-8601 instant; raises ValueError unless it carries an offset."""
    if not isinstance(text, str) or not text:
        raise ValueError("timestamp must be a non-empty string")
    instant = datetime.fromisoformat(text.replace("Z", "+00:00"))
    if instant.tzinfo is None or instant.utcoffset() is None:
        raise ValueError(f"timestamp {text!r} has no timezone offset")
    return instant


def validate_record(record: ExaminationRecord) -> list[Violation]:
    """Return every invariant violation of `record`; an empty list means well-formed."""
    violations: list[Violation] = []

    for name in ("case_id", "exhibit_id", "examiner_id", "process_id"):
        if not getattr(record, name):
            violations.append(Violation("missing_field", name, f"{name} must be non-empty"))

    try:
        parse_timestamp(record.timestamp)
    except ValueError as exc:
        violations.append(Violation("timestamp", "timestamp", str(exc)))

    if record.mode is Mode.ITEMIZED:
        if record.artifacts is None:
            violations.append(Violation("mode_mismatch", "artifacts",
                                        "itemized record has no artifact list"))
        if record.declared_tally is not None:
            violations.append(Violation("mode_mismatch", "declared_tally",
                                        "itemized record must not carry a declared tally"))
    else:
        if record.declared_tally is None:
            violations.append(Violation("mode_mismatch", "declared_tally",
                                        "tally record has no declared tally"))
        if record.artifacts is not None:
            violations.append(Violation("mode_mismatch", "artifacts",
                                        "tally record must not carry artifacts"))

    if record.artifacts:
        violations.extend(_artifact_violations(record.artifacts))
    if record.declared_tally is not None:
        violations.extend(_tally_violations(record.declared_tally, record.role))
    return violations


def _artifact_violations(artifacts) -> list[Violation]:
    found = []
    ids = Counter(a.id for a in artifacts)
    if ids.get("", 0):
        found.append(Violation("empty_artifact_id", "artifacts", "artifact id must be non-empty"))
    for artifact_id in sorted(i for i, n in ids.items() if n > 1 and i):
        found.append(Violation("duplicate_artifact_id", "artifacts",
                               f"artifact id {artifact_id!r} appears {ids[artifact_id]} times"))
    return found


def _tally_violations(tally: DeclaredTally, role: Role) -> list[Violation]:
    found = []
    counts = {"retrieved": tally.retrieved, "false_positives": tally.false_positives}
    if tally.relevant_retrieved is not None:
        counts["relevant_retrieved"] = tally.relevant_retrieved
    bad = sorted(k for k, v in counts.items() if not isinstance(v, int) or v < 0)
    for name in bad:
        found.append(Violation("negative_count", f"declared_tally.{name}",
                               f"{name} must be a non-negative integer"))
    if bad:
        return found

    if tally.false_positives > tally.retrieved:
        found.append(Violation("tally_arithmetic", "declared_tally.false_positives",
                               f"false_positives {tally.false_positives} exceeds "
                               f"retrieved {tally.retrieved}"))
    elif (tally.relevant_retrieved is not None
          and tally.relevant_retrieved != tally.retrieved - tally.false_positives):
        found.append(Violation("tally_arithmetic", "declared_tally.relevant_retrieved",
                               f"relevant_retrieved {tally.relevant_retrieved} != "
                               f"{tally.retrieved} - {tally.false_positives}"))
    if role is Role.GOLD and tally.false_positives:
        found.append(Violation("tally_arithmetic", "declared_tally.false_positives",
                               "a gold record cannot declare false positives"))
    return found
