"""Manifest parsing, the append-only case store, and gold/candidate pairing.

A manifest is one UTF-8 JSON object per record (schema "fah/1"). The store keeps
one file per record under ``records/`` plus ``ledger.jsonl``, one record per
line, appended and fsynced. Campaigns live under ``campaigns/`` (schema
"fah-campaign/1").
"""
from __future__ import annotations

import json
import logging
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional
from urllib.parse import quote

from src.core_model import (
    Artifact, Category, DeclaredTally, Decision, ExaminationRecord, Mode, Role, validate_record,
)
from src.errors import CampaignError, ManifestError, NotReadyError, StoreConflictError
from src.matching import ScoredComparison, score_pair
from src.workflow import CampaignStep, MeasurementCampaign, SamplingMode, SamplingPlan

logger = logging.getLogger(__name__)

SCHEMA = "fah/1"
CAMPAIGN_SCHEMA = "fah-campaign/1"
LEDGER_NAME = "ledger.jsonl"

RECORD_FIELDS = {
    "schema", "case_id", "exhibit_id", "examiner_id", "process_id", "role", "decision",
    "timestamp", "mode", "artifacts", "declared_tally", "notes", "granularity",
}
REQUIRED_STRINGS = ("case_id", "exhibit_id", "examiner_id", "process_id", "timestamp")


@dataclass(frozen=True)
class PairedRecords:
    gold: ExaminationRecord
    candidates: tuple[ExaminationRecord, ...]


# ---------------------------------------------------------------- manifests

def _string(doc, name, problems, path="", required=True, default=None):
    value = doc.get(name)
    if value is None:
        if required:
            problems.append((f"{path}{name}", "field is missing"))
        return default
    if not isinstance(value, str):
        problems.append((f"{path}{name}", "must be a string"))
        return default
    return value


def _enum(doc, name, enum_cls, problems, path="", required=True):
    value = doc.get(name)
    if value is None:
        if required:
            problems.append((f"{path}{name}", "field is missing"))
        return None
    try:
        return enum_cls(value)
    except ValueError:
        allowed = ", ".join(e.value for e in enum_cls)
        problems.append((f"{path}{name}", f"unknown value {value!r} (expected one of {allowed})"))
        return None


def _count(doc, name, problems, path, required=True):
    value = doc.get(name)
    if value is None:
        if required:
            problems.append((f"{path}{name}", "field is missing"))
        return None
    if not isinstance(value, int) or isinstance(value, bool):
        problems.append((f"{path}{name}", "must be an integer"))
        return None
    return value


def _artifacts(raw, problems):
    if not isinstance(raw, list):
        problems.append(("artifacts", "must be a list"))
        return None
    artifacts = []
    for i, item in enumerate(raw):
        path = f"artifacts[{i}]."
        if not isinstance(item, dict):
            problems.append((f"artifacts[{i}]", "must be an object"))
            continue
        artifact_id = _string(item, "id", problems, path)
        category = _enum(item, "category", Category, problems, path)
        source = _string(item, "source", problems, path, required=False, default="")
        note = _string(item, "note", problems, path, required=False)
        if artifact_id is not None and category is not None:
            artifacts.append(Artifact(artifact_id, category, source, note))
    return tuple(artifacts)


def _declared_tally(raw, problems):
    if not isinstance(raw, dict):
        problems.append(("declared_tally", "must be an object"))
        return None
    path = "declared_tally."
    retrieved = _count(raw, "retrieved", problems, path)
    false_positives = _count(raw, "false_positives", problems, path)
    relevant = _count(raw, "relevant_retrieved", problems, path, required=False)
    if retrieved is None or false_positives is None:
        return None
    return DeclaredTally(retrieved, false_positives, relevant)


def _decode(data, source: Optional[str]) -> str:
    if not isinstance(data, (bytes, bytearray)):
        return data
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise ManifestError([(f"byte {exc.start}", "invalid UTF-8")], source) from exc


def _lines(path: Path):
    """Non-blank lines of a JSON-lines file as (line number, raw bytes)."""
    for lineno, line in enumerate(path.read_bytes().splitlines(), start=1):
        if line.strip():
            yield lineno, line


def parse_manifest(data, source: Optional[str] = None) -> ExaminationRecord:
    """Parse and validate one manifest document (bytes or text)."""
    text = _decode(data, source)
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ManifestError([(f"line {exc.lineno}, column {exc.colno}", exc.msg)], source) from exc
    if not isinstance(doc, dict):
        raise ManifestError([("document", "manifest must be a JSON object")], source)

    problems: list[tuple[str, str]] = []
    if doc.get("schema") != SCHEMA:
        problems.append(("schema", f"expected {SCHEMA!r}, got {doc.get('schema')!r}"))
    for name in sorted(set(doc) - RECORD_FIELDS):
        problems.append((name, "unknown field"))

    strings = {name: _string(doc, name, problems) for name in REQUIRED_STRINGS}
    role = _enum(doc, "role", Role, problems)
    mode = _enum(doc, "mode", Mode, problems)
    decision = _enum(doc, "decision", Decision, problems, required=False)
    notes = _string(doc, "notes", problems, required=False, default="")
    granularity = _string(doc, "granularity", problems, required=False)
    artifacts = _artifacts(doc["artifacts"], problems) if doc.get("artifacts") is not None else None
    tally = (_declared_tally(doc["declared_tally"], problems)
             if doc.get("declared_tally") is not None else None)
    if problems:
        raise ManifestError(problems, source)

    record = ExaminationRecord(
        role=role, mode=mode, decision=decision, artifacts=artifacts, declared_tally=tally,
        notes=notes, granularity=granularity, **strings,
    )
    violations = validate_record(record)
    if violations:
        raise ManifestError([(v.field, v.message) for v in violations], source)
    return record


def _record_doc(record: ExaminationRecord) -> dict:
    doc = {
        "schema": SCHEMA,
        "case_id": record.case_id,
        "exhibit_id": record.exhibit_id,
        "examiner_id": record.examiner_id,
        "process_id": record.process_id,
        "role": record.role.value,
        "timestamp": record.timestamp,
        "mode": record.mode.value,
        "notes": record.notes,
    }
    if record.decision is not None:
        doc["decision"] = record.decision.value
    if record.granularity is not None:
        doc["granularity"] = record.granularity
    if record.artifacts is not None:
        doc["artifacts"] = [_artifact_doc(a) for a in record.artifacts]
    if record.declared_tally is not None:
        t = record.declared_tally
        doc["declared_tally"] = {"retrieved": t.retrieved, "false_positives": t.false_positives}
        if t.relevant_retrieved is not None:
            doc["declared_tally"]["relevant_retrieved"] = t.relevant_retrieved
    return doc


def _artifact_doc(artifact: Artifact) -> dict:
    doc = {"id": artifact.id, "category": artifact.category.value, "source": artifact.source}
    if artifact.note is not None:
        doc["note"] = artifact.note
    return doc


def serialize_manifest(record: ExaminationRecord, compact: bool = False) -> str:
    if compact:
        return json.dumps(_record_doc(record), sort_keys=True, ensure_ascii=False,
                          separators=(",", ":"))
    return json.dumps(_record_doc(record), sort_keys=True, ensure_ascii=False, indent=2) + "\n"


def load_bundle(path) -> list[ExaminationRecord]:
    """Read a JSON-lines bundle where every line is a full manifest."""
    path = Path(path)
    return [parse_manifest(line, source=f"{path.name}:{lineno}") for lineno, line in _lines(path)]


# ---------------------------------------------------------------- campaigns

def campaign_doc(c: MeasurementCampaign) -> dict:
    return {
        "schema": CAMPAIGN_SCHEMA,
        "campaign_id": c.campaign_id,
        "measured_process": c.measured_process,
        "gold_process": c.gold_process,
        "needs_review": c.needs_review,
        "sampling": {"mode": c.sampling.mode.value, "interval": c.sampling.interval,
                     "phase": c.sampling.phase},
        "steps": [{"number": s.number, "title": s.title, "done": s.done, "evidence": s.evidence}
                  for s in c.steps],
    }


def parse_campaign(data, source: Optional[str] = None) -> MeasurementCampaign:
    data = _decode(data, source)
    try:
        doc = json.loads(data) if isinstance(data, str) else data
        if doc.get("schema") != CAMPAIGN_SCHEMA:
            raise ManifestError([("schema", f"expected {CAMPAIGN_SCHEMA!r}")], source)
        sampling = doc.get("sampling") or {}
        steps = tuple(CampaignStep(int(s["number"]), s["title"], bool(s["done"]), s.get("evidence"))
                      for s in doc["steps"])
        campaign = MeasurementCampaign(
            campaign_id=doc["campaign_id"],
            measured_process=doc["measured_process"],
            gold_process=doc["gold_process"],
            steps=steps,
            sampling=SamplingPlan(SamplingMode(sampling.get("mode", "full")),
                                  int(sampling.get("interval", 1)), int(sampling.get("phase", 0))),
            needs_review=bool(doc.get("needs_review", False)),
        )
    except json.JSONDecodeError as exc:
        raise ManifestError([(f"line {exc.lineno}, column {exc.colno}", exc.msg)], source) from exc
    except (AttributeError, KeyError, TypeError, ValueError) as exc:
        raise ManifestError([("campaign", f"malformed campaign: {exc}")], source) from exc
    done = [s.done for s in campaign.steps]
    if done != sorted(done, reverse=True):
        raise ManifestError([("steps", "steps must complete in order")], source)
    return campaign


def load_campaign_bundle(path) -> list[MeasurementCampaign]:
    path = Path(path)
    return [parse_campaign(line, source=f"{path.name}:{n}") for n, line in _lines(path)]


# ---------------------------------------------------------------- store

def _safe(name: str) -> str:
    # one-to-one even across the "__" joins; escaped dots rule out "." and ".."
    return quote(name, safe="").replace(".", "%2E").replace("_", "%5F")


def _write_durable(path: Path, text: str, mode: str = "w") -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open(mode, encoding="utf-8", newline="\n") as handle:
        handle.write(text)
        handle.flush()
        os.fsync(handle.fileno())


class CaseStore:
    """Append-only record store; `root=None` keeps everything in memory.

    Single writer, many readers.
    """

    def __init__(self, root=None):
        self.root = Path(root) if root is not None else None
        self._ledger: list[ExaminationRecord] = []
        self._index: dict[tuple, ExaminationRecord] = {}
        self._gold: dict[tuple[str, str], ExaminationRecord] = {}
        self._campaigns: dict[str, MeasurementCampaign] = {}

    @classmethod
    def open(cls, root) -> "CaseStore":
        store = cls(root)
        ledger = store.root / LEDGER_NAME
        if ledger.exists():
            for lineno, line in _lines(ledger):
                store._admit(parse_manifest(line, source=f"{LEDGER_NAME}:{lineno}"))
        logger.debug("opened store %s with %d records", store.root, len(store._ledger))
        return store

    @classmethod
    def from_records(cls, records: Iterable[ExaminationRecord],
                     campaigns: Iterable[MeasurementCampaign] = ()) -> "CaseStore":
        store = cls()
        for record in records:
            store.append(record)
        for campaign in campaigns:
            store.save_campaign(campaign)
        return store

    @property
    def records(self) -> tuple[ExaminationRecord, ...]:
        return tuple(self._ledger)

    def _check(self, record: ExaminationRecord) -> bool:
        existing = self._index.get(record.key)
        if existing is not None:
            if existing == record:
                return False
            raise StoreConflictError(f"a different record already exists for {record.key}")
        gold = self._gold.get((record.case_id, record.exhibit_id))
        if record.role is Role.GOLD and gold is not None:
            raise StoreConflictError(
                f"case {record.case_id} exhibit {record.exhibit_id} already has a gold record "
                f"from {gold.examiner_id}/{gold.process_id}"
            )
        return True

    def _admit(self, record: ExaminationRecord) -> bool:
        if not self._check(record):
            return False
        self._ledger.append(record)
        self._index[record.key] = record
        if record.role is Role.GOLD:
            self._gold[(record.case_id, record.exhibit_id)] = record
        return True

    def append(self, record: ExaminationRecord) -> bool:
        """Append a validated record; returns False when an identical record is already in."""
        violations = validate_record(record)
        if violations:
            raise ManifestError([(v.field, v.message) for v in violations])
        if not self._check(record):
            logger.debug("record %s already stored", record.key)
            return False
        if self.root is not None:
            case, exhibit, examiner, process, role = (_safe(part) for part in record.key)
            target = self.root / "records" / case / exhibit / f"{role}__{examiner}__{process}.json"
            _write_durable(target, serialize_manifest(record))
            _write_durable(self.root / LEDGER_NAME, serialize_manifest(record, compact=True) + "\n",
                           mode="a")
        self._admit(record)
        return True

    def cases(self) -> list[tuple[str, str]]:
        return sorted({(r.case_id, r.exhibit_id) for r in self._ledger})

    def gold_for(self, case_id: str, exhibit_id: str) -> Optional[ExaminationRecord]:
        return self._gold.get((case_id, exhibit_id))

    def save_campaign(self, campaign: MeasurementCampaign) -> None:
        if self.root is not None:
            target = self.root / "campaigns" / f"{_safe(campaign.campaign_id)}.json"
            text = json.dumps(campaign_doc(campaign), indent=2, sort_keys=True)
            _write_durable(target, text + "\n")
        self._campaigns[campaign.campaign_id] = campaign

    def load_campaign(self, campaign_id: str) -> MeasurementCampaign:
        if campaign_id in self._campaigns:
            return self._campaigns[campaign_id]
        if self.root is not None:
            target = self.root / "campaigns" / f"{_safe(campaign_id)}.json"
            if target.exists():
                campaign = parse_campaign(target.read_bytes(), source=target.name)
                self._campaigns[campaign_id] = campaign
                return campaign
        raise CampaignError(f"unknown campaign {campaign_id!r}")


def store_append(store: CaseStore, record: ExaminationRecord) -> CaseStore:
    store.append(record)
    return store


def pair_records(store: CaseStore, case_id: str, exhibit_id: str) -> PairedRecords:
    gold = store.gold_for(case_id, exhibit_id)
    if gold is None:
        raise NotReadyError(case_id, exhibit_id)
    candidates = sorted(
        (r for r in store.records
         if r.role is Role.CANDIDATE and r.case_id == case_id and r.exhibit_id == exhibit_id),
        key=lambda r: (r.instant, r.examiner_id, r.process_id),
    )
    return PairedRecords(gold, tuple(candidates))


def scored_comparisons(store: CaseStore, case_id: Optional[str] = None,
                       exhibit_id: Optional[str] = None, process_id: Optional[str] = None,
                       gold_process: Optional[str] = None):
    """Score every candidate in the (filtered) store against its gold record.

    Returns ``(scored, not_ready)`` where `not_ready` lists (case, exhibit) pairs
    that have candidates but no gold record yet.
    """
    scored: list[ScoredComparison] = []
    not_ready: list[tuple[str, str]] = []
    for case, exhibit in store.cases():
        if case_id is not None and case != case_id:
            continue
        if exhibit_id is not None and exhibit != exhibit_id:
            continue
        try:
            paired = pair_records(store, case, exhibit)
        except NotReadyError:
            not_ready.append((case, exhibit))
            continue
        if gold_process is not None and paired.gold.process_id != gold_process:
            continue
        for candidate in paired.candidates:
            if process_id is None or candidate.process_id == process_id:
                scored.append(score_pair(paired.gold, candidate))
    return scored, not_ready


def campaign_comparisons(store: CaseStore, campaign: MeasurementCampaign):
    """Scored comparisons of the campaign's measured process against its gold process."""
    return scored_comparisons(store, process_id=campaign.measured_process,
                              gold_process=campaign.gold_process)
