"""Access to the fixtures shipped under ``src/fixtures``."""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional

from src.errors import FixtureError, HarnessError
from src.ingestion import CaseStore, load_bundle, load_campaign_bundle

logger = logging.getLogger(__name__)

FIXTURE_DIR = Path(__file__).resolve().parent / "fixtures"
FIXTURE_NAMES = ("case1", "case2", "table1")
CAMPAIGNS_FILE = "campaigns.jsonl"
PUBLISHED_FILE = "published_values.json"
ERRATA_FILE = "errata.json"


@dataclass(frozen=True)
class ErrataEntry:
    location: str
    paper_value: str
    derived_value: str
    explanation: str


def _resolve(fixture_dir: Optional[Path], name: str) -> Path:
    path = Path(fixture_dir or FIXTURE_DIR) / name
    if not path.is_file():
        raise FixtureError(f"fixture file missing: {path}")
    return path


def fixture_names(choice: str) -> tuple[str, ...]:
    if choice == "all":
        return FIXTURE_NAMES
    if choice not in FIXTURE_NAMES:
        raise FixtureError(f"unknown fixture {choice!r}; choose from {', '.join(FIXTURE_NAMES)}")
    return (choice,)


def load_fixture_records(name: str, fixture_dir: Optional[Path] = None):
    path = _resolve(fixture_dir, f"{name}.jsonl")
    try:
        return load_bundle(path)
    except HarnessError as exc:
        raise FixtureError(f"corrupt fixture {path.name}: {exc}") from exc


def load_campaigns(fixture_dir: Optional[Path] = None):
    path = _resolve(fixture_dir, CAMPAIGNS_FILE)
    try:
        return load_campaign_bundle(path)
    except HarnessError as exc:
        raise FixtureError(f"corrupt fixture {path.name}: {exc}") from exc


def fixture_store(names: Iterable[str] = FIXTURE_NAMES,
                  fixture_dir: Optional[Path] = None) -> CaseStore:
    """In-memory store seeded with the named bundles and every bundled campaign."""
    records = []
    for name in names:
        records.extend(load_fixture_records(name, fixture_dir))
    store = CaseStore.from_records(records, load_campaigns(fixture_dir))
    logger.debug("fixture store: %d records from %s", len(store.records), ", ".join(names))
    return store


def _load_json(fixture_dir: Optional[Path], name: str):
    path = _resolve(fixture_dir, name)
    try:
        return json.loads(path.read_bytes().decode("utf-8"))
    except UnicodeDecodeError as exc:
        raise FixtureError(f"corrupt fixture {name}: invalid UTF-8 at byte {exc.start}") from exc
    except json.JSONDecodeError as exc:
        raise FixtureError(f"corrupt fixture {name}: line {exc.lineno}, column {exc.colno}: "
                           f"{exc.msg}") from exc


def load_published(fixture_dir: Optional[Path] = None) -> dict:
    published = _load_json(fixture_dir, PUBLISHED_FILE)
    if not isinstance(published, dict):
        raise FixtureError(f"{PUBLISHED_FILE} must map table names to rows")
    return published


def load_errata(fixture_dir: Optional[Path] = None) -> dict[str, ErrataEntry]:
    raw = _load_json(fixture_dir, ERRATA_FILE)
    errata: dict[str, ErrataEntry] = {}
    try:
        for item in raw:
            entry = ErrataEntry(item["location"], item["paper_value"], item["derived_value"],
                                item["explanation"])
            if entry.location in errata:
                raise FixtureError(f"{ERRATA_FILE}: {entry.location} listed twice")
            if entry.paper_value == entry.derived_value:
                raise FixtureError(f"{ERRATA_FILE}: {entry.location} is not a divergence")
            errata[entry.location] = entry
    except (KeyError, TypeError) as exc:
        raise FixtureError(f"{ERRATA_FILE}: malformed entry ({exc})") from exc
    return errata
