"""Rescore the bundled case studies and compare every printed cell.

The run passes only when the set of diverging cells is exactly the curated
errata list: an unexpected divergence, an erratum that no longer diverges and
an erratum whose recorded values went stale all fail it.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional

from src.bundled import ErrataEntry, fixture_store, load_errata, load_published
from src.checks.common import CellCheck, same_value
from src.checks.comparison import check_process_comparison
from src.checks.examiners import check_decisions, check_examiner_averages
from src.checks.media import check_media
from src.checks.triage import check_triage
from src.checks.trend import check_investigator_trend
from src.checks.worked_example import check_worked_example
from src.errors import FixtureError
from src.rendering import render_table

logger = logging.getLogger(__name__)

CHECKS = (
    ("Worked example", check_worked_example),
    ("Investigator trend", check_investigator_trend),
    ("Triage tool", check_triage),
    ("Further-analysis decisions", check_decisions),
    ("Per-media objects", check_media),
    ("Per-examiner averages", check_examiner_averages),
    ("Process comparison", check_process_comparison),
)


@dataclass(frozen=True)
class VerificationReport:
    results: dict[str, list[CellCheck]]
    errata: dict[str, ErrataEntry]
    unexpected: tuple[CellCheck, ...]
    resolved: tuple[ErrataEntry, ...]
    stale: tuple[tuple[ErrataEntry, CellCheck], ...]

    @property
    def cells(self) -> list[CellCheck]:
        return [c for checks in self.results.values() for c in checks]

    @property
    def known(self) -> list[CellCheck]:
        return [c for c in self.cells if not c.matches and c.location in self.errata
                and _records_erratum(self.errata[c.location], c)]

    @property
    def passed(self) -> bool:
        return not (self.unexpected or self.resolved or self.stale)


def _records_erratum(entry: ErrataEntry, check: CellCheck) -> bool:
    return entry.paper_value == check.published and same_value(entry.derived_value, check.derived)


def verify_published(fixture_dir: Optional[Path] = None,
                     status_callback: Optional[Callable[[str], None]] = None,
                     log_callback: Optional[Callable[[str], None]] = None) -> VerificationReport:
    status_callback = status_callback or logger.debug
    log_callback = log_callback or logger.info

    try:
        log_callback("📦 Loading bundled fixtures...")
        store = fixture_store(fixture_dir=fixture_dir)
        published = load_published(fixture_dir)
        errata = load_errata(fixture_dir)
        status_callback("Fixtures loaded. Starting verification...")
    except FixtureError as e:
        log_callback(f"❌ Fixture error: {e}")
        raise

    results: dict[str, list[CellCheck]] = {}
    for done, (title, check) in enumerate(CHECKS, start=1):
        status_callback(f"Verifying ({done}/{len(CHECKS)}): {title}")
        for table, checks in check(store, published, log_callback).items():
            results.setdefault(table, []).extend(checks)

    unexpected, stale = [], []
    diverging = set()
    for c in (c for checks in results.values() for c in checks):
        if c.matches:
            continue
        diverging.add(c.location)
        entry = errata.get(c.location)
        if entry is None:
            unexpected.append(c)
            log_callback(f"❌ Unexpected divergence {c.location}: "
                         f"published {c.published}, derived {c.derived}")
        elif not _records_erratum(entry, c):
            stale.append((entry, c))
            log_callback(f"❌ Stale erratum {c.location}: recorded {entry.paper_value} -> "
                         f"{entry.derived_value}, now {c.published} -> {c.derived}")
        else:
            log_callback(f"⚠️ Known erratum {c.location}: "
                         f"published {c.published}, derived {c.derived}")
    resolved = tuple(e for loc, e in sorted(errata.items()) if loc not in diverging)
    for entry in resolved:
        log_callback(f"❌ Erratum {entry.location} no longer diverges")

    report = VerificationReport(results, errata, tuple(unexpected), resolved, tuple(stale))
    n_match = sum(1 for c in report.cells if c.matches)
    log_callback(f"✅ {n_match} of {len(report.cells)} published cells reproduced")
    return report


def _status(report: VerificationReport, c: CellCheck) -> str:
    if c.matches:
        return "match"
    entry = report.errata.get(c.location)
    if entry is None:
        return "DIVERGENCE"
    return "erratum" if _records_erratum(entry, c) else "STALE ERRATUM"


def render_verification(report: VerificationReport) -> str:
    blocks = []
    for table, checks in report.results.items():
        rows = [[f"{c.row}/{c.column}", c.published, c.derived, _status(report, c)]
                for c in checks]
        blocks.append(f"## {table}\n\n"
                      + render_table(["cell", "published", "derived", "status"], rows))

    lines = []
    known = report.known
    if known:
        lines.append("Known errata:")
        lines.extend(f"  {c.location}: published {c.published}, derived {c.derived}; "
                     f"{report.errata[c.location].explanation}" for c in known)
    if report.unexpected:
        lines.append("Unexpected divergences:")
        lines.extend(f"  {c.location}: published {c.published}, derived {c.derived}"
                     for c in report.unexpected)
    if report.resolved:
        lines.append("Errata that no longer diverge:")
        lines.extend(f"  {e.location}: recorded {e.paper_value} -> {e.derived_value}"
                     for e in report.resolved)
    if report.stale:
        lines.append("Errata with changed values:")
        lines.extend(f"  {e.location}: recorded {e.paper_value} -> {e.derived_value}, "
                     f"now {c.published} -> {c.derived}" for e, c in report.stale)

    n_cells = len(report.cells)
    n_match = sum(1 for c in report.cells if c.matches)
    lines.append(f"{n_cells} cells checked: {n_match} match, {len(known)} known errata, "
                 f"{len(report.unexpected)} unexpected, {len(report.resolved)} resolved, "
                 f"{len(report.stale)} stale")
    lines.append("VERIFIED" if report.passed else "VERIFICATION FAILED")
    return "\n\n".join(blocks) + "\n\n" + "\n".join(lines) + "\n"
