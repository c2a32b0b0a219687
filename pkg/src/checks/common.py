"""Shared pieces for the published-table checks.

A check rescores bundled fixtures and returns ``{table: [CellCheck, ...]}``;
cells are addressed ``table/row/column`` in the same way as
``published_values.json`` and ``errata.json``.
"""
from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal, InvalidOperation
from fractions import Fraction

from src.errors import FixtureError
from src.ingestion import campaign_comparisons
from src.rendering import NA, fmt_value

TRIAGE_CAMPAIGN = "triage-case-1"
PRELIMINARY_CAMPAIGN = "preliminary-case-2"
TREND_CASE = "investigator-trend"


@dataclass(frozen=True)
class CellCheck:
    table: str
    row: str
    column: str
    published: str
    derived: str

    @property
    def location(self) -> str:
        return f"{self.table}/{self.row}/{self.column}"

    @property
    def matches(self) -> bool:
        return same_value(self.published, self.derived)


def same_value(a: str, b: str) -> bool:
    """Numeric cells compare by value (".4" equals "0.40"); anything else as text."""
    if NA in (a, b):
        return a == b
    try:
        return Decimal(a) == Decimal(b)
    except InvalidOperation:
        return a == b


def printed(published: dict, table: str, row: str, column: str) -> str:
    try:
        return str(published[table][row][column])
    except KeyError as exc:
        raise FixtureError(f"no published value for {table}/{row}/{column}") from exc


def cell(published: dict, table: str, row: str, column: str, derived: str) -> CellCheck:
    return CellCheck(table, row, column, printed(published, table, row, column), derived)


def zero_filled(value) -> Fraction:
    """Undefined error rates enter published error tables as 0."""
    return value.value if value.is_defined else Fraction(0)


def rate(value) -> str:
    return fmt_value(value)


def count(n: int) -> str:
    return str(n)


def campaign_scores(store, campaign_id: str):
    """Scored comparisons for a bundled campaign; every exhibit must have its gold record."""
    campaign = store.load_campaign(campaign_id)
    scored, not_ready = campaign_comparisons(store, campaign)
    if not_ready:
        missing = ", ".join(f"{c}/{e}" for c, e in not_ready)
        raise FixtureError(f"bundled fixtures lack gold records for {missing}")
    if not scored:
        raise FixtureError(f"campaign {campaign_id} has no scored comparisons in the fixtures")
    return scored
