"""Presentation helpers: half-up rounding, "n/a" cells, console tables, CSV and SVG."""
from __future__ import annotations

import csv
import io
import math
from decimal import Decimal
from fractions import Fraction
from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  pylint: disable=wrong-import-position
from tabulate import tabulate  # noqa: E402  pylint: disable=wrong-import-position

NA = "n/a"
INCOMPARABLE = "incomparable"

# fixed salt and no date so repeated runs write byte-identical charts
SVG_RC = {"svg.hashsalt": "fah-trend", "svg.fonttype": "none"}


def _unwrap(value):
    if value is None:
        return None
    if hasattr(value, "is_defined"):
        return value.value
    return Fraction(value)


def round_half_up(value: Fraction, places: int = 2) -> Decimal:
    """Exact half-up (away from zero on ties) rounding of a fraction."""
    scaled = abs(Fraction(value)) * 10 ** places
    rounded = math.floor(scaled + Fraction(1, 2))
    sign = -1 if value < 0 else 1
    return Decimal(sign * rounded).scaleb(-places)


def fmt_value(value, places: int = 2) -> str:
    """Render a MetricValue or fraction to `places` decimals, "n/a" when undefined."""
    raw = _unwrap(value)
    if raw is None:
        return NA
    return f"{round_half_up(raw, places):.{places}f}"


def fmt_delta(delta, places: int = 2) -> str:
    if delta is None:
        return INCOMPARABLE
    text = fmt_value(delta, places)
    return text if text.startswith("-") else f"+{text}"


def csv_value(value) -> str:
    """Full-precision CSV cell; rounding is for tables only."""
    raw = _unwrap(value)
    return NA if raw is None else repr(float(raw))


def render_table(headers, rows) -> str:
    return tabulate(rows, headers=headers, tablefmt="github", disable_numparse=True)


def render_csv(headers, rows) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(headers)
    writer.writerows(rows)
    return buffer.getvalue()


def write_trend_svg(path: Path, points, f_drop_indices=(), title: str = "") -> Path:
    """Line chart of F-measure over time; undefined points leave a gap."""
    labels = [timestamp[:10] for timestamp, _ in points]
    values = [m.f_measure.as_float() if m.f_measure.is_defined else math.nan for _, m in points]
    xs = list(range(len(points)))

    with plt.rc_context(SVG_RC):
        fig, ax = plt.subplots(figsize=(8, 4))
        ax.plot(xs, values, marker="o", label="F-measure")
        drops = [i for i in f_drop_indices if 0 <= i < len(points)]
        if drops:
            ax.scatter(drops, [values[i] for i in drops], marker="x", s=80, color="red",
                       zorder=3, label="f_drop alert")
        ax.set_xticks(xs)
        ax.set_xticklabels(labels, rotation=45, ha="right")
        ax.set_ylim(0, 1.05)
        ax.set_ylabel("F-measure")
        ax.set_title(title or "Accuracy over time against the gold standard")
        ax.legend(loc="lower left")
        fig.tight_layout()
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)
    return path
