from src.checks.common import TREND_CASE, cell, rate
from src.errors import FixtureError
from src.ingestion import scored_comparisons
from src.metrics import macro_average
from src.workflow import trend_series

TABLE = "investigator-trend"


def check_investigator_trend(store, published, log_callback, window=4):
    log_callback("📈 Rebuilding the investigator's accuracy series...")
    scored, not_ready = scored_comparisons(store, case_id=TREND_CASE)
    if not scored or not_ready:
        raise FixtureError(f"trend fixture {TREND_CASE} is incomplete")
    by_exhibit = {s.exhibit_id: s for s in scored}
    series = trend_series([(s.timestamp, s.metrics) for s in scored], window=window)
    for alert in series.alerts:
        log_callback(f"⚠️ trend alert at point {alert.index}: "
                     f"{alert.kind.value} ({alert.detail})")

    checks = []
    for exhibit, s in sorted(by_exhibit.items()):
        for column in ("precision", "recall", "f_measure"):
            derived = rate(getattr(s.metrics, column))
            checks.append(cell(published, TABLE, exhibit, column, derived))
    average = macro_average([m for _, m in series.points])
    checks.extend([
        cell(published, TABLE, "average", "precision", rate(average.mean_precision)),
        cell(published, TABLE, "average", "recall", rate(average.mean_recall)),
        cell(published, TABLE, "average", "f_measure", rate(average.mean_f)),
    ])
    return {TABLE: checks}
