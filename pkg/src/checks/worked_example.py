from src.checks.common import TREND_CASE, cell, rate
from src.errors import FixtureError
from src.ingestion import scored_comparisons

TABLE = "worked-example"


def check_worked_example(store, published, log_callback):
    """Score the itemized ten-relevant, seven-retrieved example artifact by artifact."""
    log_callback("🧮 Matching the itemized worked example on artifact ids...")
    scored, _ = scored_comparisons(store, case_id=TREND_CASE, exhibit_id="analysis-1")
    if len(scored) != 1:
        raise FixtureError(f"expected one candidate for {TREND_CASE}/analysis-1, "
                           f"found {len(scored)}")
    metrics = scored[0].metrics
    tally = metrics.tally
    log_callback(f"📄 tp={tally.tp} fp={tally.fp} fn={tally.fn} "
                 f"(retrieved {tally.retrieved}, relevant {tally.relevant})")
    return {TABLE: [
        cell(published, TABLE, "analysis", "precision", rate(metrics.precision)),
        cell(published, TABLE, "analysis", "recall", rate(metrics.recall)),
        cell(published, TABLE, "analysis", "f_measure", rate(metrics.f_measure)),
    ]}
