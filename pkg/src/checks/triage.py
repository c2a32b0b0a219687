from src.checks.common import TRIAGE_CAMPAIGN, campaign_scores, cell, rate
from src.metrics import macro_average

EXAMS_TABLE = "triage-exams"
SUMMARY_TABLE = "triage-summary"
COLUMNS = ("precision", "recall", "f_measure")


def check_triage(store, published, log_callback):
    """Per-examination scores of the triage tool and the summary with its averages."""
    log_callback("🔍 Scoring the triage tool against the full analysis...")
    scored = sorted(campaign_scores(store, TRIAGE_CAMPAIGN), key=lambda s: s.exhibit_id)

    exams, summary = [], []
    for ordinal, s in enumerate(scored, start=1):
        for column in COLUMNS:
            derived = rate(getattr(s.metrics, column))
            exams.append(cell(published, EXAMS_TABLE, s.exhibit_id, column, derived))
            summary.append(cell(published, SUMMARY_TABLE, f"analysis-{ordinal}", column, derived))

    average = macro_average([s.metrics for s in scored])
    summary.extend([
        cell(published, SUMMARY_TABLE, "average", "precision", rate(average.mean_precision)),
        cell(published, SUMMARY_TABLE, "average", "recall", rate(average.mean_recall)),
        cell(published, SUMMARY_TABLE, "average", "f_measure", rate(average.mean_f)),
    ])
    log_callback(f"✅ Triage scoring completed for {len(scored)} examinations")
    return {EXAMS_TABLE: exams, SUMMARY_TABLE: summary}
