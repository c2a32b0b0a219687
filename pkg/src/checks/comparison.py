from src.checks.common import PRELIMINARY_CAMPAIGN, TRIAGE_CAMPAIGN, campaign_scores, cell, rate
from src.metrics import compare_processes, macro_average
from src.rendering import fmt_delta

TABLE = "process-comparison"


def check_process_comparison(store, published, log_callback):
    """Mean F of the preliminary analysis against the triage tool, both versus full analysis."""
    log_callback("🔁 Comparing the two measured processes...")
    measured = store.load_campaign(PRELIMINARY_CAMPAIGN).measured_process
    baseline = store.load_campaign(TRIAGE_CAMPAIGN).measured_process
    a = macro_average([s.metrics for s in campaign_scores(store, PRELIMINARY_CAMPAIGN)])
    b = macro_average([s.metrics for s in campaign_scores(store, TRIAGE_CAMPAIGN)])
    delta_f = next(d for d in compare_processes(a, b) if d.name == "mean_f")
    derived_delta = fmt_delta(delta_f.delta).lstrip("+")
    return {TABLE: [
        cell(published, TABLE, baseline, "mean_f", rate(b.mean_f)),
        cell(published, TABLE, measured, "mean_f", rate(a.mean_f)),
        cell(published, TABLE, f"{measured}-vs-{baseline}", "delta_f", derived_delta),
    ]}
