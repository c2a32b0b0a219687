"""Per-examiner tables: further-analysis decisions and averaged object errors and accuracy."""
from src.checks.common import PRELIMINARY_CAMPAIGN, campaign_scores, cell, count, rate
from src.metrics import macro_average
from src.workflow import decision_gate_check, examiner_decisions, examiner_summaries

DECISIONS_TABLE = "decision-errors"
ERROR_AVERAGES_TABLE = "examiner-error-averages"
ACCURACY_AVERAGES_TABLE = "examiner-accuracy-averages"


def check_decisions(store, published, log_callback):
    log_callback("⚖️ Tallying further-analysis decisions against the gold standard...")
    checks = []
    for examiner, rates in examiner_decisions(campaign_scores(store, PRELIMINARY_CAMPAIGN)).items():
        gate = decision_gate_check(rates)
        log_callback(f"{'✅' if gate.passed else '❌'} decision gate for {examiner}: "
                     f"{'pass' if gate.passed else gate.reason}")
        checks.extend([
            cell(published, DECISIONS_TABLE, examiner, "fp", count(rates.decision_fp)),
            cell(published, DECISIONS_TABLE, examiner, "fp_rate", rate(rates.decision_fp_rate)),
            cell(published, DECISIONS_TABLE, examiner, "fn", count(rates.decision_fn)),
            cell(published, DECISIONS_TABLE, examiner, "fn_rate", rate(rates.decision_fn_rate)),
        ])
    return {DECISIONS_TABLE: checks}


def check_examiner_averages(store, published, log_callback):
    """Error averages zero-fill over every media; accuracy averages use defined F only."""
    log_callback("👥 Averaging per-examiner error and accuracy rates...")
    scored = campaign_scores(store, PRELIMINARY_CAMPAIGN)
    errors, accuracy = [], []
    for examiner, summary in examiner_summaries(scored).items():
        errors.append(cell(published, ERROR_AVERAGES_TABLE, examiner, "fp_error",
                           rate(summary.mean_fp_error)))
        errors.append(cell(published, ERROR_AVERAGES_TABLE, examiner, "fn_error",
                           rate(summary.mean_fn_error)))
        accuracy.append(cell(published, ACCURACY_AVERAGES_TABLE, examiner, "f_measure",
                             rate(summary.mean_f)))
    unit = macro_average([s.metrics for s in scored])
    accuracy.append(cell(published, ACCURACY_AVERAGES_TABLE, "unit", "f_measure",
                         rate(unit.mean_f)))
    return {ERROR_AVERAGES_TABLE: errors, ACCURACY_AVERAGES_TABLE: accuracy}
