"""Per-media object identification tables of the preliminary analysis study."""
from src.checks.common import PRELIMINARY_CAMPAIGN, campaign_scores, cell, count, rate, zero_filled
from src.rendering import NA

ACCURACY_COLUMNS = ("precision", "recall", "f_measure")


def accuracy_cells(published, table, s):
    derived = {c: rate(getattr(s.metrics, c)) for c in ACCURACY_COLUMNS}
    if s.gold_relevant == 0:
        # recall and F are already undefined here; the published rows also print precision as n/a
        derived["precision"] = NA
    return [cell(published, table, s.examiner_id, c, derived[c]) for c in ACCURACY_COLUMNS]


def _error_cells(published, table, s):
    m = s.metrics
    return [
        cell(published, table, s.examiner_id, "fp", count(m.tally.fp)),
        cell(published, table, s.examiner_id, "fp_error", rate(zero_filled(m.fp_error))),
        cell(published, table, s.examiner_id, "fn", count(m.tally.fn)),
        cell(published, table, s.examiner_id, "fn_error", rate(zero_filled(m.fn_error))),
    ]


def check_media(store, published, log_callback):
    log_callback("🖼️ Scoring suspect objects per media and examiner...")
    results = {}
    for s in sorted(campaign_scores(store, PRELIMINARY_CAMPAIGN),
                    key=lambda s: (s.exhibit_id, s.examiner_id)):
        errors = results.setdefault(f"{s.exhibit_id}-errors", [])
        accuracy = results.setdefault(f"{s.exhibit_id}-accuracy", [])
        errors.extend(_error_cells(published, f"{s.exhibit_id}-errors", s))
        accuracy.extend(accuracy_cells(published, f"{s.exhibit_id}-accuracy", s))
    log_callback(f"✅ Media tables rebuilt for {len(results) // 2} media")
    return results
