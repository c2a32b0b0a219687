"""Command-line surface of the measurement harness.

Exit codes: 0 success, 1 usage error, 2 data error, 3 verification divergence.
Reports go to stdout (or ``--out``); logs go to stderr.
"""
from __future__ import annotations

import argparse
import logging
import re
import sys
from pathlib import Path

from src.bundled import FIXTURE_DIR, FIXTURE_NAMES, fixture_names, fixture_store
from src.core_model import Role
from src.errors import CampaignError, EmptyInputError, HarnessError
from src.ingestion import (
    CaseStore, campaign_comparisons, load_bundle, parse_manifest, scored_comparisons,
)
from src.metrics import AGGREGATE_FIELDS, compare_processes, macro_average
from src.rendering import (
    INCOMPARABLE, csv_value, fmt_delta, fmt_value, render_csv, render_table, write_trend_svg,
)
from src.verifier import render_verification, verify_published
from src.workflow import (
    GROUP_KEYS, AlertKind, SamplingPlan, advance_campaign, decision_gate_check,
    examiner_decisions, examiner_summaries, group_points, mark_needs_review, new_campaign,
    next_measured_ordinals, random_phase_plan, require_scoring_permitted, trend_series,
)
from utils.config import load_settings
from utils.logging_utils import configure_logging, log_line

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_DIVERGENCE = 3

SCORE_HEADERS = ["case", "exhibit", "examiner", "process",
                 "precision", "recall", "f_measure", "fp_error", "fn_error"]
AGGREGATE_HEADERS = ["examiner", "cases", "precision", "recall", "f_measure",
                     "fp_error", "fn_error", "undefined_f"]
DECISION_HEADERS = ["examiner", "decisions", "fp", "fp_rate", "fn", "fn_rate", "gate"]
REVIEW_HEADERS = ["campaign", "needs_review", "reason"]
METRIC_LABELS = {
    "mean_precision": "precision",
    "mean_recall": "recall",
    "mean_f": "f_measure",
    "mean_fp_error": "fp_error",
    "mean_fn_error": "fn_error",
}


class UsageError(Exception):
    """Arguments parsed but cannot be used together."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive_int(text):
    try:
        value = int(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from e
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _file_stem(name):
    return re.sub(r"[^A-Za-z0-9._-]", "_", name)


def _emit(text, out=None):
    if out:
        path = Path(out)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8", newline="\n")
        logger.info("✅ Report written to %s", path)
    else:
        sys.stdout.write(text)


def _open_store(args):
    if getattr(args, "fixture", None):
        return fixture_store(fixture_names(args.fixture))
    return CaseStore.open(args.store)


# ---------------------------------------------------------------- score

def cmd_score(args, settings):
    store = _open_store(args)
    scored, not_ready = scored_comparisons(store, case_id=args.case, exhibit_id=args.exhibit,
                                           process_id=args.process)
    if not scored and not not_ready:
        _emit("no cases match the filter\n", args.out)
        return EXIT_OK

    value = csv_value if args.format == "csv" else fmt_value
    rows = [[s.case_id, s.exhibit_id, s.examiner_id, s.process_id,
             *(value(getattr(s.metrics, name))
               for name in ("precision", "recall", "f_measure", "fp_error", "fn_error"))]
            for s in scored]
    if rows:
        if args.format == "csv":
            _emit(render_csv(SCORE_HEADERS, rows), args.out)
        else:
            _emit(render_table(SCORE_HEADERS, rows) + "\n", args.out)

    if not_ready:
        pending = ", ".join(f"{case}/{exhibit}" for case, exhibit in not_ready)
        logger.error("❌ No gold record yet for: %s", pending)
        return EXIT_DATA
    return EXIT_OK


# ---------------------------------------------------------------- trend

def cmd_trend(args, settings):
    store = _open_store(args)
    scored, _ = scored_comparisons(store, case_id=args.case, process_id=args.process)
    if not scored:
        raise EmptyInputError("no scored cases to build a trend from")

    out_dir = Path(args.out or settings.output_dir)
    window = args.window or settings.trend_window
    drop = args.threshold if args.threshold is not None else settings.drop_threshold
    floor = args.recall_floor if args.recall_floor is not None else settings.recall_floor

    lines = []
    for group, points in group_points(scored, args.group_by).items():
        series = trend_series(points, window=window, drop_threshold=drop, recall_floor=floor)
        average = macro_average([m for _, m in series.points])
        rows = [[ts, csv_value(m.precision), csv_value(m.recall), csv_value(m.f_measure)]
                for ts, m in series.points]
        rows.append(["average", csv_value(average.mean_precision),
                     csv_value(average.mean_recall), csv_value(average.mean_f)])

        stem = f"trend-{_file_stem(group)}"
        csv_path = out_dir / f"{stem}.csv"
        csv_path.parent.mkdir(parents=True, exist_ok=True)
        csv_path.write_text(render_csv(["timestamp", "precision", "recall", "f_measure"], rows),
                            encoding="utf-8", newline="\n")
        drops = [a.index for a in series.alerts if a.kind is AlertKind.F_DROP]
        svg_path = write_trend_svg(out_dir / f"{stem}.svg", series.points, drops,
                                   title=f"F-measure over time: {group}")
        logger.info("📈 %s: wrote %s and %s", group, csv_path, svg_path)

        lines.append(f"{args.group_by} {group}: {len(series.points)} point(s), average "
                     f"P={fmt_value(average.mean_precision)} R={fmt_value(average.mean_recall)} "
                     f"F={fmt_value(average.mean_f)}")
        for alert in series.alerts:
            timestamp = series.points[alert.index][0]
            lines.append(f"  ALERT {alert.kind.value} at point {alert.index} ({timestamp}): "
                         f"{alert.detail}")
        if not series.alerts:
            lines.append("  no alerts")
    sys.stdout.write("\n".join(lines) + "\n")
    return EXIT_OK


# ---------------------------------------------------------------- sample-plan

def cmd_sample_plan(args, settings):
    interval = args.interval or settings.sample_interval
    if args.random_phase:
        if args.seed is None:
            raise UsageError("--random-phase needs --seed")
        plan = random_phase_plan(interval, args.seed)
    else:
        try:
            plan = SamplingPlan.every(interval, args.phase)
        except ValueError as e:
            raise UsageError(str(e)) from e
    ordinals = next_measured_ordinals(plan, args.count, start=args.start)
    sys.stdout.write(f"every {plan.interval} cases, phase {plan.phase}: "
                     f"{', '.join(str(o) for o in ordinals)}\n")
    return EXIT_OK


# ---------------------------------------------------------------- verify-paper

def cmd_verify_paper(args, settings):
    report = verify_published(args.fixtures, status_callback=logger.debug, log_callback=log_line)
    _emit(render_verification(report), args.out)
    return EXIT_OK if report.passed else EXIT_DIVERGENCE


# ---------------------------------------------------------------- report

def _aggregate_row(name, agg, value):
    return [name, str(agg.n_cases), *(value(getattr(agg, f)) for f in AGGREGATE_FIELDS),
            str(agg.n_undefined_f)]


def _csv_delta(delta):
    return INCOMPARABLE if delta is None else csv_value(delta)


def _campaign_scores(store, campaign):
    require_scoring_permitted(campaign)
    scored, _ = campaign_comparisons(store, campaign)
    return scored


def cmd_report(args, settings):
    store = _open_store(args)
    campaign = store.load_campaign(args.campaign)
    scored = _campaign_scores(store, campaign)
    header = (f"Campaign {campaign.campaign_id}: {campaign.measured_process} "
              f"against {campaign.gold_process}")
    if not scored:
        _emit(f"{header}\nno scored cases yet; empty report\n", args.out)
        return EXIT_OK

    decisions = examiner_decisions(scored)
    gates = {name: decision_gate_check(rates) for name, rates in decisions.items()}
    failed = {name: g for name, g in gates.items() if not g.passed}
    if failed and not campaign.needs_review:
        campaign = mark_needs_review(campaign)
        store.save_campaign(campaign)
        logger.warning("⚠️ Campaign %s marked as needing review", campaign.campaign_id)

    value = csv_value if args.format == "csv" else fmt_value
    summaries = examiner_summaries(scored)
    overall = macro_average([s.metrics for s in scored])
    rows = [_aggregate_row(name, agg, value) for name, agg in summaries.items()]
    rows.append(_aggregate_row("all", overall, value))

    other = None
    if args.compare:
        other_campaign = store.load_campaign(args.compare)
        other_scored = _campaign_scores(store, other_campaign)
        if not other_scored:
            raise CampaignError(f"campaign {other_campaign.campaign_id} has no scored cases")
        other = (other_campaign, macro_average([s.metrics for s in other_scored]))

    reasons = "; ".join(g.reason for g in failed.values()) or "decision gate failed earlier"
    decision_rows = [[name, str(r.n_cases), str(r.decision_fp), value(r.decision_fp_rate),
                      str(r.decision_fn), value(r.decision_fn_rate),
                      "pass" if gates[name].passed else "FAIL"]
                     for name, r in decisions.items()]
    delta_headers = delta_rows = deltas = None
    if other is not None:
        other_campaign, other_overall = other
        deltas = compare_processes(overall, other_overall)
        delta_headers = ["metric", campaign.measured_process, other_campaign.measured_process,
                         "delta"]
        delta = _csv_delta if args.format == "csv" else fmt_delta
        delta_rows = [[METRIC_LABELS[d.name], value(d.a), value(d.b), delta(d.delta)]
                      for d in deltas]

    if args.format == "csv":
        sections = [
            render_csv(AGGREGATE_HEADERS, rows),
            render_csv(REVIEW_HEADERS, [[campaign.campaign_id,
                                         "yes" if campaign.needs_review else "no",
                                         reasons if campaign.needs_review else ""]]),
            render_csv(DECISION_HEADERS, decision_rows),
        ]
        if delta_rows is not None:
            sections.append(render_csv(delta_headers, delta_rows))
        _emit("\n".join(sections), args.out)
        return EXIT_OK

    blocks = []
    if campaign.needs_review:
        blocks.append(f"*** NEEDS REVIEW: {reasons} ***")
    blocks.append(header)
    blocks.append(render_table(AGGREGATE_HEADERS, rows))
    if decision_rows:
        blocks.append(render_table(DECISION_HEADERS, decision_rows))
    else:
        blocks.append("no further-analysis decisions recorded")

    if delta_rows is not None:
        blocks.append(render_table(delta_headers, delta_rows))
        delta_f = next(d for d in deltas if d.name == "mean_f")
        blocks.append(f"ΔF = {fmt_delta(delta_f.delta)} ({campaign.measured_process} vs "
                      f"{other[0].measured_process})")
    _emit("\n\n".join(blocks) + "\n", args.out)
    return EXIT_OK


# ---------------------------------------------------------------- ingest

def _manifests(path):
    path = Path(path)
    if path.suffix == ".jsonl":
        return load_bundle(path)
    return [parse_manifest(path.read_bytes(), source=str(path))]


def cmd_ingest(args, settings):
    store = CaseStore.open(args.store)
    added = skipped = 0
    for path in args.manifests:
        for record in _manifests(path):
            if store.append(record):
                added += 1
            else:
                skipped += 1
    gold = sum(1 for r in store.records if r.role is Role.GOLD)
    sys.stdout.write(f"ingested {added} record(s), {skipped} already present; store holds "
                     f"{len(store.records)} record(s), {gold} gold\n")
    return EXIT_OK


# ---------------------------------------------------------------- campaign

def _campaign_exists(store, campaign_id):
    try:
        store.load_campaign(campaign_id)
    except CampaignError:
        return False
    return True


def cmd_campaign_create(args, settings):
    store = CaseStore.open(args.store)
    if _campaign_exists(store, args.campaign_id):
        raise CampaignError(f"campaign {args.campaign_id!r} already exists")
    if args.random_phase:
        sampling = random_phase_plan(args.interval or settings.sample_interval,
                                     args.seed or args.campaign_id)
    elif args.interval:
        try:
            sampling = SamplingPlan.every(args.interval, args.phase)
        except ValueError as e:
            raise UsageError(str(e)) from e
    else:
        sampling = SamplingPlan.full()
    campaign = new_campaign(args.campaign_id, args.measured, args.gold, sampling)
    store.save_campaign(campaign)
    sys.stdout.write(_render_campaign(campaign))
    return EXIT_OK


def cmd_campaign_advance(args, settings):
    store = CaseStore.open(args.store)
    campaign = advance_campaign(store.load_campaign(args.campaign_id), args.step, args.evidence)
    store.save_campaign(campaign)
    sys.stdout.write(_render_campaign(campaign))
    return EXIT_OK


def cmd_campaign_show(args, settings):
    store = _open_store(args)
    sys.stdout.write(_render_campaign(store.load_campaign(args.campaign_id)))
    return EXIT_OK


def _render_campaign(c):
    sampling = ("every case" if c.sampling.interval == 1 and c.sampling.phase == 0
                else f"every {c.sampling.interval} cases, phase {c.sampling.phase}")
    rows = [[str(s.number), s.title, "done" if s.done else "pending", s.evidence or ""]
            for s in c.steps]
    lines = [f"Campaign {c.campaign_id}: {c.measured_process} against {c.gold_process}",
             f"sampling: {sampling}",
             f"scoring permitted: {'yes' if c.scoring_permitted else 'no'}"]
    if c.needs_review:
        lines.append("*** NEEDS REVIEW ***")
    return "\n".join(lines) + "\n\n" + render_table(["step", "title", "status", "evidence"],
                                                    rows) + "\n"


# ---------------------------------------------------------------- parser

def build_parser(settings):
    parser = _Parser(prog="measure.py",
                     description="Measure forensic examination accuracy against a gold standard.")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    store_opts = _Parser(add_help=False)
    store_opts.add_argument("--store", type=Path, default=settings.store,
                            help="case store directory (default: %(default)s)")
    store_opts.add_argument("--fixture", choices=(*FIXTURE_NAMES, "all"),
                            help="score the bundled fixtures instead of --store")
    out_opts = _Parser(add_help=False)
    out_opts.add_argument("--format", choices=("table", "csv"), default="table")
    out_opts.add_argument("--out", type=Path, help="write the report here instead of stdout")

    p = sub.add_parser("score", parents=[store_opts, out_opts], help="per-case metrics")
    p.add_argument("--case")
    p.add_argument("--exhibit")
    p.add_argument("--process", help="only candidates from this process")
    p.set_defaults(handler=cmd_score)

    p = sub.add_parser("trend", parents=[store_opts], help="accuracy over time, CSV and SVG")
    p.add_argument("--group-by", choices=GROUP_KEYS, default="examiner_id")
    p.add_argument("--case")
    p.add_argument("--process")
    p.add_argument("--window", type=_positive_int)
    p.add_argument("--threshold", type=float, help="relative F drop that raises an alert")
    p.add_argument("--recall-floor", type=float)
    p.add_argument("--out", type=Path, help=f"output directory (default: {settings.output_dir})")
    p.set_defaults(handler=cmd_trend)

    p = sub.add_parser("sample-plan", help="upcoming measured case ordinals")
    p.add_argument("--interval", type=_positive_int)
    p.add_argument("--phase", type=int, default=0)
    p.add_argument("--count", type=_positive_int, default=3)
    p.add_argument("--start", type=_positive_int, default=1)
    p.add_argument("--random-phase", action="store_true")
    p.add_argument("--seed")
    p.set_defaults(handler=cmd_sample_plan)

    p = sub.add_parser("verify-paper", help="reproduce the published tables from fixtures")
    p.add_argument("--fixtures", type=Path, default=FIXTURE_DIR)
    p.add_argument("--out", type=Path)
    p.set_defaults(handler=cmd_verify_paper)

    p = sub.add_parser("report", parents=[store_opts, out_opts], help="campaign report")
    p.add_argument("--campaign", required=True)
    p.add_argument("--compare", metavar="CAMPAIGN", help="add deltas against another campaign")
    p.set_defaults(handler=cmd_report)

    p = sub.add_parser("ingest", help="append manifests to the store")
    p.add_argument("manifests", nargs="+", help=".json manifests or .jsonl bundles")
    p.add_argument("--store", type=Path, default=settings.store)
    p.set_defaults(handler=cmd_ingest)

    p = sub.add_parser("campaign", help="manage measurement campaigns")
    campaign_sub = p.add_subparsers(dest="campaign_command", required=True, parser_class=_Parser)
    c = campaign_sub.add_parser("create")
    c.add_argument("campaign_id")
    c.add_argument("--measured", required=True, help="process being measured")
    c.add_argument("--gold", required=True, help="gold-standard process")
    c.add_argument("--interval", type=_positive_int)
    c.add_argument("--phase", type=int, default=0)
    c.add_argument("--random-phase", action="store_true")
    c.add_argument("--seed", help="random phase seed (default: the campaign id)")
    c.add_argument("--store", type=Path, default=settings.store)
    c.set_defaults(handler=cmd_campaign_create)
    c = campaign_sub.add_parser("advance")
    c.add_argument("campaign_id")
    c.add_argument("step", type=_positive_int)
    c.add_argument("--evidence", required=True)
    c.add_argument("--store", type=Path, default=settings.store)
    c.set_defaults(handler=cmd_campaign_advance)
    c = campaign_sub.add_parser("show", parents=[store_opts])
    c.add_argument("campaign_id")
    c.set_defaults(handler=cmd_campaign_show)
    return parser


def main(argv=None):
    try:
        settings = load_settings()
    except ValueError as e:
        sys.stderr.write(f"❌ Configuration error: {e}\n")
        return EXIT_USAGE
    parser = build_parser(settings)
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE
    configure_logging("DEBUG" if args.verbose else settings.log_level)

    try:
        return args.handler(args, settings)
    except UsageError as e:
        logger.error("❌ %s", e)
        return EXIT_USAGE
    except HarnessError as e:
        logger.error("❌ %s", e)
        return EXIT_DATA
    except OSError as e:
        logger.error("❌ %s", e)
        return EXIT_DATA
