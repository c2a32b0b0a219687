import logging

import pytest

from src.bundled import fixture_store
from src.core_model import (
    Artifact, Category, ConfusionTally, DeclaredTally, ExaminationRecord, Mode, Role,
)
from src.metrics import score_case


def _record(**overrides):
    fields = {
        "case_id": "case-x",
        "exhibit_id": "exhibit-1",
        "examiner_id": "alice",
        "process_id": "triage",
        "role": Role.CANDIDATE,
        "timestamp": "2020-01-01T09:00:00+00:00",
        "mode": Mode.TALLY,
        "declared_tally": DeclaredTally(retrieved=5, false_positives=1),
    }
    fields.update(overrides)
    return ExaminationRecord(**fields)


def _gold(relevant=10, **overrides):
    fields = {
        "role": Role.GOLD,
        "examiner_id": "expert",
        "process_id": "full-analysis",
        "timestamp": "2020-01-02T09:00:00+00:00",
        "declared_tally": DeclaredTally(retrieved=relevant, false_positives=0),
    }
    fields.update(overrides)
    return _record(**fields)


def _artifacts(*ids, category=Category.INCULPATORY):
    return tuple(Artifact(i, category) for i in ids)


def _case_metrics(tp, fp, fn):
    return score_case(tp + fn, ConfusionTally.from_counts(tp, fp, fn))


@pytest.fixture
def make_record():
    return _record


@pytest.fixture
def make_gold():
    return _gold


@pytest.fixture
def make_artifacts():
    return _artifacts


@pytest.fixture
def case_metrics():
    return _case_metrics


@pytest.fixture(scope="session")
def bundled_store():
    return fixture_store()


@pytest.fixture(autouse=True)
def _restore_root_logger():
    # the CLI reconfigures the root logger against the captured stderr
    root = logging.getLogger()
    handlers, level = root.handlers[:], root.level
    yield
    root.handlers[:] = handlers
    root.setLevel(level)
