"""Exceptions raised by the measurement harness.

Validation violations are returned as data; everything here is a hard failure
that the CLI maps to an exit code.
"""


class HarnessError(Exception):
    """Base class for every harness failure."""


class TallyError(HarnessError):
    """Counts that break tp + fp = retrieved or tp + fn = relevant."""


class EmptyInputError(HarnessError):
    """An aggregation, trend or decision tally was asked to work on nothing."""


class ManifestError(HarnessError):
    """A manifest could not be parsed or failed validation.

    `problems` holds (position, message) pairs; position is a field path such as
    ``artifacts[2].id``, ``line 4, column 7`` for JSON syntax errors or ``byte 31`` for bad UTF-8.
    """

    def __init__(self, problems, source=None):
        self.problems = list(problems)
        self.source = source
        where = f"{source}: " if source else ""
        detail = "; ".join(f"{pos}: {msg}" for pos, msg in self.problems)
        super().__init__(f"{where}{detail}")


class PairingError(HarnessError):
    """Gold and candidate records cannot be compared."""


class InconsistentTallyError(HarnessError):
    """A declared tally claims more relevant items than the gold record holds."""

    def __init__(self, report):
        self.report = report
        super().__init__(
            f"candidate claims {report['relevant_retrieved']} relevant items "
            f"but gold holds {report['gold_relevant']}"
        )


class StoreConflictError(HarnessError):
    """A second, different record was appended under an occupied key."""


class NotReadyError(HarnessError):
    """The case has no gold record yet (it awaits full examination)."""

    def __init__(self, case_id, exhibit_id):
        self.case_id = case_id
        self.exhibit_id = exhibit_id
        super().__init__(f"no gold record for case {case_id} exhibit {exhibit_id}")


class CampaignError(HarnessError):
    """Campaign steps out of order, unknown campaign, or scoring not permitted."""


class FixtureError(HarnessError):
    """Bundled fixture data is missing or corrupt."""
