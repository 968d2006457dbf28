"""Exception hierarchy.

Every error carries a readable message. Family bases also subclass ValueError so
callers that only know about invalid input can keep catching that.
"""

__all__ = (
    "RelatronError",
    "SchemaError",
    "DataError",
    "MetricError",
    "SketchError",
    "SurfaceError",
    "BankError",
    "RoutingError",
    "UnknownTable",
    "DuplicateTable",
    "UnknownColumnKind",
    "MissingColumn",
    "DuplicatePrimaryKey",
    "UnknownLabeledType",
    "NoLabeledEdges",
    "DegenerateLabels",
    "DegenerateClassMass",
    "EmptyProfile",
    "OracleTooLarge",
    "SingularFit",
    "SingleClass",
    "MissingCenter",
    "NonMonotoneGrid",
    "InconsistentRay",
    "IrregularGrid",
    "MissingRays",
    "CrossFamilyComparison",
    "IncompleteTask",
    "DegenerateRanking",
    "BankFormatError",
    "DivergedProjection",
    "SingleFamilyBank",
    "TooFewTasks",
    "BudgetMismatch",
    "EmptySearchSpace",
    "UnsupportedFormatVersion",
)


class RelatronError(Exception):
    """Base class for all package errors."""


class SchemaError(RelatronError, ValueError):
    """Invalid schema descriptor."""


class DataError(RelatronError, ValueError):
    """Invalid table, task or input data."""


class MetricError(RelatronError, ValueError):
    """A metric is undefined for the given input."""


class SketchError(RelatronError, ValueError):
    """Path sketch or probe failure."""


class SurfaceError(RelatronError, ValueError):
    """Invalid loss surface."""


class BankError(RelatronError, ValueError):
    """Performance bank problem."""


class RoutingError(RelatronError, ValueError):
    """Meta-selection problem."""


class UnknownTable(SchemaError):
    pass


class DuplicateTable(SchemaError):
    pass


class UnknownColumnKind(SchemaError):
    pass


class MissingColumn(DataError):
    pass


class DuplicatePrimaryKey(DataError):
    pass


class UnknownLabeledType(DataError):
    pass


class NoLabeledEdges(MetricError):
    pass


class DegenerateLabels(MetricError):
    pass


class DegenerateClassMass(MetricError):
    pass


class EmptyProfile(MetricError):
    pass


class OracleTooLarge(SketchError):
    pass


class SingularFit(SketchError):
    pass


class SingleClass(SketchError):
    pass


class MissingCenter(SurfaceError):
    pass


class NonMonotoneGrid(SurfaceError):
    pass


class InconsistentRay(SurfaceError):
    pass


class IrregularGrid(SurfaceError):
    pass


class MissingRays(SurfaceError):
    pass


class CrossFamilyComparison(SurfaceError):
    pass


class IncompleteTask(BankError):
    pass


class DegenerateRanking(BankError):
    pass


class BankFormatError(BankError):
    """Malformed bank file; `problems` lists (line number, message) pairs."""

    def __init__(self, message: str, problems: list[tuple[int, str]] | None = None):
        super().__init__(message)
        self.problems = problems or []


class DivergedProjection(RoutingError):
    pass


class SingleFamilyBank(RoutingError):
    pass


class TooFewTasks(RoutingError):
    pass


class BudgetMismatch(RoutingError):
    pass


class EmptySearchSpace(RoutingError):
    pass


class UnsupportedFormatVersion(RelatronError, ValueError):
    pass
