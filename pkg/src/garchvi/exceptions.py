"""Exception hierarchy shared by all modules."""


class GarchVIError(Exception):
    """Base class for package errors."""

    code = "error"


class ParseError(GarchVIError, ValueError):
    code = "parse_error"

    def __init__(self, row: int, reason: str):
        self.row = row
        self.reason = reason
        super().__init__(f"row {row}: {reason}")


class DuplicateDate(GarchVIError, ValueError):
    code = "duplicate_date"


class EmptySeries(GarchVIError, ValueError):
    code = "empty_series"


class DegenerateSplit(GarchVIError, ValueError):
    code = "degenerate_split"


class ConstraintViolation(GarchVIError, ValueError):
    code = "constraint_violation"


class ShapeViolation(GarchVIError, ValueError):
    code = "shape_violation"


class NonFiniteVariance(GarchVIError, FloatingPointError):
    code = "non_finite_variance"


class DimensionMismatch(GarchVIError, ValueError):
    code = "dimension_mismatch"


class BoundaryValue(GarchVIError, ValueError):
    code = "boundary_value"


class SingularCovariance(GarchVIError, ValueError):
    code = "singular_covariance"


class CovarianceUpdateFailure(GarchVIError, ArithmeticError):
    code = "covariance_update_failure"


class NonFiniteEvaluation(GarchVIError, FloatingPointError):
    code = "non_finite_evaluation"


class MissingBaseline(GarchVIError, LookupError):
    code = "missing_baseline"
