"""
LoopK Errors - Exception hierarchy

Two families, mapped to CLI exit codes by loopk.cli.main:
- InputError (exit 2): precondition or payload violations
- ComputationError (exit 3): failures raised while computing
"""

from typing import Any, Optional


class LoopKError(Exception):
    """Root of every error raised by loopk"""

    kind = "error"

    def to_dict(self) -> dict:
        return {"error": self.kind, "detail": str(self)}


# ============================================================================
# INPUT ERRORS
# ============================================================================

class InputError(LoopKError, ValueError):
    """Invalid input or violated precondition"""

    kind = "input_error"


class VariableMismatchError(InputError):
    kind = "variable_mismatch"


class InvalidCartanError(InputError):
    """Matrix is not a finite-type Cartan matrix"""

    kind = "invalid_cartan"


class UnsupportedTypeError(InputError):
    kind = "unsupported_type"


class ImproperIndexError(InputError):
    """Parabolic index set is not a proper subset of {0..n}"""

    kind = "improper_index"


class NotInvariantError(InputError):
    kind = "not_invariant"


class WindowError(InputError):
    """Truncation window too small for the requested computation"""

    kind = "window_error"


class QWindowError(WindowError):
    kind = "q_window_error"


class FGLAxiomError(InputError):
    """Custom formal group law fails unit, symmetry or associativity"""

    kind = "fgl_axiom_error"


class MissingChernNumberError(InputError):
    kind = "missing_chern_number"


# ============================================================================
# COMPUTATION ERRORS
# ============================================================================

class ComputationError(LoopKError, RuntimeError):
    """Failure while computing a result"""

    kind = "computation_error"


class NonExactDivisionError(ComputationError):
    """
    Division that does not close in the Laurent ring

    Carries the partial quotient and the remainder witness with
    quotient * divisor + remainder == dividend.
    """

    kind = "non_exact_division"

    def __init__(self, message: str, quotient: Any = None, remainder: Any = None):
        super().__init__(message)
        self.quotient = quotient
        self.remainder = remainder


class NonUnitError(ComputationError):
    kind = "non_unit"


class StabilizationError(ComputationError):
    kind = "stabilization_error"


class FoldingError(ComputationError):
    """Folding exceeded LOOPK_MAX_ITER reflections"""

    kind = "folding_error"


class FGLTruncationError(ComputationError):
    kind = "fgl_truncation"


def describe(error: Exception, detail: Optional[str] = None) -> dict:
    """Error JSON for the CLI: {"error": kind, "detail": message}"""
    if isinstance(error, LoopKError):
        payload = error.to_dict()
    else:
        payload = {"error": "internal_error", "detail": str(error)}
    if detail:
        payload["detail"] = f"{payload['detail']} ({detail})"
    return payload
