"""Error types raised across the library.

Library code raises these; only ``main.py`` catches them and turns them into
exit code 2 with a one-line diagnostic.
"""


class MathieuError(Exception):
    """Root of every error raised by this package."""


class ZeroInverse(MathieuError, ZeroDivisionError):
    """Inverse of the zero scalar was requested."""


class SingularMatrix(ZeroInverse):
    """Inverse of a singular matrix was requested."""


class FieldError(MathieuError, ValueError):
    """Malformed field description (non-prime characteristic, reducible modulus, ...)."""


class UnsupportedField(MathieuError):
    """Operation is not available over the given field."""


class MixedFields(MathieuError, ValueError):
    """Operands live over different fields."""


class ShapeMismatch(MathieuError, ValueError):
    """Operands have incompatible shapes."""


class ImproperSubspace(MathieuError, ValueError):
    """A proper subspace was required but the full algebra was given."""


class BudgetExceeded(MathieuError):
    """An exhaustive loop would exceed its configured element budget."""

    def __init__(self, needed, budget, what="elements"):
        super().__init__(f"{what}: {needed} exceeds budget {budget}")
        self.needed = needed
        self.budget = budget


class HypothesisFailed(MathieuError):
    """A hypothesis of the structural certifier does not hold.

    ``hypothesis`` is one of ``"sigma"``, ``"containment"``,
    ``"projected_containment"``, ``"products"``; ``witness`` identifies the
    offending tuple or basis pair.
    """

    def __init__(self, hypothesis, witness, message=""):
        super().__init__(message or f"hypothesis '{hypothesis}' failed at {witness}")
        self.hypothesis = hypothesis
        self.witness = witness


class SigmaConditionFailed(MathieuError, ValueError):
    """The weighted-rank condition on the sigma coefficients fails."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class ProductZero(MathieuError, ValueError):
    """Extension pair (u, w) has u*w = 0."""


class BadBlocks(MathieuError, ValueError):
    """A matrix does not lie in the required block e_i M e_j."""


class RankOutOfRange(MathieuError, ValueError):
    """Rank parameters are outside the admissible range."""


class InvalidPart(MathieuError, IndexError):
    """Part index outside the grouped frame."""


class InvalidFrame(MathieuError, ValueError):
    """Idempotents do not form an orthogonal frame summing to the identity."""


class DirectionInV(MathieuError, ValueError):
    """Extension direction already lies in the subspace."""


class InternalContractViolation(MathieuError, AssertionError):
    """A self-check on a produced object failed; indicates a bug."""


class FamilyMismatch(MathieuError, ValueError):
    """Subspace or instance is not a member of the required family."""


class NotAnMS(MathieuError, ValueError):
    """An MS was required but the subspace contains a nonzero idempotent."""


class ParameterViolation(MathieuError, ValueError):
    """Family parameters violate their stated constraints."""


class NotNilpotent(MathieuError, ValueError):
    """Matrix is required to be nonzero with square zero."""


class SquareParameter(MathieuError, ValueError):
    """Parameter is a square in the base field."""


class ExcludedParameter(MathieuError, ValueError):
    """Parameter takes one of the excluded values 0, 1, -1."""


class WitnessError(MathieuError, ValueError):
    """A stored witness does not re-verify."""


class ConfigError(MathieuError, ValueError):
    """Malformed command-line configuration or input file."""
