"""Exception types shared across the library.

Every error carries enough context in its message to localize the failing
place/operation; none of them wrap other exceptions silently.
"""


class AdelicError(Exception):
    """Base class for all library errors."""


class RamifiedOrNonMonogenic(AdelicError):
    """The defining polynomial is not squarefree mod p, so finite places
    above p cannot be constructed by factorization."""


class PrecisionExhausted(AdelicError):
    """An enclosure could not be separated at the allowed working precision."""


class OutsideConvergenceDomain(AdelicError):
    """Argument outside the open disc where the p-adic series converges."""


class DimensionMismatch(AdelicError):
    """Vector/matrix dimensions incompatible with the ambient space."""


class SingularNormSpec(AdelicError):
    """A norm-defining matrix is singular."""


class ZeroBundle(AdelicError):
    """Operation undefined on the zero bundle."""


class NotASubspace(AdelicError):
    """The supplied spanning set does not define a subspace of the bundle."""


class LengthMismatch(AdelicError):
    """A multi-index does not have the declared length."""


class InexactMaxSlope(AdelicError):
    """A bound requiring an exact maximal slope received only a lower bound."""


class RankUncertified(AdelicError):
    """Singular-value enclosures cannot separate a value from zero."""


class HypothesisViolated(AdelicError):
    """A lemma's stated hypothesis does not hold for the supplied data."""


class SearchBudgetExceeded(AdelicError):
    """Exhaustive search hit its desk-scale budget.  Carries the best witness
    found so far in ``best`` (may be None)."""

    def __init__(self, message: str, best=None):
        super().__init__(message)
        self.best = best


class InvalidFrakE(AdelicError):
    """The convergence-slack parameter is outside its allowed range."""


class DeskScaleExceeded(AdelicError):
    """Input beyond the documented desk-scale limits."""


class KindMismatch(AdelicError):
    """A bound variant was requested with incompatible instance data."""


class DegenerateInstance(AdelicError):
    """All linear forms remained indistinguishable from zero at max budget."""
