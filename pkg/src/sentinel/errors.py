"""Exception types shared across the package."""


class SentinelError(Exception):
    """Base class for all domain errors."""


class DegenerateInput(SentinelError):
    """Input is structurally invalid (both polynomials zero, empty candidate
    list, wrong initial-data dimension, mixed coefficient modes)."""


class ShapeError(SentinelError):
    """Matrix or signal dimensions do not conform."""


class SingularKernel(SentinelError):
    """Square polynomial matrix has identically zero determinant."""


class ZeroBehavior(SentinelError):
    """The system admits only the zero trajectory, so the security index
    is undefined."""


class NotReducible(SentinelError):
    """Canonical reduction impossible: some column subset of the requested
    size is not left unimodular."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class NoLeftInverse(SentinelError):
    """Matrix has no polynomial left inverse."""


class NotObservable(SentinelError):
    """Latent-variable stack has no polynomial left inverse."""


class NotMaximallySecure(SentinelError):
    """Observer construction requires the one-driver canonical form."""


class InconsistentIndex(SentinelError):
    """A subset that the claimed security index guarantees to be invertible
    turned out not to be."""


class MajorityTie(SentinelError):
    """No strict plurality among observer outputs."""

    def __init__(self, message, tally=None):
        super().__init__(message)
        self.tally = tuple(tally) if tally is not None else None


class HorizonTooShort(SentinelError):
    """Signal horizon cannot absorb the operator degree."""
