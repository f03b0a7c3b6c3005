"""Exception types raised by the library."""


class FramenessError(Exception):
    """Base class for all domain errors."""


class EmptyState(FramenessError):
    """No weight survives the zero threshold."""


class NegativeWeight(FramenessError):
    """A raw weight is negative beyond tolerance."""


class SsrMismatch(FramenessError):
    """Operands belong to different superselection rules (or axes)."""


class CompletenessViolated(FramenessError):
    """Kraus amplitudes exceed the trace-nonincreasing bound on some label."""


class IllegalShift(FramenessError):
    """Shift direction or magnitude not allowed for the given SSR."""


class TriangleViolation(FramenessError):
    """Reduced matrix element outside the angular-momentum coupling range."""


class NotDensityMatrix(FramenessError):
    """Input is not Hermitian, positive semidefinite, and trace one."""


class NotAResource(FramenessError):
    """Operation requires a resource state (one not free under the SSR)."""


class MonotoneViolated(FramenessError):
    """Requested ensemble transformation would increase an ensemble monotone."""


class AuditFailed(FramenessError):
    """A monotonicity audit found a violating instance."""


class WindowExceeded(FramenessError):
    """Tensor-power support does not fit the configured label window."""


class ShiftDirectionUnavailable(FramenessError):
    """Alignment would require an upward shift that the SSR forbids."""


class TargetOutOfRange(FramenessError):
    """Requested average variance outside the reachable interval."""
