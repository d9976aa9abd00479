"""
Exception hierarchy for the LPLDE toolkit
"""


class LpldeError(Exception):
    """Base class for every error raised by the toolkit"""


class InvalidSpecError(LpldeError, ValueError):
    """A ModelSpec violates one of its invariants"""


class OrderError(LpldeError, IndexError):
    """An expansion order index is out of range for the current state"""


class SecularCancellationError(LpldeError, ArithmeticError):
    """A cos(tau) component survived secular cancellation"""


class PmsUndefinedError(LpldeError, ValueError):
    """The closed-form PMS point is not real (mu < 0)"""


class RescaleError(LpldeError, ValueError):
    """Coupling rescaling between couplings of different sign or zero"""


class UnboundedMotionError(LpldeError, ValueError):
    """omega^2 + mu A^2 <= 0: the motion is not a bounded oscillation"""


class UnsupportedModulusError(LpldeError, ValueError):
    """The elliptic route was asked for a negative coupling"""


class IntegrationFailureError(LpldeError, RuntimeError):
    """The ODE integration did not find a half-period crossing"""


class SweepConfigError(LpldeError, ValueError):
    """A sweep configuration is invalid"""
