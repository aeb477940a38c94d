"""Exception hierarchy shared by all modules."""


class WeakRbfError(Exception):
    """Base class for every error raised by the package."""


class KernelDomainError(WeakRbfError, ValueError):
    """A kernel was evaluated at a negative radius."""


class SingularPointError(WeakRbfError, ValueError):
    """A kernel gradient was requested where it is undefined."""


class InvalidNodesError(WeakRbfError, ValueError):
    """Duplicate centers or centers outside the domain."""


class FactorizationError(WeakRbfError):
    """A saddle-point or mass matrix could not be factorized."""

    def __init__(self, message, condition=None):
        super().__init__(message)
        self.condition = condition


class QuadratureError(WeakRbfError):
    """An integrand returned a non-finite value."""


class StateError(WeakRbfError, ValueError):
    """A state is non-finite or physically invalid (e.g. negative pressure)."""


class BlowUpError(WeakRbfError):
    """Time integration produced a non-finite stage."""

    def __init__(self, message, t, stage, last_state):
        super().__init__(message)
        self.t = t
        self.stage = stage
        self.last_state = last_state


class OracleError(WeakRbfError):
    """An exact-solution oracle failed to converge."""


class ConfigError(WeakRbfError, ValueError):
    """A run configuration could not be validated."""
