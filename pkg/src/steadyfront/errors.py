"""Exception types raised by the solver and verifier."""


class DomainError(ValueError):
    """A gas state outside the physical domain (p <= 0 or rho <= 0)."""


class NotHyperbolicError(ValueError):
    """The state is not supersonic in the x-direction (u <= c)."""


class CurveRangeError(ValueError):
    """A wave curve was evaluated outside its local validity region."""


class RiemannRangeError(RuntimeError):
    """Riemann data out of local range, or the root solve failed."""


class ConsistencyError(ValueError):
    """Two states are not connected by the claimed elementary wave."""


class InvariantViolation(RuntimeError):
    """The front configuration broke an ordering or structural invariant."""


class EventCeilingError(RuntimeError):
    """The event loop exceeded its configured ceiling."""


class GeometryError(ValueError):
    """Degenerate cell geometry in the weak-form quadrature."""
