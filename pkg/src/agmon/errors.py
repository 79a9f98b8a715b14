"""Exception hierarchy.

Every error raised by the package derives from :class:`AgmonError`. The
CLI maps :class:`InputError` subclasses to exit code 2 and
:class:`NumericalError` subclasses to exit code 3.
"""


class AgmonError(Exception):
    pass


class InputError(AgmonError, ValueError):
    """Malformed or inconsistent user input."""


class NumericalError(AgmonError, ArithmeticError):
    """A numerical routine failed to meet its contract."""


# graph validation ---------------------------------------------------------

class GraphError(InputError):
    def __init__(self, message, vertex=None, edge=None):
        super().__init__(message)
        self.vertex = vertex
        self.edge = edge


class AsymmetricAdjacency(GraphError):
    pass


class SelfLoop(GraphError):
    pass


class DuplicateEdge(GraphError):
    pass


class Disconnected(GraphError):
    pass


class IsolatedVertex(GraphError):
    pass


class SizeTooSmall(InputError):
    pass


class RetriesExhausted(AgmonError):
    pass


class ParseError(InputError):
    pass


class SchemaViolation(InputError):
    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class SizeMismatch(InputError):
    pass


# spectral -----------------------------------------------------------------

class SizeCapExceeded(InputError):
    pass


class ConvergenceFailure(NumericalError):
    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class ZeroVector(InputError):
    pass


# metric / bounds / stochastic ---------------------------------------------

class EmptyAllowedRegion(AgmonError):
    """No vertex satisfies W(v) <= E.

    ``field`` carries the (all-infinite) result so callers can still
    report it.
    """

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class TargetNotAllowed(InputError):
    pass


class EnergyMismatch(InputError):
    pass


class StartNotForbidden(InputError):
    pass


class ZeroAmplitudeStart(InputError):
    pass


class NoForbiddenRegion(AgmonError):
    pass


class StepCapExceeded(NumericalError):
    def __init__(self, message, vertices=()):
        super().__init__(message)
        self.vertices = tuple(vertices)
