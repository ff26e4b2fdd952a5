"""Exception hierarchy shared by the solvers, the simulator and the CLI."""


class GigContractError(Exception):
    """Base class for all package errors."""


class DomainError(GigContractError, ValueError):
    """A parameter lies outside its admissible domain.

    ``field`` names the offending parameter so callers (the CLI in
    particular) can report it.
    """

    def __init__(self, field, value, requirement):
        self.field = field
        self.value = value
        self.requirement = requirement
        super().__init__(f"{field}={value!r} is invalid: must satisfy {requirement}")


class NoContract(GigContractError):
    """Operation needs an active contract but chi is false."""


class ParticipationViolated(GigContractError):
    """An offer below the worker's reference certainty equivalent was forced through."""


class PolicyRangeError(GigContractError):
    """A tabulated policy was queried at a reference it cannot cover."""


class QuadratureError(GigContractError, ValueError):
    """Invalid number of quadrature nodes."""


class NoConvergence(GigContractError):
    """Value iteration hit ``max_iter`` before reaching the tolerance.

    The last iterate is kept on the exception so it can still be inspected
    or written out.
    """

    def __init__(self, message, value=None, policy=None, report=None):
        super().__init__(message)
        self.value = value
        self.policy = policy
        self.report = report


class InvariantViolation(GigContractError):
    """An emitted record failed its own consistency check."""
