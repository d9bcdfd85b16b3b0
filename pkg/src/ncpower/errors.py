"""Exception hierarchy shared across the package."""


class NCPowerError(Exception):
    """Base class for all errors raised by ncpower."""


class ParameterError(NCPowerError, ValueError):
    """An argument is outside its documented domain."""


class TopologyError(NCPowerError, ValueError):
    """A topology violates a structural invariant (self-loop, duplicate link, ...)."""


class ConnectivityError(NCPowerError):
    """The graph is disconnected or a destination is unreachable."""


class DemandError(NCPowerError, ValueError):
    """A demand matrix or demand file is malformed."""


class CapacityError(NCPowerError):
    """A link carries more traffic than its provisioned fibres allow."""


class InstanceTooLargeError(NCPowerError):
    """The exhaustive oracle refused an instance above its enumeration guard."""


class SolutionError(NCPowerError):
    """Base class for problems found while importing a solver solution."""


class MissingVariableError(SolutionError):
    pass


class IntegralityError(SolutionError):
    pass


class ConstraintViolationError(SolutionError):
    def __init__(self, violations):
        self.violations = list(violations)
        names = ", ".join(f"{name} (by {gap:.3g})" for name, gap in self.violations[:5])
        more = "" if len(self.violations) <= 5 else f" and {len(self.violations) - 5} more"
        super().__init__(f"constraint violation: {names}{more}")


class ObjectiveMismatchError(SolutionError):
    def __init__(self, reported: float, recomputed: float):
        self.reported = reported
        self.recomputed = recomputed
        self.gap = abs(reported - recomputed)
        super().__init__(
            f"objective mismatch: reported {reported:.10g}, recomputed {recomputed:.10g} "
            f"(gap {self.gap:.3g})"
        )
