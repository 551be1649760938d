"""Exception hierarchy shared by the library and the CLI."""

from __future__ import annotations

from typing import Sequence


class ExtformError(ValueError):
    """Base class for every error raised by csp_extform."""


class FormatError(ExtformError):
    """Malformed input text (instance JSON, TD file, graph file, rational)."""


class InstanceError(ExtformError):
    """An instance failed validation."""

    def __init__(self, issues: Sequence[object]) -> None:
        self.issues = list(issues)
        listed = "; ".join(str(i) for i in self.issues[:5])
        more = f" (+{len(self.issues) - 5} more)" if len(self.issues) > 5 else ""
        super().__init__(f"Invalid instance: {listed}{more}")


class DomainViolation(ExtformError):
    """An assignment uses a value outside a variable's domain."""


class InfeasibleAssignment(ExtformError):
    """An assignment violates a hard constraint."""


class ScopeNotCovered(ExtformError):
    """A constraint scope is contained in no bag of the decomposition."""


class ConfigLimitExceeded(ExtformError):
    """Formulation generation passed the --max-configs guard."""


class NonIntegralInput(ExtformError):
    """proj1 was given a fractional (y, g) point."""


class InfeasibleInput(ExtformError):
    """A point handed to the decomposition violates a constraint of the model."""


class SolverError(ExtformError):
    """The simplex hit its pivot ceiling or broke an internal invariant."""


class CapExceeded(ExtformError):
    """Brute force would enumerate more assignments than the configured cap."""


class UnknownProblem(ExtformError):
    """The reduce command was given a problem name it does not know."""


class DecompositionError(ExtformError):
    """A supplied tree decomposition is not valid for the instance's constraint graph."""

    def __init__(self, issues: Sequence[object]) -> None:
        self.issues = list(issues)
        listed = "; ".join(str(i) for i in self.issues[:5])
        super().__init__(f"Invalid tree decomposition: {listed}")
