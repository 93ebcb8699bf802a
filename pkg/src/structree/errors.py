"""Exception hierarchy.

Every failure that the command line maps to an exit code has its own class
here, so library callers can catch the same outcomes the CLI reports.
"""


class StructreeError(Exception):
    exit_code = 1


class InputError(StructreeError, ValueError):
    """Malformed graph, presentation or family specification."""

    exit_code = 2


class PresentationError(InputError):
    """A group presentation violates a group axiom.

    The message always names the violated axiom (``associativity``,
    ``identity``, ``inverse``, ``closure``, ``homomorphism``, ...).
    """

    def __init__(self, axiom, detail=""):
        self.axiom = axiom
        super().__init__(f"{axiom}: {detail}" if detail else axiom)


class NoCutFound(StructreeError):
    exit_code = 3

    def __init__(self, k_max):
        self.k_max = k_max
        super().__init__(f"no cut found up to k_max={k_max}")


class BudgetExhausted(StructreeError):
    exit_code = 3

    def __init__(self, budget):
        self.budget = budget
        super().__init__(f"separator budget exhausted ({budget} recursion nodes)")


class NoSplitting(StructreeError):
    """The group does not split over a finite subgroup (0 or 1 ends)."""

    exit_code = 4

    def __init__(self, reason, evidence=None):
        self.reason = reason
        self.evidence = evidence or {}
        super().__init__(f"no splitting: {reason}")


class IncreaseRadius(StructreeError):
    """The truncation is too small for a stable answer."""

    exit_code = 4

    def __init__(self, detail, evidence=None):
        self.evidence = evidence or {}
        super().__init__(f"increase radius: {detail}")


class Unverifiable(StructreeError):
    exit_code = 4

    def __init__(self, detail):
        super().__init__(f"unverifiable at desk scale: {detail}")


class InvariantViolation(StructreeError):
    """A theorem-level post-condition failed; carries a diagnostic payload."""

    exit_code = 5

    def __init__(self, message, diagnostic=None):
        self.diagnostic = diagnostic or {}
        super().__init__(message)
