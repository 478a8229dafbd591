"""Exception hierarchy shared by every module."""


class FortressError(Exception):
    """Base class for all toolkit errors."""


class AlphabetError(FortressError, ValueError):
    """Inconsistent event flags or duplicate event names."""


class AutomatonError(FortressError, ValueError):
    """Malformed automaton: unknown state, nondeterminism, bad labels."""


class SizeLimitError(FortressError):
    """A construction exceeded its configured size cap."""

    def __init__(self, stage, limit, what="states"):
        self.stage = stage
        self.limit = limit
        self.what = what
        super().__init__(f"{stage}: more than {limit} {what} (size cap exceeded)")


class InvalidSupervisorError(FortressError, ValueError):
    """Supervisor violates controllability or observability."""


class AttackerError(FortressError, ValueError):
    """Attacker automaton violates A-controllability or A-observability."""


class ExtractionError(FortressError):
    """A reachable control state offers no command to pick."""


class ConstraintError(FortressError, ValueError):
    """Control constraint with controllable symbols that are not observable."""


class ProjectFormatError(FortressError, ValueError):
    """Project or artifact file could not be parsed or validated."""


class ConsistencyError(FortressError):
    """An internal cross-check failed (e.g. extracted supervisor not fortified)."""
