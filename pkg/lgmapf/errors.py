"""Exception hierarchy shared by the parsers, the solver and the harness."""


class MAPFError(Exception):
    """Base class for every error raised by lgmapf."""


class MapFormatError(MAPFError):
    """Malformed MovingAI map file."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f'line {line}: {message}'
        super().__init__(message)


class ScenarioError(MAPFError):
    """Scenario file that cannot produce a valid instance."""


class SolveFailure(MAPFError):
    """The search ended without a solution."""


class SolveTimeout(SolveFailure):
    """Deadline or node budget exhausted."""


class Unsolvable(SolveFailure):
    """Every reachable configuration was explored without reaching the goals."""
