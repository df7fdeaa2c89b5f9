"""Wall-clock budgets."""

import time


class Deadline:
    """A wall-clock budget started at construction."""

    def __init__(self, time_limit_ms=None):
        self.time_limit_ms = time_limit_ms
        self.start = time.perf_counter()

    @property
    def elapsed(self) -> float:
        """Elapsed milliseconds."""
        return (time.perf_counter() - self.start) * 1000

    @property
    def remaining(self) -> float:
        """Remaining milliseconds, infinite when unbounded."""
        if self.time_limit_ms is None:
            return float('inf')
        return max(self.time_limit_ms - self.elapsed, 0.0)

    @property
    def is_expired(self) -> bool:
        return self.time_limit_ms is not None and self.elapsed >= self.time_limit_ms

    def __repr__(self):
        return f'<Deadline {self.elapsed:.0f}/{self.time_limit_ms}ms>'
