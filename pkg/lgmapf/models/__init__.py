"""Database models package."""

from .run import BenchmarkRun

__all__ = [
    'BenchmarkRun',
]
