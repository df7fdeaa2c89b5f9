"""Forms package."""

from .solve import SolveForm, ValidateForm

__all__ = [
    'SolveForm',
    'ValidateForm',
]
