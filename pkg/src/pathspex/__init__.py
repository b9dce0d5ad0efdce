"""Spectral-extremal join graphs that avoid path-like patterns."""

from .errors import (
    BudgetExceeded,
    InvalidEdit,
    InvalidInput,
    MissingPart,
    NonConvergence,
    PathspexError,
    TooLarge,
    UnsupportedCase,
    UnsupportedVariant,
)
from .graphcore import Graph, JoinSpec, PathPartition, Pattern, parse_pattern, realize

__version__ = "0.1.0"
