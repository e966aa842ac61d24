"""Grammar compression with RePair, MR-RePair and RL-MR-RePair."""

from .errors import CorruptStreamError, InvariantError, RagcError, UnsupportedError, UsageError
from .grammar import Grammar, Run, Sequence, Terminal, expand, grammar_size, validate

__version__ = "1.0.0"

__all__ = [
    "CorruptStreamError",
    "Grammar",
    "InvariantError",
    "RagcError",
    "Run",
    "Sequence",
    "Terminal",
    "UnsupportedError",
    "UsageError",
    "expand",
    "grammar_size",
    "validate",
]
