"""Typecheckers, semantics and oracles for DCC and its variants DCC^d, DCC^dc and DCC^cd."""

from dcc.lattice import IndexLattice, load_lattice, make_indices
from dcc.parse import ParseError, parse_term, parse_type
from dcc.typecheck import CheckReport, System, TypingEnv, check

__all__ = [
    "CheckReport",
    "IndexLattice",
    "ParseError",
    "System",
    "TypingEnv",
    "check",
    "load_lattice",
    "make_indices",
    "parse_term",
    "parse_type",
]
