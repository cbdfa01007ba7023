"""Toolkit for multi-agent S5 with public announcements."""

from .syntax import (Announce, Atom, Bottom, Box, Implies, Sentence, parse,
                     to_text, is_static, closure, encode)
from .semantics import KripkeModel, PointedModel, evaluate, restrict
from .reduction import reduce
from .proof import check_proof, parse_proof
from .decide import valid, satisfiable

__all__ = [
    "Announce", "Atom", "Bottom", "Box", "Implies", "Sentence", "parse",
    "to_text", "is_static", "closure", "encode", "KripkeModel", "PointedModel",
    "evaluate", "restrict", "reduce", "check_proof", "parse_proof", "valid",
    "satisfiable",
]

__version__ = "0.1.0"
