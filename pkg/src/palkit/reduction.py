"""Announcement elimination by the four reduction equivalences.

    [!a]p        ==  a -> p
    [!a]false    ==  a -> false
    [!a](b -> c) ==  [!a]b -> [!a]c
    [!a][i]b     ==  a -> [i][!a]b

Reduction works innermost-first: children are made static before the
enclosing announcement is pushed through its (now static) body.  No
simplification is attempted, so outputs can be matched rule by rule.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .syntax import Announce, Atom, Bottom, Box, Implies, Sentence, is_static, to_text

__all__ = ["Rule", "RewriteStep", "rewrite_step", "reduce_announcement", "reduce"]


class Rule(Enum):
    ANN_ATOM = "AnnAtom"
    ANN_BOTTOM = "AnnBottom"
    ANN_IMPLY = "AnnImply"
    ANN_BOX = "AnnBox"


@dataclass(frozen=True)
class RewriteStep:
    rule: Rule
    input: Sentence
    output: Sentence


def rewrite_step(s: Sentence) -> RewriteStep | None:
    """Apply the one reduction rule matching ``s``, if any.

    Returns None unless ``s`` is an announcement whose body is an atom,
    falsum, an implication or a box.
    """
    if not isinstance(s, Announce):
        return None
    a, body = s.announced, s.body
    if isinstance(body, Atom):
        return RewriteStep(Rule.ANN_ATOM, s, Implies(a, body))
    if isinstance(body, Bottom):
        return RewriteStep(Rule.ANN_BOTTOM, s, Implies(a, body))
    if isinstance(body, Implies):
        return RewriteStep(Rule.ANN_IMPLY, s,
                           Implies(Announce(a, body.left), Announce(a, body.right)))
    if isinstance(body, Box):
        return RewriteStep(Rule.ANN_BOX, s, Implies(a, Box(body.agent, Announce(a, body.body))))
    return None


def _push(s: Sentence) -> Sentence:
    # every announcement left in a rule output has a strictly smaller body
    if isinstance(s, Announce):
        return reduce_announcement(s.announced, s.body)
    if isinstance(s, Implies):
        return Implies(_push(s.left), _push(s.right))
    if isinstance(s, Box):
        return Box(s.agent, _push(s.body))
    return s


def reduce_announcement(announced: Sentence, body: Sentence) -> Sentence:
    """Static equivalent of ``[!announced]body`` for static arguments."""
    if not (is_static(announced) and is_static(body)):
        raise ValueError(f"reduce_announcement needs static arguments: "
                         f"[! {to_text(announced)}] {to_text(body)}")
    step = rewrite_step(Announce(announced, body))
    return _push(step.output)


def reduce(s: Sentence) -> Sentence:
    """Announcement-free sentence equivalent to ``s``."""
    if isinstance(s, Implies):
        return Implies(reduce(s.left), reduce(s.right))
    if isinstance(s, Box):
        return Box(s.agent, reduce(s.body))
    if isinstance(s, Announce):
        return reduce_announcement(reduce(s.announced), reduce(s.body))
    return s
