"""Hilbert-style proof terms for multi-agent S5 and their checker.

Seven axiom schemas (S1, S2, S3, Distr, Ref, Trans, Sym) and two rules
(MP, Truth) form the core; S2', S3', Conjmp and the Conj/Conjl/Conjr/
Uncurry/Curry rules are propositional conveniences.  Every axiom node
carries its full instantiation, so checking is a plain bottom-up pass with
no unification.

Text format (s-expressions, formulas as quoted strings, agents bare)::

    (mp (mp (ax2 "p" "p -> p" "p") (ax1 "p" "p -> p")) (ax1 "p" "p"))
    (truth a (ref a "p"))
    (conj PROOF ("p" "q") ("q" "r" "p") "s")
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, fields
from typing import Iterable, Sequence

from .semantics import PointedModel, batches
from .syntax import (Box, Implies, Sentence, conj, conj_list, neg, parse,
                     split_conj, to_text)

__all__ = [
    "ProofTerm", "Ax1", "Ax2", "Ax3", "Distr", "Ref", "Trans", "Sym", "Ax2p",
    "Ax3p", "Conjmp", "Mp", "Truth", "Conj", "Conjl", "Conjr", "Uncurry",
    "Curry", "AXIOMS", "RULES", "ProofError", "Judgment", "instantiate_axiom",
    "check_proof", "verifies", "SoundnessReport", "soundness_check",
    "parse_proof", "proof_to_text", "id_provable",
]


class ProofTerm:
    __slots__ = ()


# Axiom leaves -------------------------------------------------------------

@dataclass(frozen=True)
class Ax1(ProofTerm):
    phi: Sentence
    psi: Sentence


@dataclass(frozen=True)
class Ax2(ProofTerm):
    phi: Sentence
    psi: Sentence
    gamma: Sentence


@dataclass(frozen=True)
class Ax3(ProofTerm):
    phi: Sentence


@dataclass(frozen=True)
class Distr(ProofTerm):
    agent: str
    phi: Sentence
    psi: Sentence


@dataclass(frozen=True)
class Ref(ProofTerm):
    agent: str
    phi: Sentence


@dataclass(frozen=True)
class Trans(ProofTerm):
    agent: str
    phi: Sentence


@dataclass(frozen=True)
class Sym(ProofTerm):
    agent: str
    phi: Sentence


@dataclass(frozen=True)
class Ax2p(ProofTerm):
    phi: Sentence


@dataclass(frozen=True)
class Ax3p(ProofTerm):
    phi: Sentence
    psi: Sentence


@dataclass(frozen=True)
class Conjmp(ProofTerm):
    phi: Sentence
    psi: Sentence


# Rules --------------------------------------------------------------------

@dataclass(frozen=True)
class Mp(ProofTerm):
    major: ProofTerm
    minor: ProofTerm


@dataclass(frozen=True)
class Truth(ProofTerm):
    agent: str
    premise: ProofTerm


@dataclass(frozen=True)
class Conj(ProofTerm):
    premise: ProofTerm
    from_list: tuple[Sentence, ...]
    to_list: tuple[Sentence, ...]
    psi: Sentence

    def __post_init__(self):
        object.__setattr__(self, "from_list", tuple(self.from_list))
        object.__setattr__(self, "to_list", tuple(self.to_list))


@dataclass(frozen=True)
class Conjl(ProofTerm):
    premise: ProofTerm
    psi: Sentence


@dataclass(frozen=True)
class Conjr(ProofTerm):
    premise: ProofTerm
    phi: Sentence


@dataclass(frozen=True)
class Uncurry(ProofTerm):
    premise: ProofTerm


@dataclass(frozen=True)
class Curry(ProofTerm):
    premise: ProofTerm


AXIOMS = (Ax1, Ax2, Ax3, Distr, Ref, Trans, Sym, Ax2p, Ax3p, Conjmp)
RULES = (Mp, Truth, Conj, Conjl, Conjr, Uncurry, Curry)


# ---------------------------------------------------------------------------

class ProofError(ValueError):
    """A rule was applied to a premise of the wrong shape."""

    def __init__(self, rule: str, term: ProofTerm, expected: str, found: Sentence | None):
        self.rule = rule
        self.term = term
        self.expected = expected
        self.found = found
        shown = to_text(found) if found is not None else "nothing"
        super().__init__(f"{rule}: expected {expected}, found {shown} "
                         f"in {proof_to_text(term)}")


@dataclass(frozen=True)
class Judgment:
    conclusion: Sentence

    def __str__(self):
        return "|- " + to_text(self.conclusion)


def _imp(*parts: Sentence) -> Sentence:
    acc = parts[-1]
    for p in reversed(parts[:-1]):
        acc = Implies(p, acc)
    return acc


def instantiate_axiom(node: ProofTerm) -> Sentence:
    match node:
        case Ax1(phi, psi):
            return _imp(phi, psi, phi)
        case Ax2(phi, psi, gamma):
            return _imp(_imp(phi, psi, gamma), _imp(phi, psi), _imp(phi, gamma))
        case Ax3(phi):
            return Implies(neg(neg(phi)), phi)
        case Distr(i, phi, psi):
            return _imp(Box(i, Implies(phi, psi)), Box(i, phi), Box(i, psi))
        case Ref(i, phi):
            return Implies(Box(i, phi), phi)
        case Trans(i, phi):
            # as tabulated: [i][i]phi -> [i]phi
            return Implies(Box(i, Box(i, phi)), Box(i, phi))
        case Sym(i, phi):
            return Implies(neg(Box(i, phi)), Box(i, neg(Box(i, phi))))
        case Ax2p(phi):
            return Implies(phi, neg(neg(phi)))
        case Ax3p(phi, psi):
            return _imp(Implies(phi, psi), Implies(neg(phi), psi), psi)
        case Conjmp(phi, psi):
            return Implies(conj(Implies(phi, psi), phi), psi)
    raise TypeError(f"not an axiom node: {node!r}")


def _implication(rule: str, term: ProofTerm, s: Sentence, what: str) -> tuple[Sentence, Sentence]:
    if not isinstance(s, Implies):
        raise ProofError(rule, term, what, s)
    return s.left, s.right


def _is_submultiset(small: Sequence[Sentence], big: Sequence[Sentence]) -> bool:
    need = Counter(small)
    have = Counter(big)
    return all(have[k] >= c for k, c in need.items())


def check_proof(t: ProofTerm) -> Judgment:
    """Compute the conclusion of ``t``, raising :class:`ProofError` on misuse."""
    return Judgment(_conclude(t))


def _conclude(t: ProofTerm) -> Sentence:
    if isinstance(t, AXIOMS):
        return instantiate_axiom(t)
    if isinstance(t, Mp):
        major = _conclude(t.major)
        minor = _conclude(t.minor)
        ante, cons = _implication("mp", t, major, "an implication as major premise")
        if ante != minor:
            raise ProofError("mp", t, f"minor premise {to_text(ante)}", minor)
        return cons
    if isinstance(t, Truth):
        return Box(t.agent, _conclude(t.premise))
    if isinstance(t, Conjl):
        ante, cons = _implication("conjl", t, _conclude(t.premise), "phi -> gamma")
        return Implies(conj(ante, t.psi), cons)
    if isinstance(t, Conjr):
        ante, cons = _implication("conjr", t, _conclude(t.premise), "psi -> gamma")
        return Implies(conj(t.phi, ante), cons)
    if isinstance(t, Uncurry):
        prem = _conclude(t.premise)
        a, rest = _implication("uncurry", t, prem, "phi -> psi -> gamma")
        b, c = _implication("uncurry", t, rest, "phi -> psi -> gamma")
        return Implies(conj(a, b), c)
    if isinstance(t, Curry):
        prem = _conclude(t.premise)
        ante, c = _implication("curry", t, prem, "phi & psi -> gamma")
        parts = split_conj(ante)
        if parts is None:
            raise ProofError("curry", t, "phi & psi -> gamma", prem)
        return _imp(parts[0], parts[1], c)
    if isinstance(t, Conj):
        if not t.from_list or not t.to_list:
            raise ProofError("conj", t, "nonempty conjunction lists", None)
        if not _is_submultiset(t.from_list, t.to_list):
            raise ProofError("conj", t, "from-list contained in to-list", conj_list(t.from_list))
        want = Implies(conj_list(t.from_list), t.psi)
        prem = _conclude(t.premise)
        if prem != want:
            raise ProofError("conj", t, to_text(want), prem)
        return Implies(conj_list(t.to_list), t.psi)
    raise TypeError(f"not a proof term: {t!r}")


def verifies(t: ProofTerm, phi: Sentence) -> bool:
    """True iff ``t`` checks and concludes exactly ``phi``."""
    try:
        return check_proof(t).conclusion == phi
    except ProofError:
        return False


def id_provable(phi: Sentence) -> ProofTerm:
    """The five-node proof of ``phi -> phi``."""
    pp = Implies(phi, phi)
    return Mp(Mp(Ax2(phi, pp, phi), Ax1(phi, pp)), Ax1(phi, phi))


# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SoundnessReport:
    conclusion: Sentence
    checked: int
    falsifier: PointedModel | None

    @property
    def ok(self) -> bool:
        return self.falsifier is None


def soundness_check(t: ProofTerm, models: Iterable[PointedModel]) -> SoundnessReport:
    """Evaluate the conclusion of ``t`` at every pointed model."""
    phi = check_proof(t).conclusion
    pointed = list(models)
    distinct = {id(pm.model): pm.model for pm in pointed}
    truth = {}
    for batch in batches(distinct.values()):
        values = batch.truth(phi)
        for k, m in enumerate(batch.models):
            truth[id(m)] = values[k]
    for pm in pointed:
        if not truth[id(pm.model)][pm.point]:
            return SoundnessReport(phi, len(pointed), pm)
    return SoundnessReport(phi, len(pointed), None)


# ---------------------------------------------------------------------------
# Text format

_NAMES = {
    "ax1": Ax1, "ax2": Ax2, "ax3": Ax3, "distr": Distr, "ref": Ref,
    "trans": Trans, "sym": Sym, "ax2p": Ax2p, "ax3p": Ax3p, "conjmp": Conjmp,
    "mp": Mp, "truth": Truth, "conj": Conj, "conjl": Conjl, "conjr": Conjr,
    "uncurry": Uncurry, "curry": Curry,
}
_ALIASES = {"s1": "ax1", "s2": "ax2", "s3": "ax3", "ax2'": "ax2p", "ax3'": "ax3p",
            "s2'": "ax2p", "s3'": "ax3p"}
_TAG = {cls: name for name, cls in _NAMES.items()}

_SEXP_RE = re.compile(r"""
    (?P<ws>\s+|[;\#][^\n]*)
  | (?P<open>\()
  | (?P<close>\))
  | (?P<str>"(?:[^"\\]|\\.)*")
  | (?P<sym>[^\s()"]+)
""", re.VERBOSE)


class _Str(str):
    pass


def _read_sexp(text: str):
    stack: list[list] = [[]]
    pos = 0
    while pos < len(text):
        m = _SEXP_RE.match(text, pos)
        if m is None:
            raise ValueError(f"proof text: bad character at offset {pos}")
        kind = m.lastgroup
        if kind == "open":
            stack.append([])
        elif kind == "close":
            if len(stack) == 1:
                raise ValueError(f"proof text: unbalanced ')' at offset {pos}")
            done = stack.pop()
            stack[-1].append(done)
        elif kind == "str":
            stack[-1].append(_Str(re.sub(r"\\(.)", r"\1", m.group()[1:-1])))
        elif kind == "sym":
            stack[-1].append(m.group())
        pos = m.end()
    if len(stack) != 1:
        raise ValueError("proof text: missing ')'")
    if len(stack[0]) != 1:
        raise ValueError(f"proof text: expected one term, found {len(stack[0])}")
    return stack[0][0]


def parse_proof(text: str) -> ProofTerm:
    return _build(_read_sexp(text))


def _formula(x) -> Sentence:
    if not isinstance(x, _Str):
        raise ValueError(f"expected a quoted formula, found {x!r}")
    return parse(x)


def _agent(x) -> str:
    if not isinstance(x, str) or isinstance(x, _Str) or x.startswith("("):
        raise ValueError(f"expected an agent name, found {x!r}")
    return x


def _formulas(x) -> tuple[Sentence, ...]:
    if not isinstance(x, list):
        raise ValueError(f"expected a parenthesised formula list, found {x!r}")
    return tuple(_formula(f) for f in x)


def _build(node) -> ProofTerm:
    if not isinstance(node, list) or not node or isinstance(node[0], (list, _Str)):
        raise ValueError(f"expected (RULE ...), found {node!r}")
    head = _ALIASES.get(node[0].lower(), node[0].lower())
    cls = _NAMES.get(head)
    if cls is None:
        raise ValueError(f"unknown proof rule {node[0]!r}")
    args = node[1:]
    arity = len(fields(cls))
    if len(args) != arity:
        raise ValueError(f"{head} takes {arity} arguments, got {len(args)}")
    built = []
    for f, arg in zip(fields(cls), args):
        if f.name == "agent":
            built.append(_agent(arg))
        elif f.name in ("premise", "major", "minor"):
            built.append(_build(arg))
        elif f.name in ("from_list", "to_list"):
            built.append(_formulas(arg))
        else:
            built.append(_formula(arg))
    return cls(*built)


def _quote(s: Sentence) -> str:
    return '"' + to_text(s).replace("\\", "\\\\").replace('"', '\\"') + '"'


def proof_to_text(t: ProofTerm) -> str:
    parts = [_TAG.get(type(t), type(t).__name__.lower())]
    for f in fields(t):
        v = getattr(t, f.name)
        if isinstance(v, ProofTerm):
            parts.append(proof_to_text(v))
        elif isinstance(v, Sentence):
            parts.append(_quote(v))
        elif isinstance(v, tuple):
            parts.append("(" + " ".join(_quote(s) for s in v) + ")")
        else:
            parts.append(str(v))
    return "(" + " ".join(parts) + ")"
