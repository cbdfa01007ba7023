"""PAL sentences: constructors, parsing, printing and structural utilities.

Only five constructors exist (atoms, falsum, implication, agent boxes and
announcements).  Negation, conjunction, disjunction, truth and the diamond
are shorthands that expand into these on construction, so every other
module only ever pattern-matches the five primitive shapes.

Concrete grammar, loosest binding first::

    formula  := disj ( "->" formula )?          right associative
    disj     := conj ( "|" disj )?              right associative
    conj     := unary ( "&" conj )?             right associative
    unary    := "~" unary | "[" AGENT "]" unary | "<" AGENT ">" unary
              | "[!" formula "]" unary | primary
    primary  := ATOM | "false" | "true" | "(" formula ")"

Identifiers match ``[A-Za-z_][A-Za-z0-9_']*``; ``#`` starts a comment that
runs to the end of the line.
"""

from __future__ import annotations

import itertools
import math
import random
import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

__all__ = [
    "Sentence", "Atom", "Bottom", "Implies", "Box", "Announce", "BOTTOM",
    "neg", "top", "conj", "disj", "diamond", "conj_list", "is_negation",
    "negated", "complement", "split_conj",
    "ParseError", "parse", "to_text", "is_static", "subformulas", "closure",
    "size", "depth", "announcement_depth", "atoms_of", "agents_of",
    "SymbolTable", "EncodingOverflow", "encode", "decode", "pair", "unpair",
    "enumerate_sentences", "random_sentence",
]


# ---------------------------------------------------------------------------
# Sentence trees

class Sentence:
    """Base class of the five PAL constructors.

    Instances are immutable and hash in O(1) (the hash is computed once at
    construction), which matters because closures and Hintikka atoms are
    sets of sentences.
    """

    __slots__ = ()

    def __str__(self) -> str:
        return to_text(self)


def _cache_hash(obj, *parts) -> None:
    object.__setattr__(obj, "_hash", hash(parts))


@dataclass(frozen=True, eq=True, repr=False, slots=True)
class Atom(Sentence):
    name: str
    _hash: int = field(init=False, compare=False, default=0)

    def __post_init__(self):
        _cache_hash(self, "atom", self.name)

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Atom({self.name!r})"


@dataclass(frozen=True, eq=True, repr=False, slots=True)
class Bottom(Sentence):
    _hash: int = field(init=False, compare=False, default=0)

    def __post_init__(self):
        _cache_hash(self, "bottom")

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return "Bottom()"


@dataclass(frozen=True, eq=True, repr=False, slots=True)
class Implies(Sentence):
    left: Sentence
    right: Sentence
    _hash: int = field(init=False, compare=False, default=0)

    def __post_init__(self):
        _cache_hash(self, "imp", self.left._hash, self.right._hash)

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Implies({self.left!r}, {self.right!r})"


@dataclass(frozen=True, eq=True, repr=False, slots=True)
class Box(Sentence):
    agent: str
    body: Sentence
    _hash: int = field(init=False, compare=False, default=0)

    def __post_init__(self):
        _cache_hash(self, "box", self.agent, self.body._hash)

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Box({self.agent!r}, {self.body!r})"


@dataclass(frozen=True, eq=True, repr=False, slots=True)
class Announce(Sentence):
    announced: Sentence
    body: Sentence
    _hash: int = field(init=False, compare=False, default=0)

    def __post_init__(self):
        _cache_hash(self, "ann", self.announced._hash, self.body._hash)

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Announce({self.announced!r}, {self.body!r})"


BOTTOM = Bottom()


# ---------------------------------------------------------------------------
# Derived connectives (pure expansions)

def neg(s: Sentence) -> Sentence:
    return Implies(s, BOTTOM)


def top() -> Sentence:
    return neg(BOTTOM)


def conj(a: Sentence, b: Sentence) -> Sentence:
    return neg(Implies(a, neg(b)))


def disj(a: Sentence, b: Sentence) -> Sentence:
    return Implies(neg(a), b)


def diamond(agent: str, s: Sentence) -> Sentence:
    return neg(Box(agent, neg(s)))


def conj_list(items: Sequence[Sentence]) -> Sentence:
    """Right fold of binary conjunction over a nonempty list."""
    if not items:
        raise ValueError("conjunction of an empty list")
    acc = items[-1]
    for item in reversed(items[:-1]):
        acc = conj(item, acc)
    return acc


def is_negation(s: Sentence) -> bool:
    return isinstance(s, Implies) and isinstance(s.right, Bottom)


def negated(s: Sentence) -> Sentence | None:
    """Return chi when ``s`` is ``~chi``, else None."""
    return s.left if is_negation(s) else None


def complement(s: Sentence) -> Sentence:
    """The closure partner of ``s``: strip one negation or add one."""
    return s.left if is_negation(s) else neg(s)


def split_conj(s: Sentence) -> tuple[Sentence, Sentence] | None:
    """Return (a, b) when ``s`` is the expansion of ``a & b``."""
    inner = negated(s)
    if isinstance(inner, Implies):
        b = negated(inner.right)
        if b is not None:
            return inner.left, b
    return None


# ---------------------------------------------------------------------------
# Lexer / parser

class ParseError(ValueError):
    """Syntax error carrying a 0-based character offset into the input."""

    def __init__(self, message: str, text: str = "", pos: int = 0):
        self.pos = pos
        self.text = text
        line = text.count("\n", 0, pos) + 1
        col = pos - (text.rfind("\n", 0, pos) + 1) + 1
        super().__init__(f"{message} at line {line}, column {col}")


_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+|\#[^\n]*)
  | (?P<arrow>->)
  | (?P<annopen>\[\s*!)
  | (?P<punct>[\[\]<>()&|~])
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
""", re.VERBOSE)

_KEYWORDS = {"false", "true"}


@dataclass(frozen=True)
class _Tok:
    kind: str
    value: str
    pos: int


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unknown token {text[pos]!r}", text, pos)
        kind = m.lastgroup
        if kind != "ws":
            value = m.group()
            if kind == "punct":
                kind = value
            elif kind == "arrow":
                kind = "->"
            elif kind == "annopen":
                kind = "[!"
            toks.append(_Tok(kind, value, pos))
        pos = m.end()
    toks.append(_Tok("eof", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self) -> _Tok:
        return self.toks[self.i]

    def take(self, kind: str) -> _Tok:
        tok = self.peek()
        if tok.kind != kind:
            found = "end of input" if tok.kind == "eof" else repr(tok.value)
            raise ParseError(f"expected {kind!r}, found {found}", self.text, tok.pos)
        self.i += 1
        return tok

    def formula(self) -> Sentence:
        left = self.disj()
        if self.peek().kind == "->":
            self.i += 1
            return Implies(left, self.formula())
        return left

    def disj(self) -> Sentence:
        left = self.conj()
        if self.peek().kind == "|":
            self.i += 1
            return disj(left, self.disj())
        return left

    def conj(self) -> Sentence:
        left = self.unary()
        if self.peek().kind == "&":
            self.i += 1
            return conj(left, self.conj())
        return left

    def agent(self) -> str:
        tok = self.take("ident")
        if tok.value in _KEYWORDS:
            raise ParseError(f"keyword {tok.value!r} used as agent name", self.text, tok.pos)
        return tok.value

    def unary(self) -> Sentence:
        tok = self.peek()
        if tok.kind == "~":
            self.i += 1
            return neg(self.unary())
        if tok.kind == "[":
            self.i += 1
            a = self.agent()
            self.take("]")
            return Box(a, self.unary())
        if tok.kind == "<":
            self.i += 1
            a = self.agent()
            self.take(">")
            return diamond(a, self.unary())
        if tok.kind == "[!":
            self.i += 1
            announced = self.formula()
            self.take("]")
            return Announce(announced, self.unary())
        return self.primary()

    def primary(self) -> Sentence:
        tok = self.peek()
        if tok.kind == "ident":
            self.i += 1
            if tok.value == "false":
                return BOTTOM
            if tok.value == "true":
                return top()
            return Atom(tok.value)
        if tok.kind == "(":
            self.i += 1
            inner = self.formula()
            self.take(")")
            return inner
        found = "end of input" if tok.kind == "eof" else repr(tok.value)
        raise ParseError(f"expected a formula, found {found}", self.text, tok.pos)


def parse(text: str) -> Sentence:
    """Parse formula text into a sentence tree.

    >>> parse("p -> q -> p") == Implies(Atom("p"), Implies(Atom("q"), Atom("p")))
    True
    """
    p = _Parser(text)
    result = p.formula()
    p.take("eof")
    return result


# ---------------------------------------------------------------------------
# Printer

_IMP, _PREFIX = 1, 3


def _level(s: Sentence) -> int:
    if isinstance(s, Implies) and not is_negation(s):
        return _IMP
    return _PREFIX


def _wrap(s: Sentence, minimum: int) -> str:
    text = to_text(s)
    return f"({text})" if _level(s) < minimum else text


def _diamond_parts(s: Sentence) -> tuple[str, Sentence] | None:
    inner = negated(s)
    if isinstance(inner, Box):
        body = negated(inner.body)
        if body is not None:
            return inner.agent, body
    return None


def to_text(s: Sentence) -> str:
    """Minimally parenthesised text; ``parse(to_text(s)) == s``.

    ``chi -> false`` prints as ``~chi`` and ``~[i]~chi`` as ``<i>chi``.
    """
    if isinstance(s, Atom):
        return s.name
    if isinstance(s, Bottom):
        return "false"
    if isinstance(s, Implies):
        dia = _diamond_parts(s)
        if dia is not None:
            return f"<{dia[0]}>{_wrap(dia[1], _PREFIX)}"
        if is_negation(s):
            return "~" + _wrap(s.left, _PREFIX)
        return f"{_wrap(s.left, _IMP + 1)} -> {to_text(s.right)}"
    if isinstance(s, Box):
        return f"[{s.agent}]{_wrap(s.body, _PREFIX)}"
    if isinstance(s, Announce):
        return f"[! {to_text(s.announced)}] {_wrap(s.body, _PREFIX)}"
    raise TypeError(f"not a sentence: {s!r}")


# ---------------------------------------------------------------------------
# Structural predicates

def _children(s: Sentence) -> tuple[Sentence, ...]:
    if isinstance(s, Implies):
        return (s.left, s.right)
    if isinstance(s, Box):
        return (s.body,)
    if isinstance(s, Announce):
        return (s.announced, s.body)
    return ()


def is_static(s: Sentence) -> bool:
    """True iff no announcement occurs anywhere in ``s``."""
    stack = [s]
    while stack:
        node = stack.pop()
        if isinstance(node, Announce):
            return False
        stack.extend(_children(node))
    return True


def size(s: Sentence) -> int:
    return 1 + sum(size(c) for c in _children(s))


def depth(s: Sentence) -> int:
    kids = _children(s)
    return 1 + (max(depth(c) for c in kids) if kids else 0)


def announcement_depth(s: Sentence) -> int:
    """Maximal nesting of announcement operators along any branch."""
    inner = max((announcement_depth(c) for c in _children(s)), default=0)
    return inner + 1 if isinstance(s, Announce) else inner


def atoms_of(s: Sentence) -> set[str]:
    if isinstance(s, Atom):
        return {s.name}
    return set().union(*(atoms_of(c) for c in _children(s)))


def agents_of(s: Sentence) -> set[str]:
    found = {s.agent} if isinstance(s, Box) else set()
    return found.union(*(agents_of(c) for c in _children(s)))


def subformulas(s: Sentence) -> set[Sentence]:
    out: set[Sentence] = set()
    stack = [s]
    while stack:
        node = stack.pop()
        if node not in out:
            out.add(node)
            stack.extend(_children(node))
    return out


def closure(s: Sentence) -> frozenset[Sentence]:
    """Subformulas of ``s`` plus one negation of each non-negated member.

    Negations are never stacked: ``~chi`` already in the set is treated as
    the partner of ``chi`` and gets no ``~~chi``.  Every member therefore has
    its :func:`complement` in the result.
    """
    if not is_static(s):
        raise ValueError(f"closure needs a static sentence, got {to_text(s)}")
    subs = subformulas(s)
    return frozenset(subs | {neg(c) for c in subs if not is_negation(c)})


# ---------------------------------------------------------------------------
# Natural-number encoding

def pair(a: int, b: int) -> int:
    return (a + b) * (a + b + 1) // 2 + b


def unpair(z: int) -> tuple[int, int]:
    w = (math.isqrt(8 * z + 1) - 1) // 2
    b = z - w * (w + 1) // 2
    return w - b, b


class EncodingOverflow(OverflowError):
    pass


class SymbolTable:
    """Interns atom and agent names to small indices in first-seen order."""

    def __init__(self, atoms: Iterable[str] = (), agents: Iterable[str] = ()):
        self.atoms: list[str] = []
        self.agents: list[str] = []
        self._atom_ix: dict[str, int] = {}
        self._agent_ix: dict[str, int] = {}
        for a in atoms:
            self.atom_index(a)
        for a in agents:
            self.agent_index(a)

    def atom_index(self, name: str) -> int:
        if name not in self._atom_ix:
            self._atom_ix[name] = len(self.atoms)
            self.atoms.append(name)
        return self._atom_ix[name]

    def agent_index(self, name: str) -> int:
        if name not in self._agent_ix:
            self._agent_ix[name] = len(self.agents)
            self.agents.append(name)
        return self._agent_ix[name]


def encode(s: Sentence, symbols: SymbolTable | None = None,
           max_bits: int | None = None) -> int:
    """Injective Cantor-pairing code of ``s``.

    Names are interned into ``symbols`` (a fresh table when omitted, so codes
    are only comparable across calls sharing a table).  ``max_bits`` bounds
    the result; exceeding it raises :class:`EncodingOverflow`.
    """
    if symbols is None:
        symbols = SymbolTable()

    def go(node: Sentence) -> int:
        if isinstance(node, Atom):
            code = pair(0, symbols.atom_index(node.name))
        elif isinstance(node, Bottom):
            code = pair(1, 0)
        elif isinstance(node, Implies):
            code = pair(2, pair(go(node.left), go(node.right)))
        elif isinstance(node, Box):
            code = pair(3, pair(symbols.agent_index(node.agent), go(node.body)))
        elif isinstance(node, Announce):
            code = pair(4, pair(go(node.announced), go(node.body)))
        else:
            raise TypeError(f"not a sentence: {node!r}")
        if max_bits is not None and code.bit_length() > max_bits:
            raise EncodingOverflow(f"code exceeds {max_bits} bits")
        return code

    return go(s)


def decode(code: int, symbols: SymbolTable) -> Sentence:
    tag, payload = unpair(code)
    if tag == 0:
        return Atom(symbols.atoms[payload])
    if tag == 1 and payload == 0:
        return BOTTOM
    if tag == 2:
        a, b = unpair(payload)
        return Implies(decode(a, symbols), decode(b, symbols))
    if tag == 3:
        i, b = unpair(payload)
        return Box(symbols.agents[i], decode(b, symbols))
    if tag == 4:
        a, b = unpair(payload)
        return Announce(decode(a, symbols), decode(b, symbols))
    raise ValueError(f"{code} is not the code of any sentence")


# ---------------------------------------------------------------------------
# Corpus generation

def enumerate_sentences(max_size: int, atoms: Sequence[str], agents: Sequence[str],
                        announcements: bool = False) -> Iterator[Sentence]:
    """Every sentence with at most ``max_size`` constructor nodes, smallest first."""
    by_size: list[list[Sentence]] = [[]]
    for n in range(1, max_size + 1):
        level: list[Sentence] = []
        if n == 1:
            level = [Atom(a) for a in atoms] + [BOTTOM]
        else:
            level.extend(Box(i, b) for i in agents for b in by_size[n - 1])
            for k in range(1, n - 1):
                for left, right in itertools.product(by_size[k], by_size[n - 1 - k]):
                    level.append(Implies(left, right))
                    if announcements:
                        level.append(Announce(left, right))
        by_size.append(level)
        yield from level


def random_sentence(rng: random.Random, max_depth: int, atoms: Sequence[str],
                    agents: Sequence[str], max_announce_depth: int = 0) -> Sentence:
    """Random tree of depth at most ``max_depth``.

    Announcements are only produced while fewer than ``max_announce_depth``
    of them enclose the current position.
    """
    def go(d: int, ann_left: int) -> Sentence:
        if d <= 1 or rng.random() < 0.2:
            return BOTTOM if rng.random() < 0.15 else Atom(rng.choice(atoms))
        choices = ["imp", "imp", "box"]
        if ann_left > 0:
            choices.append("ann")
        kind = rng.choice(choices)
        if kind == "imp":
            return Implies(go(d - 1, ann_left), go(d - 1, ann_left))
        if kind == "box":
            return Box(rng.choice(agents), go(d - 1, ann_left))
        return Announce(go(d - 1, ann_left - 1), go(d - 1, ann_left - 1))

    return go(max_depth, max_announce_depth)
