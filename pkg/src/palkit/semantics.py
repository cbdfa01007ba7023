"""Finite S5 Kripke models and PAL evaluation.

Accessibility for each agent is stored as a partition of the world indices,
so the equivalence-relation requirement holds by construction.  Agents a
model does not mention see every world as its own singleton class.

Two evaluators live here.  :func:`evaluate` follows the truth clauses one
by one on a single model; :class:`ModelBatch` evaluates a sentence on a
stack of equally sized models at once with numpy and is what the exhaustive
checks use.  The tests hold the two against each other.
"""

from __future__ import annotations

import itertools
import random
import re
from dataclasses import dataclass
from types import MappingProxyType
from typing import Collection, Iterable, Iterator, Mapping, Sequence

import numpy as np

from .syntax import Announce, Atom, Bottom, Box, Implies, Sentence

__all__ = [
    "ModelError", "KripkeModel", "PointedModel", "evaluate", "truth_set",
    "restrict", "generated_submodel", "equivalent_on", "find_disagreement", "bell", "set_partitions",
    "count_models", "enumerate_kripke_models", "enumerate_models",
    "BudgetExceeded", "random_model", "ModelBatch", "batches",
    "load_model", "dump_model",
]


class ModelError(ValueError):
    pass


class BudgetExceeded(RuntimeError):
    pass


Block = frozenset


def _normalize(blocks: Iterable[Iterable[int]], n: int, agent: str) -> tuple[frozenset[int], ...]:
    seen: dict[int, int] = {}
    out = []
    for bi, block in enumerate(blocks):
        block = frozenset(block)
        if not block:
            raise ModelError(f"agent {agent}: empty partition block")
        for w in block:
            if not 0 <= w < n:
                raise ModelError(f"agent {agent}: world index {w} out of range")
            if w in seen:
                raise ModelError(f"agent {agent}: world {w} lies in two blocks")
            seen[w] = bi
        out.append(block)
    missing = [w for w in range(n) if w not in seen]
    if missing:
        raise ModelError(f"agent {agent}: world {missing[0]} is in no block")
    return tuple(sorted(out, key=min))


@dataclass(frozen=True, eq=False)
class KripkeModel:
    """Worlds ``0..n-1`` with display names, a valuation and agent partitions.

    ``valuation[w]`` is the set of atom names true at world ``w``.  The
    constructor validates that each partition covers every world exactly
    once.
    """

    names: tuple[str, ...]
    valuation: tuple[frozenset[str], ...]
    partitions: Mapping[str, tuple[frozenset[int], ...]]

    def __init__(self, valuation: Sequence[Iterable[str]],
                 partitions: Mapping[str, Iterable[Iterable[int]]] | None = None,
                 names: Sequence[str] | None = None):
        n = len(valuation)
        if n < 1:
            raise ModelError("a model needs at least one world")
        if names is None:
            names = [f"w{i}" for i in range(n)]
        if len(names) != n or len(set(names)) != n:
            raise ModelError("world names must be distinct, one per world")
        parts = {a: _normalize(b, n, a) for a, b in (partitions or {}).items()}
        class_of = {}
        for a, blocks in parts.items():
            lookup = [None] * n
            for block in blocks:
                for w in block:
                    lookup[w] = block
            class_of[a] = tuple(lookup)
        object.__setattr__(self, "names", tuple(names))
        object.__setattr__(self, "valuation", tuple(frozenset(v) for v in valuation))
        object.__setattr__(self, "partitions", MappingProxyType(parts))
        object.__setattr__(self, "_class_of", class_of)

    def __len__(self) -> int:
        return len(self.valuation)

    @property
    def worlds(self) -> range:
        return range(len(self.valuation))

    def agents(self) -> list[str]:
        return sorted(self.partitions)

    def atoms(self) -> set[str]:
        return set().union(*self.valuation)

    def cell(self, agent: str, w: int) -> frozenset[int]:
        """The agent's equivalence class of world ``w``."""
        lookup = self._class_of.get(agent)
        if lookup is None:
            return frozenset((w,))
        return lookup[w]

    def partition(self, agent: str) -> tuple[frozenset[int], ...]:
        if agent in self.partitions:
            return self.partitions[agent]
        return tuple(frozenset((w,)) for w in self.worlds)

    def world(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise ModelError(f"unknown world {name!r}") from None

    def __eq__(self, other):
        if not isinstance(other, KripkeModel):
            return NotImplemented
        return (self.names == other.names and self.valuation == other.valuation
                and dict(self.partitions) == dict(other.partitions))

    def __hash__(self):
        return hash((self.names, self.valuation, tuple(sorted(self.partitions.items()))))

    def __repr__(self):
        return f"KripkeModel({len(self)} worlds, agents={self.agents()})"


@dataclass(frozen=True)
class PointedModel:
    model: KripkeModel
    point: int

    def __post_init__(self):
        if self.point not in self.model.worlds:
            raise ModelError(f"point {self.point} is not a world of the model")


def restrict(m: KripkeModel, keep: Collection[int]) -> KripkeModel:
    """Cut every link touching a world outside ``keep``.

    Worlds are never removed.  Each class ``C`` becomes ``C & keep`` and each
    world outside ``keep`` becomes a singleton class of its own.
    """
    keep = frozenset(keep)
    bad = [w for w in keep if w not in m.worlds]
    if bad:
        raise ModelError(f"restriction names unknown world {bad[0]}")
    parts = {}
    for a, blocks in m.partitions.items():
        new = []
        for block in blocks:
            inside = block & keep
            if inside:
                new.append(inside)
            new.extend(frozenset((w,)) for w in block - keep)
        parts[a] = new
    return KripkeModel(m.valuation, parts, m.names)


def generated_submodel(m: KripkeModel, point: int) -> PointedModel:
    """Keep only the worlds reachable from ``point``; worlds are renumbered.

    Static sentences keep their truth value at every surviving world.
    """
    PointedModel(m, point)
    seen, todo = {point}, [point]
    while todo:
        w = todo.pop()
        for a in m.partitions:
            for t in m.cell(a, w):
                if t not in seen:
                    seen.add(t)
                    todo.append(t)
    order = sorted(seen)
    index = {w: k for k, w in enumerate(order)}
    parts = {a: [[index[w] for w in block] for block in blocks if min(block) in seen]
             for a, blocks in m.partitions.items()}
    sub = KripkeModel([m.valuation[w] for w in order], parts, [m.names[w] for w in order])
    return PointedModel(sub, index[point])


def evaluate(m: KripkeModel, s: int, phi: Sentence) -> bool:
    """Truth of ``phi`` at world ``s`` of ``m``."""
    if s not in m.worlds:
        raise ModelError(f"world index {s} out of range")
    if isinstance(phi, Atom):
        return phi.name in m.valuation[s]
    if isinstance(phi, Bottom):
        return False
    if isinstance(phi, Implies):
        return not evaluate(m, s, phi.left) or evaluate(m, s, phi.right)
    if isinstance(phi, Box):
        return all(evaluate(m, t, phi.body) for t in m.cell(phi.agent, s))
    if isinstance(phi, Announce):
        if not evaluate(m, s, phi.announced):
            return True
        # truth set first, then a single restriction
        keep = [t for t in m.worlds if evaluate(m, t, phi.announced)]
        return evaluate(restrict(m, keep), s, phi.body)
    raise TypeError(f"not a sentence: {phi!r}")


def truth_set(m: KripkeModel, phi: Sentence) -> frozenset[int]:
    return frozenset(w for w in m.worlds if evaluate(m, w, phi))


# ---------------------------------------------------------------------------
# Batch evaluation

class ModelBatch:
    """A stack of models with the same world count, evaluated together.

    ``val[atom]`` has shape ``(M, n)``; ``rel[agent]`` has shape
    ``(M, n, n)`` and is the boolean accessibility matrix.
    """

    def __init__(self, models: Sequence[KripkeModel], *, _arrays=None):
        self.models = list(models)
        if _arrays is not None:
            self.n, self.val, self.rel = _arrays
        else:
            if not self.models:
                raise ValueError("empty batch")
            n = len(self.models[0])
            if any(len(m) != n for m in self.models):
                raise ValueError("batch models must share a world count")
            self.n = n
            atoms = sorted(set().union(*(m.atoms() for m in self.models)))
            self.val = {p: np.array([[p in m.valuation[w] for w in range(n)]
                                     for m in self.models], dtype=bool) for p in atoms}
            agents = sorted(set().union(*(m.partitions for m in self.models)))
            self.rel = {}
            for a in agents:
                r = np.zeros((len(self.models), n, n), dtype=bool)
                for k, m in enumerate(self.models):
                    for block in m.partition(a):
                        ix = sorted(block)
                        r[k][np.ix_(ix, ix)] = True
                self.rel[a] = r
        self._memo: dict[Sentence, np.ndarray] = {}

    def __len__(self):
        return len(self.models)

    def _identity(self):
        return np.broadcast_to(np.eye(self.n, dtype=bool), (len(self.models), self.n, self.n))

    def restricted(self, keep: np.ndarray) -> "ModelBatch":
        both = keep[:, :, None] & keep[:, None, :]
        eye = np.eye(self.n, dtype=bool)[None]
        rel = {a: r & (both | eye) for a, r in self.rel.items()}
        return ModelBatch(self.models, _arrays=(self.n, self.val, rel))

    def truth(self, phi: Sentence) -> np.ndarray:
        """Boolean array of shape ``(M, n)``: truth of ``phi`` per model and world."""
        hit = self._memo.get(phi)
        if hit is not None:
            return hit
        shape = (len(self.models), self.n)
        if isinstance(phi, Atom):
            out = self.val.get(phi.name)
            if out is None:
                out = np.zeros(shape, dtype=bool)
        elif isinstance(phi, Bottom):
            out = np.zeros(shape, dtype=bool)
        elif isinstance(phi, Implies):
            out = ~self.truth(phi.left) | self.truth(phi.right)
        elif isinstance(phi, Box):
            body = self.truth(phi.body)
            r = self.rel.get(phi.agent)
            if r is None:
                out = body
            else:
                out = np.all(~r | body[:, None, :], axis=2)
        elif isinstance(phi, Announce):
            pre = self.truth(phi.announced)
            out = ~pre | self.restricted(pre).truth(phi.body)
        else:
            raise TypeError(f"not a sentence: {phi!r}")
        self._memo[phi] = out
        return out


def batches(models: Iterable[KripkeModel]) -> list[ModelBatch]:
    by_size: dict[int, list[KripkeModel]] = {}
    for m in models:
        by_size.setdefault(len(m), []).append(m)
    return [ModelBatch(ms) for _, ms in sorted(by_size.items())]


def find_disagreement(models: Iterable[PointedModel], phi: Sentence,
                      psi: Sentence) -> PointedModel | None:
    """First pointed model where ``phi`` and ``psi`` differ, or None."""
    pointed = list(models)
    distinct: dict[int, KripkeModel] = {}
    for pm in pointed:
        distinct.setdefault(id(pm.model), pm.model)
    index = {}
    for batch in batches(distinct.values()):
        diff = batch.truth(phi) != batch.truth(psi)
        for k, m in enumerate(batch.models):
            index[id(m)] = diff[k]
    for pm in pointed:
        if index[id(pm.model)][pm.point]:
            return pm
    return None


def equivalent_on(models: Iterable[PointedModel], phi: Sentence, psi: Sentence) -> bool:
    """True iff ``phi`` and ``psi`` agree at every supplied pointed model."""
    return find_disagreement(models, phi, psi) is None


# ---------------------------------------------------------------------------
# Enumeration and sampling

def bell(k: int) -> int:
    row = [1]
    for _ in range(k):
        nxt = [row[-1]]
        for x in row:
            nxt.append(nxt[-1] + x)
        row = nxt
    return row[0]


def set_partitions(n: int) -> Iterator[tuple[frozenset[int], ...]]:
    """All partitions of ``range(n)`` via restricted growth strings."""
    def grow(prefix: list[int], top: int):
        if len(prefix) == n:
            blocks: dict[int, set[int]] = {}
            for w, b in enumerate(prefix):
                blocks.setdefault(b, set()).add(w)
            yield tuple(frozenset(blocks[b]) for b in sorted(blocks))
            return
        for b in range(top + 2):
            yield from grow(prefix + [b], max(top, b))

    if n == 0:
        yield ()
        return
    yield from grow([0], 0)


def count_models(max_worlds: int, n_atoms: int, n_agents: int, pointed: bool = True) -> int:
    return sum(2 ** (k * n_atoms) * bell(k) ** n_agents * (k if pointed else 1)
               for k in range(1, max_worlds + 1))


DEFAULT_MODEL_BUDGET = 2_000_000


def _check_budget(max_worlds, atoms, agents, budget):
    if max_worlds < 1:
        raise ValueError("max_worlds must be at least 1")
    total = count_models(max_worlds, len(atoms), len(agents))
    if total > budget:
        raise BudgetExceeded(f"{total} pointed models exceed the budget of {budget}")


def enumerate_kripke_models(max_worlds: int, atoms: Sequence[str], agents: Sequence[str],
                            budget: int = DEFAULT_MODEL_BUDGET,
                            min_worlds: int = 1) -> Iterator[KripkeModel]:
    """Every model with ``min_worlds..max_worlds`` worlds (no designated point)."""
    _check_budget(max_worlds, atoms, agents, budget)
    atoms = list(atoms)
    for k in range(min_worlds, max_worlds + 1):
        valuations = [frozenset(itertools.compress(atoms, bits))
                      for bits in itertools.product((False, True), repeat=len(atoms))]
        parts = list(set_partitions(k))
        for val in itertools.product(valuations, repeat=k):
            for choice in itertools.product(parts, repeat=len(agents)):
                yield KripkeModel(val, dict(zip(agents, choice)))


def enumerate_models(max_worlds: int, atoms: Sequence[str], agents: Sequence[str],
                     budget: int = DEFAULT_MODEL_BUDGET,
                     min_worlds: int = 1) -> Iterator[PointedModel]:
    """Every pointed model up to ``max_worlds`` worlds, each exactly once.

    The stream has ``sum_k 2^(k*|atoms|) * Bell(k)^|agents| * k`` entries;
    :class:`BudgetExceeded` is raised up front when that exceeds ``budget``.
    Points of one model share the same :class:`KripkeModel` object.
    """
    for m in enumerate_kripke_models(max_worlds, atoms, agents, budget, min_worlds):
        for w in m.worlds:
            yield PointedModel(m, w)


def _random_partition(rng: random.Random, worlds: list[int]) -> list[list[int]]:
    # split the coarsest partition recursively
    if len(worlds) <= 1 or rng.random() < 0.4:
        return [worlds]
    shuffled = worlds[:]
    rng.shuffle(shuffled)
    cut = rng.randint(1, len(shuffled) - 1)
    return _random_partition(rng, sorted(shuffled[:cut])) + _random_partition(rng, sorted(shuffled[cut:]))


def random_model(seed, n_worlds: int, atoms: Sequence[str], agents: Sequence[str]) -> PointedModel:
    if n_worlds < 1:
        raise ValueError("n_worlds must be at least 1")
    rng = random.Random(seed)
    val = [{p for p in atoms if rng.random() < 0.5} for _ in range(n_worlds)]
    parts = {a: _random_partition(rng, list(range(n_worlds))) for a in agents}
    return PointedModel(KripkeModel(val, parts), rng.randrange(n_worlds))


# ---------------------------------------------------------------------------
# Model text format

_NAME = r"[A-Za-z0-9_']+"


def load_model(text: str) -> tuple[KripkeModel, int | None]:
    """Parse the line-oriented model format; returns the model and its point."""
    names: list[str] | None = None
    vals: dict[str, set[str]] = {}
    parts: dict[str, list[list[str]]] = {}
    point: str | None = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, _, rest = line.partition(" ")
        rest = rest.strip()
        if head == "worlds":
            if names is not None:
                raise ModelError(f"line {lineno}: duplicate 'worlds' line")
            names = rest.split()
            if len(set(names)) != len(names):
                raise ModelError(f"line {lineno}: repeated world name")
            if not names:
                raise ModelError(f"line {lineno}: no worlds listed")
        elif head == "val":
            m = re.fullmatch(rf"({_NAME})\s*:(.*)", rest)
            if not m:
                raise ModelError(f"line {lineno}: expected 'val WORLD: atoms...'")
            vals.setdefault(m.group(1), set()).update(m.group(2).split())
        elif head == "agent":
            m = re.fullmatch(rf"({_NAME})\s*:(.*)", rest)
            if not m:
                raise ModelError(f"line {lineno}: expected 'agent NAME: {{w ...}} ...'")
            body = m.group(2).strip()
            blocks = re.findall(r"\{([^{}]*)\}", body)
            if re.sub(r"\{[^{}]*\}", "", body).strip():
                raise ModelError(f"line {lineno}: malformed partition blocks")
            if m.group(1) in parts:
                raise ModelError(f"line {lineno}: agent {m.group(1)} declared twice")
            parts[m.group(1)] = [b.split() for b in blocks]
        elif head == "point":
            point = rest
        else:
            raise ModelError(f"line {lineno}: unknown directive {head!r}")
    if names is None:
        raise ModelError("missing 'worlds' line")
    index = {n: i for i, n in enumerate(names)}

    def lookup(w: str, what: str) -> int:
        if w not in index:
            raise ModelError(f"{what} names unknown world {w!r}")
        return index[w]

    valuation = [set() for _ in names]
    for w, atoms in vals.items():
        valuation[lookup(w, "val")] |= atoms
    partitions = {}
    for a, blocks in parts.items():
        seen: set[str] = set()
        for block in blocks:
            for w in block:
                lookup(w, f"agent {a}")
                if w in seen:
                    raise ModelError(f"agent {a}: world {w} appears in two blocks")
                seen.add(w)
        for w in names:
            if w not in seen:
                raise ModelError(f"agent {a}: world {w} is in no block")
        partitions[a] = [[index[w] for w in block] for block in blocks]
    model = KripkeModel(valuation, partitions, names)
    return model, (lookup(point, "point") if point is not None else None)


def dump_model(m: KripkeModel, point: int | None = None) -> str:
    lines = ["worlds " + " ".join(m.names)]
    for w in m.worlds:
        if m.valuation[w]:
            lines.append(f"val {m.names[w]}: " + " ".join(sorted(m.valuation[w])))
    for a in m.agents():
        blocks = " ".join("{" + " ".join(m.names[w] for w in sorted(b)) + "}"
                          for b in m.partitions[a])
        lines.append(f"agent {a}: {blocks}")
    if point is not None:
        lines.append(f"point {m.names[point]}")
    return "\n".join(lines) + "\n"
