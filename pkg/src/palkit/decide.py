"""Validity and satisfiability for static multi-agent S5 sentences.

The worlds of the canonical model are Hintikka atoms: coherent subsets of
the query's closure.  Two atoms are linked for agent ``i`` when they contain
the same ``[i]``-formulas.  Pruning then deletes atoms that lack a witness
for some missing ``[i]chi``, until nothing changes (type elimination).  A
sentence is satisfiable iff a surviving atom contains it; every INVALID
verdict comes with an explicit countermodel that is re-evaluated before it
is returned.
"""

from __future__ import annotations

import enum
import itertools
import os
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .semantics import (BudgetExceeded, KripkeModel, PointedModel, evaluate,
                        generated_submodel)
from .syntax import (Atom, Bottom, Box, Implies, Sentence, closure,
                     complement, is_negation, is_static, neg, size, to_text)

__all__ = [
    "DEFAULT_BUDGET", "default_budget", "HintikkaAtom", "CanonicalModel",
    "Outcome", "Verdict", "Satisfiability", "CertificateError", "build_atoms",
    "related", "prune", "satisfiable", "valid", "extract_countermodel",
]

DEFAULT_BUDGET = 16


def default_budget() -> int:
    """Closure-size cap, overridable through ``PALKIT_BUDGET``."""
    raw = os.environ.get("PALKIT_BUDGET")
    return int(raw) if raw else DEFAULT_BUDGET


class CertificateError(AssertionError):
    """An extracted countermodel failed re-evaluation (a bug, never expected)."""


@dataclass(frozen=True)
class HintikkaAtom:
    members: frozenset[Sentence]

    def __contains__(self, s: Sentence) -> bool:
        return s in self.members

    def boxes(self, agent: str) -> frozenset[Sentence]:
        return frozenset(s for s in self.members if isinstance(s, Box) and s.agent == agent)

    def __repr__(self):
        shown = ", ".join(sorted(to_text(s) for s in self.members))
        return "{" + shown + "}"


def _check_budget(cl: frozenset[Sentence], budget: int | None) -> None:
    budget = default_budget() if budget is None else budget
    if len(cl) > budget:
        raise BudgetExceeded(f"closure has {len(cl)} formulas, budget is {budget} "
                             f"(up to 2^{len(cl)} candidate atoms)")


def build_atoms(phi: Sentence, budget: int | None = None) -> list[HintikkaAtom]:
    """All Hintikka atoms over ``closure(phi)``.

    Only atoms and box formulas are chosen freely; implications follow from
    their parts, falsum is always out, and a chosen ``[i]chi`` forces
    ``chi``.
    """
    cl = closure(phi)
    _check_budget(cl, budget)
    base = sorted((s for s in cl if not is_negation(s)), key=size)
    free = [s for s in base if isinstance(s, (Atom, Box))]
    atoms = []
    for bits in itertools.product((False, True), repeat=len(free)):
        value = dict(zip(free, bits))

        def holds(s: Sentence) -> bool:
            return not holds(s.left) if is_negation(s) else value[s]

        ok = True
        for s in base:          # by size, so parts are decided first
            if isinstance(s, Bottom):
                value[s] = False
            elif isinstance(s, Implies):
                value[s] = not holds(s.left) or holds(s.right)
            elif isinstance(s, Box) and value[s] and not holds(s.body):
                ok = False
                break
        if ok:
            atoms.append(HintikkaAtom(frozenset(s for s in cl if holds(s))))
    return atoms


def related(agent: str, s: HintikkaAtom, t: HintikkaAtom) -> bool:
    """Same ``[agent]``-formulas on both sides."""
    return s.boxes(agent) == t.boxes(agent)


@dataclass
class CanonicalModel:
    """Surviving atoms of the pruning fixpoint over one closure."""

    closure: frozenset[Sentence]
    atoms: list[HintikkaAtom]
    agents: tuple[str, ...]
    removed: list[HintikkaAtom] = field(default_factory=list)
    rounds: int = 0

    def classes(self, agent: str) -> list[list[int]]:
        groups: dict[frozenset, list[int]] = {}
        for k, a in enumerate(self.atoms):
            groups.setdefault(a.boxes(agent), []).append(k)
        return list(groups.values())

    def witness_failures(self, atoms: Sequence[HintikkaAtom]) -> set[int]:
        """Indices of atoms missing a witness for some unboxed formula."""
        bad: set[int] = set()
        for agent in self.agents:
            demands = [s for s in self.closure if isinstance(s, Box) and s.agent == agent]
            groups: dict[frozenset, list[int]] = {}
            for k, a in enumerate(atoms):
                groups.setdefault(a.boxes(agent), []).append(k)
            for key, members in groups.items():
                for box in demands:
                    if box in key:
                        continue
                    lacking = complement(box.body)
                    if not any(lacking in atoms[k] for k in members):
                        bad.update(members)
                        break
        return bad


def prune(atoms: Iterable[HintikkaAtom], closure_set: frozenset[Sentence] | None = None) -> CanonicalModel:
    """Delete witness-less atoms until a fixpoint is reached."""
    atoms = list(atoms)
    if closure_set is None:
        closure_set = frozenset().union(*(a.members for a in atoms)) if atoms else frozenset()
        closure_set |= {complement(s) for s in closure_set}
    agents = tuple(sorted({s.agent for s in closure_set if isinstance(s, Box)}))
    cm = CanonicalModel(closure_set, atoms, agents)
    while True:
        bad = cm.witness_failures(cm.atoms)
        if not bad:
            return cm
        cm.rounds += 1
        cm.removed.extend(a for k, a in enumerate(cm.atoms) if k in bad)
        cm.atoms = [a for k, a in enumerate(cm.atoms) if k not in bad]


@dataclass(frozen=True)
class Satisfiability:
    satisfiable: bool
    witness: HintikkaAtom | None
    model: CanonicalModel

    def __bool__(self):
        return self.satisfiable


def satisfiable(phi: Sentence, budget: int | None = None) -> Satisfiability:
    if not is_static(phi):
        raise ValueError(f"decision procedure needs a static sentence: {to_text(phi)}")
    cm = prune(build_atoms(phi, budget), closure(phi))
    for a in cm.atoms:
        if phi in a:
            return Satisfiability(True, a, cm)
    return Satisfiability(False, None, cm)


class Outcome(enum.Enum):
    VALID = "VALID"
    INVALID = "INVALID"


@dataclass(frozen=True)
class Verdict:
    outcome: Outcome
    formula: Sentence
    countermodel: PointedModel | None = None
    canonical: CanonicalModel | None = field(default=None, repr=False, compare=False)

    @property
    def is_valid(self) -> bool:
        return self.outcome is Outcome.VALID


def extract_countermodel(cm: CanonicalModel, atom: HintikkaAtom) -> PointedModel:
    """Turn the surviving atoms into a Kripke model pointed at ``atom``."""
    if atom not in cm.atoms:
        raise ValueError("atom did not survive pruning")
    valuation = [{s.name for s in a.members if isinstance(s, Atom)} for a in cm.atoms]
    partitions = {i: cm.classes(i) for i in cm.agents}
    model = KripkeModel(valuation, partitions)
    return PointedModel(model, cm.atoms.index(atom))


def valid(phi: Sentence, budget: int | None = None) -> Verdict:
    """VALID iff the negation has no surviving atom."""
    sat = satisfiable(neg(phi), budget)
    if not sat:
        return Verdict(Outcome.VALID, phi)
    full = extract_countermodel(sat.model, sat.witness)
    pm = generated_submodel(full.model, full.point)
    if evaluate(pm.model, pm.point, phi):
        raise CertificateError(f"countermodel does not falsify {to_text(phi)}")
    return Verdict(Outcome.INVALID, phi, pm, sat.model)
