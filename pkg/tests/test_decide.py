import itertools

import pytest
from hypothesis import given, settings

from palkit.decide import (CertificateError, Outcome, build_atoms,
                           extract_countermodel, prune, related, satisfiable,
                           valid)
from palkit.semantics import (BudgetExceeded, ModelBatch,
                              enumerate_kripke_models, evaluate)
from palkit.syntax import (Atom, BOTTOM, Box, Implies, atoms_of, agents_of,
                           closure, complement, conj, diamond, is_negation,
                           neg, parse, size)

from conftest import static_sentences

p, q = Atom("p"), Atom("q")
P = parse


def oracle_atoms(phi):
    """Hintikka atoms by checking every subset of the closure against the definition."""
    cl = sorted(closure(phi), key=lambda s: (size(s), repr(s)))
    found = set()
    for bits in itertools.product((False, True), repeat=len(cl)):
        chosen = {s for s, b in zip(cl, bits) if b}
        if BOTTOM in chosen:
            continue
        if any((s in chosen) == (complement(s) in chosen) for s in cl):
            continue
        ok = True
        for s in chosen:
            if isinstance(s, Implies) and not is_negation(s):
                if s.left in chosen and s.right not in chosen:
                    ok = False
            if isinstance(s, Box) and s.body not in chosen:
                ok = False
        for s in cl:
            if isinstance(s, Implies) and not is_negation(s) and s not in chosen:
                if s.left not in chosen or s.right in chosen:
                    ok = False
        if ok:
            found.add(frozenset(chosen))
    return found


def brute_force_countermodel(phi, max_worlds):
    atoms = sorted(atoms_of(phi)) or ["p"]
    agents = sorted(agents_of(phi)) or ["a"]
    models = list(enumerate_kripke_models(max_worlds, atoms, agents))
    for k in range(1, max_worlds + 1):
        batch = ModelBatch([m for m in models if len(m) == k])
        if not batch.models:
            continue
        if not batch.truth(phi).all():
            return True
    return False


class TestAtoms:
    def test_atom(self):
        assert {a.members for a in build_atoms(p)} == {frozenset({p}), frozenset({neg(p)})}

    def test_box_reflexivity_leaves_three(self):
        atoms = build_atoms(Box("a", p))
        assert len(atoms) == 3
        assert all(p in a for a in atoms if Box("a", p) in a)

    def test_bottom(self):
        assert [a.members for a in build_atoms(BOTTOM)] == [frozenset({neg(BOTTOM)})]

    @pytest.mark.parametrize("text", ["p -> q", "[a]p -> p", "~[a]~p", "[a][b]p -> [b]q",
                                      "~~p", "[a](p -> [a]p)", "false -> p"])
    def test_match_subset_oracle(self, text):
        phi = P(text)
        assert {a.members for a in build_atoms(phi)} == oracle_atoms(phi)

    @settings(max_examples=60, deadline=None)
    @given(static_sentences(max_leaves=4))
    def test_match_subset_oracle_random(self, phi):
        if len(closure(phi)) <= 12:
            assert {a.members for a in build_atoms(phi, budget=12)} == oracle_atoms(phi)

    def test_budget(self):
        phi = P("[a]p -> [b]q -> [a][b](p -> q) -> p")
        with pytest.raises(BudgetExceeded, match="budget is 4"):
            build_atoms(phi, budget=4)

    def test_budget_environment(self, monkeypatch):
        monkeypatch.setenv("PALKIT_BUDGET", "3")
        with pytest.raises(BudgetExceeded):
            build_atoms(Box("a", p))


class TestRelated:
    def test_is_equivalence(self):
        atoms = build_atoms(P("[a]p -> [b]q"))
        for x, y, z in itertools.product(atoms, repeat=3):
            assert related("a", x, x)
            assert related("a", x, y) == related("a", y, x)
            if related("a", x, y) and related("a", y, z):
                assert related("a", x, z)

    def test_box_contents_hold_across_class(self):
        atoms = build_atoms(P("[a](p -> q)"))
        for x, y in itertools.product(atoms, repeat=2):
            if related("a", x, y):
                for s in x.boxes("a"):
                    assert s.body in y


class TestPrune:
    def test_knowledge_keeps_everything(self):
        cm = prune(build_atoms(Box("a", p)), closure(Box("a", p)))
        assert len(cm.atoms) == 3 and cm.rounds == 0

    def test_no_modality(self):
        cm = prune(build_atoms(p), closure(p))
        assert len(cm.atoms) == 2 and not cm.removed

    def test_impossible_ignorance(self):
        phi = neg(Box("a", Implies(p, p)))
        cm = prune(build_atoms(phi), closure(phi))
        assert cm.rounds >= 1
        assert all(phi not in a for a in cm.atoms)


class TestSatisfiable:
    def test_contradiction(self):
        assert not satisfiable(conj(p, neg(p)))

    def test_ignorance(self):
        sat = satisfiable(neg(Box("a", p)))
        assert sat and neg(Box("a", p)) in sat.witness

    def test_both_possible(self):
        assert satisfiable(conj(diamond("a", p), diamond("a", neg(p))))

    def test_rejects_announcements(self):
        with pytest.raises(ValueError):
            satisfiable(P("[! p] q"))


class TestValid:
    @pytest.mark.parametrize("text", ["[a]p -> p", "[a]p -> [a][a]p", "~[a]p -> [a]~[a]p",
                                      "p -> [a]<a>p", "[a](p -> q) -> [a]p -> [a]q"])
    def test_s5_validities(self, text):
        assert valid(P(text), budget=24).outcome is Outcome.VALID

    def test_knowledge_from_truth_fails(self):
        phi = P("p -> [a]p")
        verdict = valid(phi)
        assert verdict.outcome is Outcome.INVALID
        pm = verdict.countermodel
        assert len(pm.model) == 2
        assert not evaluate(pm.model, pm.point, phi)

    def test_atom_is_not_valid(self):
        verdict = valid(p)
        assert not verdict.is_valid and not evaluate(verdict.countermodel.model, 0, p)

    def test_extract_requires_survivor(self):
        phi = neg(Box("a", Implies(p, p)))
        cm = prune(build_atoms(phi), closure(phi))
        with pytest.raises(ValueError):
            extract_countermodel(cm, cm.removed[0])

    def test_certificate_error_is_assertion(self):
        assert issubclass(CertificateError, AssertionError)

    @settings(max_examples=80, deadline=None)
    @given(static_sentences(max_leaves=5))
    def test_truth_lemma(self, phi):
        # every surviving atom is satisfied by its own world in the extracted model
        if len(closure(phi)) > 14:
            return
        cm = prune(build_atoms(phi, budget=14), closure(phi))
        if not cm.atoms:
            return
        pm = extract_countermodel(cm, cm.atoms[0])
        for k, a in enumerate(cm.atoms):
            for s in a.members:
                assert evaluate(pm.model, k, s)

    @settings(max_examples=80, deadline=None)
    @given(static_sentences(max_leaves=5, agents=("a",)))
    def test_agrees_with_model_search(self, phi):
        # a countermodel found by search forces INVALID; INVALID must carry a real countermodel
        if len(closure(neg(phi))) > 12:
            return
        verdict = valid(phi, budget=12)
        found = brute_force_countermodel(phi, 3)
        if found:
            assert not verdict.is_valid
        if verdict.is_valid:
            assert not found
        else:
            pm = verdict.countermodel
            assert not evaluate(pm.model, pm.point, phi)
