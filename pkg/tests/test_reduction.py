import pytest
from hypothesis import given, settings, strategies as st

from palkit.reduction import Rule, reduce, reduce_announcement, rewrite_step
from palkit.semantics import ModelBatch, enumerate_kripke_models
from palkit.syntax import (Announce, Atom, BOTTOM, Box, Implies, is_static,
                           neg, parse, size)

from conftest import ATOMS, AGENTS, sentences, static_sentences

p, q, r = Atom("p"), Atom("q"), Atom("r")


@pytest.fixture(scope="module")
def batches3():
    models = list(enumerate_kripke_models(3, ATOMS, AGENTS))
    return [ModelBatch([m for m in models if len(m) == k]) for k in (1, 2, 3)]


def same_everywhere(batches, a, b):
    ok = all((bt.truth(a) == bt.truth(b)).all() for bt in batches)
    for bt in batches:
        bt._memo.clear()
    return ok


class TestRewriteStep:
    def test_atom(self):
        step = rewrite_step(Announce(p, q))
        assert step.rule is Rule.ANN_ATOM and step.output == Implies(p, q)

    def test_bottom(self):
        step = rewrite_step(Announce(p, BOTTOM))
        assert step.rule is Rule.ANN_BOTTOM and step.output == Implies(p, BOTTOM)

    def test_box(self):
        step = rewrite_step(Announce(p, Box("a", q)))
        assert step.rule is Rule.ANN_BOX
        assert step.output == Implies(p, Box("a", Announce(p, q)))

    def test_implication(self):
        step = rewrite_step(Announce(p, Implies(q, r)))
        assert step.rule is Rule.ANN_IMPLY
        assert step.output == Implies(Announce(p, q), Announce(p, r))

    def test_no_step_for_nested_announcement_or_non_announcement(self):
        assert rewrite_step(Announce(p, Announce(q, r))) is None
        assert rewrite_step(Implies(p, q)) is None

    @settings(max_examples=200, deadline=None)
    @given(sentences(max_leaves=6), sentences(max_leaves=6), st.sampled_from(AGENTS),
           st.sampled_from(["atom", "bottom", "imp", "box"]))
    def test_each_step_is_sound(self, batches3, phi, psi, agent, shape):
        body = {"atom": p, "bottom": BOTTOM, "imp": Implies(psi, phi), "box": Box(agent, psi)}[shape]
        step = rewrite_step(Announce(phi, body))
        assert same_everywhere(batches3, step.input, step.output)


class TestReduceAnnouncement:
    def test_atom(self):
        assert reduce_announcement(p, q) == Implies(p, q)

    def test_box(self, batches3):
        out = reduce_announcement(p, Box("a", q))
        assert out == Implies(p, Box("a", Implies(p, q)))
        assert same_everywhere(batches3, Announce(p, Box("a", q)), out)

    def test_negated_atom(self, batches3):
        out = reduce_announcement(p, neg(q))
        assert out == Implies(Implies(p, q), Implies(p, BOTTOM))
        assert same_everywhere(batches3, Announce(p, neg(q)), out)

    def test_rejects_dynamic_arguments(self):
        with pytest.raises(ValueError):
            reduce_announcement(Announce(p, q), q)
        with pytest.raises(ValueError):
            reduce_announcement(p, Announce(p, q))


class TestReduce:
    def test_static_input_unchanged(self):
        s = parse("[a](p -> q) -> ~[b]p")
        assert reduce(s) is s or reduce(s) == s

    def test_nested_announcements(self, batches3):
        s = parse("[! p][! q] r")
        out = reduce(s)
        # inner first: [!q]r -> q -> r, then push [!p] through the implication
        assert out == parse("(p -> q) -> p -> r")
        models = list(enumerate_kripke_models(3, ["p", "q", "r"], ["a"]))
        batch = [ModelBatch([m for m in models if len(m) == k]) for k in (1, 2, 3)]
        assert same_everywhere(batch, s, out)

    def test_under_box(self):
        assert reduce(parse("[a][! p] q")) == parse("[a](p -> q)")

    def test_cli_example(self):
        assert reduce(parse("[! p][a] q")) == parse("p -> [a](p -> q)")

    @settings(max_examples=200, deadline=None)
    @given(sentences(max_leaves=10))
    def test_static_and_equivalent(self, batches3, s):
        out = reduce(s)
        assert is_static(out)
        assert same_everywhere(batches3, s, out)

    @given(static_sentences(max_leaves=8))
    def test_idempotent_on_static(self, s):
        assert reduce(s) == s

    def test_output_size_is_finite_for_stacked_announcements(self):
        s = Atom("p")
        for k in range(6):
            s = Announce(Atom(f"a{k}"), Box("a", s))
        out = reduce(s)
        assert is_static(out)
        assert size(out) > size(s)
