import pytest
from hypothesis import strategies as st

from palkit import semantics
from palkit.syntax import Announce, Atom, BOTTOM, Box, Implies

ATOMS = ("p", "q")
AGENTS = ("a", "b")


def sentences(max_leaves=12, atoms=ATOMS, agents=AGENTS, announcements=True):
    leaves = st.one_of(st.sampled_from([Atom(p) for p in atoms]), st.just(BOTTOM))

    def extend(children):
        options = [
            st.builds(Implies, children, children),
            st.builds(Box, st.sampled_from(agents), children),
        ]
        if announcements:
            options.append(st.builds(Announce, children, children))
        return st.one_of(*options)

    return st.recursive(leaves, extend, max_leaves=max_leaves)


def static_sentences(max_leaves=12, **kw):
    return sentences(max_leaves, announcements=False, **kw)


@st.composite
def pointed_models(draw, max_worlds=4, atoms=ATOMS, agents=AGENTS):
    seed = draw(st.integers(0, 2**32))
    n = draw(st.integers(1, max_worlds))
    return semantics.random_model(seed, n, atoms, agents)


@pytest.fixture(scope="session")
def models3():
    """Every pointed model with at most 3 worlds over p, q and agents a, b."""
    return list(semantics.enumerate_models(3, ATOMS, AGENTS))


# acceptance lines are collected here and echoed after the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
