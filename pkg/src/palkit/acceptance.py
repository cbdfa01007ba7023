"""Desk-scale acceptance checks, shared by ``palkit selftest`` and pytest.

Each ``criterion_*`` function returns a :class:`CriterionResult`; none of
them raise on failure.  Corpus sizes default to the release settings and
shrink with ``quick=True``.
"""

from __future__ import annotations

import io
import random
import time
from dataclasses import dataclass, field
from importlib import resources
from typing import Callable, Iterator, TextIO

from . import cli
from .decide import CertificateError, Verdict, extract_countermodel, valid
from .proof import (AXIOMS, Ax1, Ax2, Ax2p, Ax3, Ax3p, Conj, Conjl, Conjmp,
                    Conjr, Curry, Distr, Mp, ProofError, ProofTerm, Ref, Sym,
                    Trans, Truth, Uncurry, check_proof, id_provable,
                    parse_proof, proof_to_text, verifies)
from .reduction import Rule, reduce, rewrite_step
from .semantics import (ModelBatch, batches, dump_model,
                        enumerate_kripke_models, evaluate, load_model,
                        random_model)
from .syntax import (Announce, Atom, BOTTOM, Box, Implies, Sentence,
                     announcement_depth, closure, enumerate_sentences,
                     is_static, neg, parse, random_sentence, to_text)

ATOMS = ("p", "q")
AGENTS = ("a", "b")


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0
    failures: list = field(default_factory=list, repr=False)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] C{self.number} {self.name}: {self.detail} ({self.seconds:.1f}s)"


def _timed(fn: Callable[..., CriterionResult]) -> Callable[..., CriterionResult]:
    def wrapper(*args, **kwargs):
        start = time.perf_counter()
        result = fn(*args, **kwargs)
        result.seconds = time.perf_counter() - start
        return result
    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


def model_batches(max_worlds: int, atoms=ATOMS, agents=AGENTS) -> list[ModelBatch]:
    return batches(enumerate_kripke_models(max_worlds, atoms, agents))


def _clear(bs: list[ModelBatch]) -> None:
    for b in bs:
        b._memo.clear()


def falsifier(bs: list[ModelBatch], phi: Sentence):
    """First (model, world) of the batches where ``phi`` is false."""
    for b in bs:
        bad = ~b.truth(phi)
        if bad.any():
            k, w = divmod(int(bad.argmax()), b.n)
            return b.models[k], w
    return None


def disagreement(bs: list[ModelBatch], phi: Sentence, psi: Sentence):
    for b in bs:
        diff = b.truth(phi) != b.truth(psi)
        if diff.any():
            k, w = divmod(int(diff.argmax()), b.n)
            return b.models[k], w
    return None


# ---------------------------------------------------------------------------
# C1 reduction-rule soundness

def rule_instance(rule: Rule, rng: random.Random) -> Sentence:
    def part():
        return random_sentence(rng, 3, ATOMS, AGENTS, max_announce_depth=1)
    ann = part()
    if rule is Rule.ANN_ATOM:
        body = Atom(rng.choice(ATOMS))
    elif rule is Rule.ANN_BOTTOM:
        body = BOTTOM
    elif rule is Rule.ANN_IMPLY:
        body = Implies(part(), part())
    else:
        body = Box(rng.choice(AGENTS), part())
    return Announce(ann, body)


@_timed
def criterion_1(instances: int = 500, max_worlds: int = 3, seed: int = 1) -> CriterionResult:
    """Every rewrite step preserves truth at every pointed model."""
    rng = random.Random(seed)
    bs = model_batches(max_worlds)
    failures = []
    checked = 0
    for rule in Rule:
        for _ in range(instances):
            lhs = rule_instance(rule, rng)
            step = rewrite_step(lhs)
            if step is None or step.rule is not rule:
                failures.append((rule, lhs, "rule did not fire"))
                continue
            if disagreement(bs, step.input, step.output) is not None:
                failures.append((rule, lhs, step.output))
            checked += 1
            _clear(bs)
    detail = f"{checked} instances x {sum(len(b) for b in bs)} models, {len(failures)} mismatches"
    return CriterionResult(1, "reduction-axiom soundness", not failures, detail, failures=failures)


# ---------------------------------------------------------------------------
# C2 recursion theorem

def pal_corpus(count: int, rng: random.Random, max_depth: int = 4,
               max_announce: int = 3) -> Iterator[Sentence]:
    made = 0
    while made < count:
        s = random_sentence(rng, max_depth, ATOMS, AGENTS, max_announce_depth=max_announce)
        if announcement_depth(s) == 0:
            continue
        made += 1
        yield s


@_timed
def criterion_2(count: int = 500, max_worlds: int = 3, seed: int = 2) -> CriterionResult:
    """reduce() output is static and equivalent to its input."""
    rng = random.Random(seed)
    bs = model_batches(max_worlds)
    failures = []
    for s in pal_corpus(count, rng):
        r = reduce(s)
        if not is_static(r):
            failures.append((s, r, "not static"))
        elif disagreement(bs, s, r) is not None:
            failures.append((s, r, "not equivalent"))
        _clear(bs)
    detail = f"{count} sentences, {len(failures)} failures"
    return CriterionResult(2, "recursion theorem", not failures, detail, failures=failures)


# ---------------------------------------------------------------------------
# C3 proof-system soundness

def _static(rng: random.Random) -> Sentence:
    return random_sentence(rng, 3, ATOMS, AGENTS)


def random_axiom(cls, rng: random.Random) -> ProofTerm:
    a = rng.choice(AGENTS)
    s = lambda: _static(rng)  # noqa: E731
    if cls in (Distr,):
        return cls(a, s(), s())
    if cls in (Ref, Trans, Sym):
        return cls(a, s())
    if cls in (Ax3, Ax2p):
        return cls(s())
    if cls is Ax2:
        return cls(s(), s(), s())
    return cls(s(), s())


def random_rule_application(rule, rng: random.Random) -> ProofTerm:
    """A term whose root is ``rule`` over checked premises."""
    ax = lambda: random_axiom(rng.choice(AXIOMS), rng)  # noqa: E731
    if rule is Mp:
        premise = ax()
        if rng.random() < 0.5:
            return Mp(Ax1(check_proof(premise).conclusion, _static(rng)), premise)
        return id_provable(_static(rng))
    if rule is Truth:
        return Truth(rng.choice(AGENTS), ax())
    if rule is Conjl:
        return Conjl(ax(), _static(rng))
    if rule is Conjr:
        return Conjr(ax(), _static(rng))
    if rule is Uncurry:
        return Uncurry(random_axiom(rng.choice((Ax1, Ax2, Distr, Ax3p)), rng))
    if rule is Curry:
        if rng.random() < 0.5:
            return Curry(random_axiom(Conjmp, rng))
        return Curry(Uncurry(random_axiom(rng.choice((Ax1, Ax2, Distr, Ax3p)), rng)))
    if rule is Conj:
        base = random_axiom(Conjmp, rng)
        from_list = [Implies(base.phi, base.psi), base.phi]
        to_list = from_list + [_static(rng) for _ in range(rng.randint(0, 2))]
        rng.shuffle(to_list)
        return Conj(base, from_list, to_list, base.psi)
    raise ValueError(rule)


@_timed
def criterion_3(instances: int = 200, max_worlds: int = 3, seed: int = 3) -> CriterionResult:
    """Every axiom instance and every rule output is true everywhere."""
    rng = random.Random(seed)
    bs = model_batches(max_worlds)
    failures = []
    total = 0
    kinds = list(AXIOMS) + [Mp, Truth, Conj, Conjl, Conjr, Uncurry, Curry]
    for kind in kinds:
        for _ in range(instances):
            if kind in AXIOMS:
                term = random_axiom(kind, rng)
            else:
                term = random_rule_application(kind, rng)
                if rng.random() < 0.3:      # one more rule on top
                    term = Truth(rng.choice(AGENTS), term)
            try:
                phi = check_proof(term).conclusion
            except ProofError as exc:
                failures.append((kind.__name__, term, f"did not check: {exc}"))
                continue
            if falsifier(bs, phi) is not None:
                failures.append((kind.__name__, term, "falsified"))
            total += 1
            _clear(bs)
    detail = f"{len(kinds)} schemas/rules, {total} conclusions, {len(failures)} falsified"
    return CriterionResult(3, "proof-system soundness", not failures, detail, failures=failures)


# ---------------------------------------------------------------------------
# C4 id_provable fixture

def fixture_text(name: str) -> str:
    return resources.files("palkit").joinpath("fixtures", name).read_text(encoding="utf-8")


_ALT_FORMULAS = (parse("q"), parse("p -> p"), BOTTOM, parse("[a]p"), parse("p"))


def _with(term: ProofTerm, **changes) -> ProofTerm:
    from dataclasses import replace
    return replace(term, **changes)


def mutations(term: ProofTerm) -> Iterator[ProofTerm]:
    """Every term differing from ``term`` in exactly one node."""
    from dataclasses import fields
    # change this node's own data
    for f in fields(term):
        v = getattr(term, f.name)
        if isinstance(v, Sentence):
            for alt in _ALT_FORMULAS:
                if alt != v:
                    yield _with(term, **{f.name: alt})
        elif f.name == "agent":
            yield _with(term, agent="b" if v != "b" else "a")
    if isinstance(term, Mp):
        yield Mp(term.minor, term.major)
    if isinstance(term, AXIOMS):
        values = [getattr(term, f.name) for f in fields(term)]
        for other in AXIOMS:
            if other is not type(term) and len(fields(other)) == len(values):
                names = [f.name for f in fields(other)]
                if ("agent" in names) == hasattr(term, "agent"):
                    yield other(*values)
    yield Truth("a", term)
    # recurse into sub-proofs
    for f in fields(term):
        v = getattr(term, f.name)
        if isinstance(v, ProofTerm):
            for sub in mutations(v):
                yield _with(term, **{f.name: sub})


@_timed
def criterion_4() -> CriterionResult:
    """The shipped id_provable term proves p -> p; mutants are caught."""
    term = parse_proof(fixture_text("id_provable.proof"))
    target = parse("p -> p")
    failures = []
    if check_proof(term).conclusion != target or term != id_provable(parse("p")):
        failures.append(("fixture", proof_to_text(term), "wrong conclusion"))
    bs = model_batches(2, ("p", "q"), ("a", "b"))
    rejected = changed = same = 0
    for mutant in mutations(term):
        try:
            concl = check_proof(mutant).conclusion
        except ProofError:
            rejected += 1
            continue
        except Exception as exc:  # anything but a shape error is a bug
            failures.append((proof_to_text(mutant), repr(exc)))
            continue
        if verifies(mutant, target) != (concl == target):
            failures.append((proof_to_text(mutant), "verifies() inconsistent"))
        if concl == target:
            same += 1
        else:
            changed += 1
        if falsifier(bs, concl) is not None:
            failures.append((proof_to_text(mutant), "unsound conclusion"))
        _clear(bs)
    detail = f"{rejected} mutants rejected, {changed} with a different conclusion, {same} equal"
    return CriterionResult(4, "id_provable fixture", not failures, detail, failures=failures)


# ---------------------------------------------------------------------------
# C5 / C6 / C7c completeness surrogate and truth lemma

NAMED_VALIDITIES = {
    "T": "[a]p -> p",
    "4 as printed": "[a][a]p -> [a]p",
    "4": "[a]p -> [a][a]p",
    "5/Sym": "~[a]p -> [a]~[a]p",
    "B": "p -> [a]<a>p",
    "Distr": "[a](p -> q) -> [a]p -> [a]q",
}


@dataclass
class CompletenessRun:
    result: CriterionResult
    invalid: list[Verdict]


def completeness_run(max_size: int = 7, max_worlds: int = 4,
                     named_budget: int = 24) -> CompletenessRun:
    start = time.perf_counter()
    corpus = [(s, None) for s in enumerate_sentences(max_size, ("p",), AGENTS)]
    corpus += [(parse(t), name) for name, t in NAMED_VALIDITIES.items()]
    small = model_batches(max_worlds, ("p",), AGENTS)
    wide = model_batches(max_worlds, ("p", "q"), ("a",))
    failures = []
    invalid: list[Verdict] = []
    n_valid = 0
    for phi, name in corpus:
        bs = small if name is None else wide
        try:
            verdict = valid(phi, None if name is None else named_budget)
        except CertificateError as exc:
            failures.append((to_text(phi), f"certificate: {exc}"))
            continue
        brute = falsifier(bs, phi)
        _clear(bs)
        if verdict.is_valid:
            n_valid += 1
            if brute is not None:
                failures.append((to_text(phi), "VALID but brute force found a countermodel"))
        else:
            invalid.append(verdict)
            pm = verdict.countermodel
            if evaluate(pm.model, pm.point, phi):
                failures.append((to_text(phi), "certificate does not falsify"))
        if name is not None and not verdict.is_valid:
            failures.append((name, "named validity judged INVALID"))
    detail = (f"{len(corpus)} sentences ({n_valid} VALID, {len(invalid)} INVALID), "
              f"{len(failures)} disagreements")
    res = CriterionResult(5, "completeness surrogate", not failures, detail, failures=failures)
    res.seconds = time.perf_counter() - start
    return CompletenessRun(res, invalid)


@_timed
def criterion_6(invalid: list[Verdict]) -> CriterionResult:
    """Closure membership equals truth at every atom of every countermodel."""
    failures = []
    checks = 0
    for verdict in invalid:
        cm = verdict.canonical
        # the full canonical model, not the generated part returned as certificate
        model = extract_countermodel(cm, cm.atoms[0]).model
        for chi in closure(neg(verdict.formula)):
            for w, atom in enumerate(cm.atoms):
                checks += 1
                if evaluate(model, w, chi) != (chi in atom):
                    failures.append((to_text(verdict.formula), to_text(chi), w))
    detail = f"{len(invalid)} models, {checks} membership checks, {len(failures)} mismatches"
    return CriterionResult(6, "truth lemma", not failures, detail, failures=failures)


# ---------------------------------------------------------------------------
# C7 round trips

@_timed
def criterion_7(invalid: list[Verdict], sentences: int = 10_000, models: int = 1_000,
                seed: int = 7) -> CriterionResult:
    rng = random.Random(seed)
    failures = []
    for _ in range(sentences):
        s = random_sentence(rng, 6, ("p", "q", "r"), ("a", "b", "c"), max_announce_depth=2)
        text = to_text(s)
        try:
            if parse(text) != s:
                failures.append(("print/parse", text))
        except Exception as exc:
            failures.append(("print/parse", text, repr(exc)))
    for k in range(models):
        pm = random_model(rng.random(), rng.randint(1, 6), ("p", "q", "r"), ("a", "b", "c"))
        back, point = load_model(dump_model(pm.model, pm.point))
        if back != pm.model or point != pm.point:
            failures.append(("model file", k))
    for verdict in invalid:
        pm = verdict.countermodel
        out = io.StringIO()
        code = cli.run(["check-model", "-m", "-", "-f", to_text(verdict.formula),
                        "-w", pm.model.names[pm.point]],
                       stdin=io.StringIO(dump_model(pm.model, pm.point)), stdout=out)
        if code != 0 or out.getvalue().strip() != "false":
            failures.append(("countermodel", to_text(verdict.formula)))
    detail = (f"{sentences} sentences, {models} models, {len(invalid)} countermodels, "
              f"{len(failures)} failures")
    return CriterionResult(7, "round trips", not failures, detail, failures=failures)


# ---------------------------------------------------------------------------

def run_all(quick: bool = False, log: TextIO | None = None) -> list[CriterionResult]:
    def emit(r: CriterionResult) -> CriterionResult:
        if log is not None:
            print(r.line(), file=log, flush=True)
        return r

    scale = 10 if quick else 1
    results = [
        emit(criterion_1(instances=500 // scale)),
        emit(criterion_2(count=500 // scale)),
        emit(criterion_3(instances=200 // scale)),
        emit(criterion_4()),
    ]
    run = completeness_run(max_size=5 if quick else 7, max_worlds=3 if quick else 4)
    results.append(emit(run.result))
    results.append(emit(criterion_6(run.invalid)))
    results.append(emit(criterion_7(run.invalid, sentences=10_000 // scale,
                                    models=1_000 // scale)))
    return results
