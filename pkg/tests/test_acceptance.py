"""Acceptance criteria at full scale; one pass/fail line per criterion.

Run alone with ``pytest tests/test_acceptance.py -s`` or ``palkit selftest``.
"""

import pytest

from palkit import acceptance

from conftest import ACCEPTANCE_LINES

pytestmark = pytest.mark.acceptance


def record(result, limit=None):
    line = result.line()
    if limit is not None and result.seconds >= limit:
        line = line.replace("[PASS]", "[FAIL]", 1) + f" exceeded {limit:.0f}s"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert result.passed, result.failures[:5]
    if limit is not None:
        assert result.seconds < limit


@pytest.fixture(scope="module")
def completeness():
    return acceptance.completeness_run()


def test_criterion_1_reduction_axiom_soundness():
    record(acceptance.criterion_1(instances=500, max_worlds=3), limit=60)


def test_criterion_2_recursion_theorem():
    record(acceptance.criterion_2(count=500), limit=120)


def test_criterion_3_proof_system_soundness():
    record(acceptance.criterion_3(instances=200))


def test_criterion_4_id_provable_fixture():
    record(acceptance.criterion_4(), limit=1)


def test_criterion_5_completeness_surrogate(completeness):
    record(completeness.result, limit=600)


def test_criterion_6_truth_lemma(completeness):
    record(acceptance.criterion_6(completeness.invalid))


def test_criterion_7_round_trips(completeness):
    record(acceptance.criterion_7(completeness.invalid, sentences=10_000, models=1_000))
