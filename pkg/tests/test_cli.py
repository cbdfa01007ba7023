import io
import subprocess
import sys

import pytest

from palkit import acceptance
from palkit.cli import BUDGET, NEGATIVE, OK, USAGE, run
from palkit.semantics import evaluate, load_model
from palkit.syntax import parse


def call(*argv, stdin=""):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), stdin=io.StringIO(stdin), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture
def files(tmp_path):
    for name in ("id_provable.proof", "muddy3.model"):
        (tmp_path / name).write_text(acceptance.fixture_text(name))
    return tmp_path


def muddy_formulas():
    rows = []
    for line in acceptance.fixture_text("muddy3.formulas").splitlines():
        if line.strip() and not line.startswith("#"):
            # the formula itself may contain '|', so split off the outer fields only
            name, rest = line.split("|", 1)
            formula, expected = rest.rsplit("|", 1)
            name, formula, expected = name.strip(), formula.strip(), expected.strip()
            rows.append((name, formula, expected == "true"))
    return rows


class TestExamples:
    def test_valid_ref(self):
        assert call("valid", "-f", "[a]p -> p") == (OK, "VALID\n", "")

    def test_reduce(self):
        assert call("reduce", "-f", "[! p][a] q") == (OK, "p -> [a](p -> q)\n", "")

    def test_prove_fixture(self, files):
        code, out, _ = call("prove", "-p", str(files / "id_provable.proof"), "-f", "p -> p")
        assert (code, out) == (OK, "OK: p -> p\n")


class TestValid:
    def test_invalid_prints_countermodel(self):
        code, out, _ = call("valid", "-f", "p -> [a]p")
        assert code == NEGATIVE
        head, body = out.split("\n", 1)
        assert head == "INVALID"
        model, point = load_model(body)
        assert len(model) == 2
        assert not evaluate(model, point, parse("p -> [a]p"))

    def test_countermodel_round_trips_through_check_model(self):
        formula = "[! p] [a]q -> q"
        code, out, _ = call("valid", "-f", formula)
        assert code == NEGATIVE
        body = out.split("\n", 1)[1]
        _, point = load_model(body)
        model, _ = load_model(body)
        code, out, _ = call("check-model", "-m", "-", "-f", formula, "-w", model.names[point], stdin=body)
        assert (code, out) == (OK, "false\n")

    def test_announcement_input_is_reduced(self):
        assert call("valid", "-f", "[! p] p")[0] == OK

    def test_budget_exit(self):
        code, _, err = call("valid", "-f", "[a]p -> [b]q -> [a][b]p", "--budget", "4")
        assert code == BUDGET and "budget" in err

    def test_budget_environment(self, monkeypatch):
        monkeypatch.setenv("PALKIT_BUDGET", "2")
        assert call("valid", "-f", "[a]p -> p")[0] == BUDGET


class TestErrors:
    @pytest.mark.parametrize("argv", [
        ("valid", "-f", "p ->"),
        ("frobnicate",),
        ("valid",),
        ("check-model", "-m", "/nonexistent/file", "-f", "p"),
        ("prove", "-p", "-"),
    ])
    def test_usage_errors(self, argv):
        code, out, err = call(*argv)
        assert code == USAGE and out == "" and err.startswith("error:")

    def test_parse_error_reports_column(self):
        _, _, err = call("reduce", "-f", "p & & q")
        assert "column 5" in err

    def test_bad_model(self):
        code, _, err = call("check-model", "-m", "-", "-f", "p",
                            stdin="worlds w1 w2\nagent a: {w1}\n")
        assert code == USAGE and "w2" in err


class TestProve:
    def test_prints_conclusion_without_target(self, files):
        assert call("prove", "-p", str(files / "id_provable.proof")) == (OK, "p -> p\n", "")

    def test_wrong_target(self, files):
        code, out, _ = call("prove", "-p", str(files / "id_provable.proof"), "-f", "q -> q")
        assert code == NEGATIVE and out.startswith("FAIL: proves p -> p")

    def test_broken_proof(self):
        code, out, _ = call("prove", "-p", "-", stdin='(mp (ax1 "p" "q") (ref a "p"))')
        assert code == NEGATIVE and out.startswith("FAIL:")


class TestEquiv:
    def test_equivalent(self):
        assert call("equiv", "-f", "[! p] q", "-g", "p -> q")[:2] == (OK, "EQUIVALENT\n")

    def test_inequivalent_with_witness(self):
        code, out, _ = call("equiv", "-f", "p", "-g", "[a]p")
        assert code == NEGATIVE
        head, body = out.split("\n", 1)
        assert head == "INEQUIVALENT"
        model, point = load_model(body)
        assert evaluate(model, point, parse("p")) != evaluate(model, point, parse("[a]p"))

    def test_exhaustive_agrees(self):
        assert call("equiv", "-f", "[a]p", "-g", "[a][a]p", "--exhaustive-worlds", "3")[0] == OK
        assert call("equiv", "-f", "p", "-g", "<a>p", "--exhaustive-worlds", "3")[0] == NEGATIVE


class TestMuddyChildren:
    @pytest.mark.parametrize("name, formula, expected", muddy_formulas())
    def test_at_point(self, files, name, formula, expected):
        code, out, _ = call("check-model", "-m", str(files / "muddy3.model"), "-f", formula, "-w", "w110")
        assert (code, out) == (OK, "true\n" if expected else "false\n")

    @pytest.mark.parametrize("name, formula, expected", muddy_formulas())
    def test_reduced_form_agrees_everywhere(self, files, name, formula, expected):
        model = str(files / "muddy3.model")
        _, static, _ = call("reduce", "-f", formula)
        _, original_out, _ = call("check-model", "-m", model, "-f", formula)
        _, reduced_out, _ = call("check-model", "-m", model, "-f", static.strip())
        assert original_out == reduced_out
        assert len(original_out.splitlines()) == 8

    def test_no_knowledge_before_announcements(self, files):
        model = str(files / "muddy3.model")
        assert call("check-model", "-m", model, "-f", "[a]ma", "-w", "w110")[1] == "false\n"


def test_selftest_quick():
    code, out, _ = call("selftest", "--quick")
    assert code == OK
    lines = [l for l in out.splitlines() if l.startswith("[")]
    assert len(lines) == 7 and all(l.startswith("[PASS]") for l in lines)


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "palkit.cli", "reduce", "-f", "[! p] q"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout == "p -> q\n"
