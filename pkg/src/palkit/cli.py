"""Command-line front end.

Exit codes: 0 success, 1 semantic negative (invalid, inequivalent, proof
failure), 2 usage or parse error, 3 budget exceeded, 4 internal
disagreement between the decision procedure and brute force.
"""

from __future__ import annotations

import argparse
import sys
from typing import Sequence, TextIO

from . import decide
from .proof import ProofError, check_proof, parse_proof
from .reduction import reduce
from .semantics import (BudgetExceeded, ModelError, batches, dump_model,
                        enumerate_kripke_models, evaluate, load_model)
from .syntax import (Implies, ParseError, agents_of, atoms_of, is_static,
                     parse, to_text)

OK, NEGATIVE, USAGE, BUDGET, DISAGREE = 0, 1, 2, 3, 4


class _UsageError(Exception):
    pass


class _ArgParser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _parser() -> argparse.ArgumentParser:
    p = _ArgParser(prog="palkit", description="Public announcement logic over multi-agent S5.")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check-model", help="evaluate a formula on a model file")
    c.add_argument("-m", "--model", required=True, help="model file ('-' for stdin)")
    c.add_argument("-f", "--formula", required=True)
    c.add_argument("-w", "--world", help="only this world")

    c = sub.add_parser("reduce", help="print an announcement-free equivalent")
    c.add_argument("-f", "--formula", required=True)

    c = sub.add_parser("valid", help="decide validity (announcements are reduced first)")
    c.add_argument("-f", "--formula", required=True)
    c.add_argument("--budget", type=int, help="maximal closure size")

    c = sub.add_parser("prove", help="check a proof-term file")
    c.add_argument("-p", "--proof", required=True, help="proof file ('-' for stdin)")
    c.add_argument("-f", "--formula", help="expected conclusion")

    c = sub.add_parser("equiv", help="decide logical equivalence of two formulas")
    c.add_argument("-f", required=True, dest="first")
    c.add_argument("-g", required=True, dest="second")
    c.add_argument("--budget", type=int)
    c.add_argument("--exhaustive-worlds", type=int, metavar="N",
                   help="also search all models up to N worlds")

    c = sub.add_parser("selftest", help="run the acceptance checks")
    c.add_argument("--quick", action="store_true", help="smaller corpora")
    return p


def _read(path: str, stdin: TextIO) -> str:
    if path == "-":
        return stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _check_model(args, stdin, out) -> int:
    model, _ = load_model(_read(args.model, stdin))
    phi = parse(args.formula)
    if args.world is not None:
        print("true" if evaluate(model, model.world(args.world), phi) else "false", file=out)
        return OK
    for w in model.worlds:
        print(f"{model.names[w]}: {'true' if evaluate(model, w, phi) else 'false'}", file=out)
    return OK


def _valid(args, out) -> int:
    phi = parse(args.formula)
    static = phi if is_static(phi) else reduce(phi)
    verdict = decide.valid(static, args.budget)
    if verdict.is_valid:
        print("VALID", file=out)
        return OK
    pm = verdict.countermodel
    # announcements are evaluated on the original formula as a second check
    if evaluate(pm.model, pm.point, phi):
        raise decide.CertificateError("countermodel does not falsify the input formula")
    print("INVALID", file=out)
    out.write(dump_model(pm.model, pm.point))
    return NEGATIVE


def _prove(args, stdin, out) -> int:
    term = parse_proof(_read(args.proof, stdin))
    target = parse(args.formula) if args.formula else None
    try:
        judgment = check_proof(term)
    except ProofError as exc:
        print(f"FAIL: {exc}", file=out)
        return NEGATIVE
    if target is None:
        print(to_text(judgment.conclusion), file=out)
        return OK
    if judgment.conclusion != target:
        print(f"FAIL: proves {to_text(judgment.conclusion)}, not {to_text(target)}", file=out)
        return NEGATIVE
    print(f"OK: {to_text(target)}", file=out)
    return OK


def _equiv(args, out) -> int:
    a, b = parse(args.first), parse(args.second)
    ra, rb = reduce(a), reduce(b)
    witness = None
    for left, right in ((ra, rb), (rb, ra)):
        verdict = decide.valid(Implies(left, right), args.budget)
        if not verdict.is_valid:
            witness = verdict.countermodel
            break
    if args.exhaustive_worlds:
        atoms = sorted(atoms_of(a) | atoms_of(b))
        agents = sorted(agents_of(a) | agents_of(b))
        brute = None
        for batch in batches(enumerate_kripke_models(args.exhaustive_worlds, atoms, agents)):
            diff = batch.truth(a) != batch.truth(b)
            if diff.any():
                k, w = map(int, divmod(int(diff.argmax()), batch.n))
                brute = (batch.models[k], w)
                break
        if brute is not None and witness is None:
            print("error: decision procedure and model search disagree", file=sys.stderr)
            return DISAGREE
    if witness is None:
        print("EQUIVALENT", file=out)
        return OK
    print("INEQUIVALENT", file=out)
    out.write(dump_model(witness.model, witness.point))
    return NEGATIVE


def _selftest(args, out) -> int:
    from .acceptance import run_all
    results = run_all(quick=args.quick, log=out)
    return OK if all(r.passed for r in results) else NEGATIVE


def run(argv: Sequence[str], stdin: TextIO | None = None, stdout: TextIO | None = None,
        stderr: TextIO | None = None) -> int:
    stdin = stdin or sys.stdin
    out = stdout or sys.stdout
    err = stderr or sys.stderr
    try:
        args = _parser().parse_args(list(argv))
        if args.command == "check-model":
            return _check_model(args, stdin, out)
        if args.command == "reduce":
            print(to_text(reduce(parse(args.formula))), file=out)
            return OK
        if args.command == "valid":
            return _valid(args, out)
        if args.command == "prove":
            return _prove(args, stdin, out)
        if args.command == "equiv":
            return _equiv(args, out)
        return _selftest(args, out)
    except (_UsageError, ParseError, ModelError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=err)
        return USAGE
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=err)
        return BUDGET


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
