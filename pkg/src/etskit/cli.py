"""Command-line entry point.

Exit codes: 0 all checks passed / verdicts matched, 1 usage error, 2 parse
or input error, 3 validation failure, 4 claim or proof failure.  Output is
byte-identical across runs for the same inputs; ``--timing`` opts into
elapsed-time lines.
"""

from __future__ import annotations

import argparse
import sys as _sys
from importlib.resources import files
from pathlib import Path

from .errors import EtskitError
from .formula import How, Strat, parse_formula, print_formula
from .model import load_system_path, validate_system
from .proofkit import (
    check_proof, check_with_registry, parse_proof, parse_registry,
)
from .semantics import Evaluator, check_claims, find_witness, parse_claims
from .testgen import (
    GenParams, axiom_sweep, pool_for_system, random_system,
    rule_preservation_check,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PARSE = 2
EXIT_VALIDATION = 3
EXIT_FAILURE = 4


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _build_parser() -> _Parser:
    p = _Parser(prog="etskit", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("validate", help="check a system file's invariants")
    v.add_argument("system")

    c = sub.add_parser("check", help="evaluate a formula or a claims file")
    c.add_argument("--claims", action="store_true",
                   help="second argument is a claims file")
    c.add_argument("--witness", action="store_true",
                   help="print a witnessing profile for a true top-level S/H")
    c.add_argument("--naive", action="store_true",
                   help="use the no-memoization oracle evaluator")
    c.add_argument("--timing", action="store_true")
    c.add_argument("system")
    c.add_argument("args", nargs="+", metavar="STATE FORMULA | CLAIMS-FILE")

    r = sub.add_parser("prove", help="check a proof script")
    r.add_argument("proof")
    r.add_argument("--lemmas", metavar="REGISTRY",
                   help="lemma registry file (NAME: PATH per line)")

    s = sub.add_parser("sweep", help="axiom and rule sweeps on random systems")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--count", type=int, default=20)
    s.add_argument("--depth", type=int, default=2)
    s.add_argument("--max-states", type=int, default=4)
    s.add_argument("--max-agents", type=int, default=3)
    s.add_argument("--max-votes", type=int, default=2)
    s.add_argument("--density", type=float, default=0.3)
    s.add_argument("--timing", action="store_true")

    e = sub.add_parser("examples", help="list or extract the bundled corpus")
    e.add_argument("--extract", metavar="DIR")

    return p


def _bundled_names() -> list[str]:
    root = files("etskit") / "data"
    names = [f"t{i}.ets" for i in range(1, 9)]
    names += [f"t{i}.claims" for i in range(1, 9)]
    proofs = root / "proofs"
    names += sorted(
        f"proofs/{entry.name}" for entry in proofs.iterdir()
        if entry.name.endswith(".prf")
    )
    names.append("proofs/registry.txt")
    return names


def _cmd_validate(ns, out) -> int:
    sys = load_system_path(ns.system)
    report = validate_system(sys)
    if report.ok:
        print(f"{sys.name}: ok", file=out)
        return EXIT_OK
    print(f"{sys.name}: {len(report.violations)} violation"
          f"{'s' if len(report.violations) > 1 else ''}", file=out)
    for v in report.violations:
        print(f"  {v}", file=out)
    return EXIT_VALIDATION


def _cmd_check(ns, out) -> int:
    sys = load_system_path(ns.system)
    report = validate_system(sys)
    if not report.ok:
        print(f"{sys.name}: fails validation "
              f"({len(report.violations)} violations)", file=out)
        return EXIT_VALIDATION

    if ns.claims:
        if len(ns.args) != 1:
            raise _UsageError("check --claims takes SYSTEM CLAIMS-FILE")
        path = Path(ns.args[0])
        claims = parse_claims(path.read_text(encoding="utf-8"), path.name)
        results = check_claims(sys, claims, naive=ns.naive)
        failed = 0
        for r in results:
            status = "pass" if r.matches else "FAIL"
            line = f"{r.claim} : {status}"
            if not r.matches:
                failed += 1
                line += f" (evaluates {'true' if r.verdict else 'false'})"
            if ns.witness and r.witness is not None:
                line += f"  witness: {r.witness}"
            if ns.timing:
                line += f"  [{r.elapsed * 1000:.2f} ms]"
            print(line, file=out)
        print(f"claims: {len(results) - failed} passed, {failed} failed",
              file=out)
        return EXIT_OK if failed == 0 else EXIT_FAILURE

    if len(ns.args) != 2:
        raise _UsageError("check takes SYSTEM STATE FORMULA")
    state, text = ns.args
    f = parse_formula(text)
    if ns.naive:
        from .semantics import evaluate_naive
        verdict = evaluate_naive(sys, state, f)
    else:
        verdict = Evaluator(sys).check(state, f)
    line = f"{state} |= {print_formula(f)} : {'true' if verdict else 'false'}"
    if ns.witness and verdict and isinstance(f, (Strat, How)):
        line += f"  witness: {find_witness(sys, state, f)}"
    print(line, file=out)
    return EXIT_OK if verdict else EXIT_FAILURE


def _cmd_prove(ns, out) -> int:
    registry = {}
    if ns.lemmas:
        reg_path = Path(ns.lemmas)
        entries = parse_registry(reg_path.read_text(encoding="utf-8"),
                                 reg_path.name)
        scripts = []
        for name, rel in entries:
            script_path = reg_path.parent / rel
            scripts.append(
                (name, parse_proof(script_path.read_text(encoding="utf-8"),
                                   script_path.name))
            )
        verdicts, registry = check_with_registry(scripts)
        for name, verdict in verdicts.items():
            if not verdict:
                print(f"lemma {name}: rejected at line {verdict.bad_line}: "
                      f"{verdict.reason}", file=out)
                return EXIT_FAILURE

    path = Path(ns.proof)
    proof = parse_proof(path.read_text(encoding="utf-8"), path.name)
    verdict = check_proof(proof, registry)
    if verdict:
        print(f"{proof.name}: accepted ({len(proof.lines)} lines)", file=out)
        return EXIT_OK
    print(f"{proof.name}: rejected at line {verdict.bad_line}: "
          f"{verdict.reason}", file=out)
    return EXIT_FAILURE


def _cmd_sweep(ns, out) -> int:
    import time

    t0 = time.perf_counter()
    total_instances = 0
    total_checked = 0
    violations: list[str] = []
    failures: list[str] = []
    for k in range(ns.count):
        params = GenParams(
            seed=ns.seed + k, max_states=ns.max_states,
            max_agents=ns.max_agents, max_votes=ns.max_votes,
            transition_density=ns.density, formula_depth=ns.depth,
        )
        sys = random_system(params)
        pool, capped = pool_for_system(sys, depth=ns.depth)
        ev = Evaluator(sys)
        rep = axiom_sweep(sys, pool, evaluator=ev)
        pres = rule_preservation_check(sys, pool, evaluator=ev)
        total_instances += rep.total_instances
        total_checked += pres.checked
        violations.extend(f"seed={params.seed} {v}" for v in rep.violations)
        failures.extend(f"seed={params.seed} {v}" for v in pres.failures)
        if capped:
            print(f"seed={params.seed}: pool capped", file=out)

    print(f"sweep: systems={ns.count} base_seed={ns.seed} depth={ns.depth}",
          file=out)
    for line in violations:
        print(f"violation: {line}", file=out)
    for line in failures:
        print(f"preservation-failure: {line}", file=out)
    print(f"summary.systems={ns.count}", file=out)
    print(f"summary.seed={ns.seed}", file=out)
    print(f"summary.axiom_instances={total_instances}", file=out)
    print(f"summary.preservation_checked={total_checked}", file=out)
    print(f"summary.violations={len(violations)}", file=out)
    print(f"summary.preservation_failures={len(failures)}", file=out)
    if ns.timing:
        print(f"summary.elapsed_s={time.perf_counter() - t0:.2f}", file=out)
    return EXIT_OK if not violations and not failures else EXIT_FAILURE


def _cmd_examples(ns, out) -> int:
    names = _bundled_names()
    if not ns.extract:
        for name in names:
            print(name, file=out)
        return EXIT_OK
    root = files("etskit") / "data"
    target = Path(ns.extract)
    for name in names:
        dest = target / name
        dest.parent.mkdir(parents=True, exist_ok=True)
        dest.write_text((root / name).read_text(encoding="utf-8"),
                        encoding="utf-8")
        print(f"wrote {dest}", file=out)
    return EXIT_OK


def run(argv: list[str] | None = None, out=None) -> int:
    out = out if out is not None else _sys.stdout
    parser = _build_parser()
    try:
        ns = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=_sys.stderr)
        return EXIT_USAGE

    try:
        if ns.command == "validate":
            return _cmd_validate(ns, out)
        if ns.command == "check":
            return _cmd_check(ns, out)
        if ns.command == "prove":
            return _cmd_prove(ns, out)
        if ns.command == "sweep":
            return _cmd_sweep(ns, out)
        if ns.command == "examples":
            return _cmd_examples(ns, out)
        raise _UsageError(f"unknown command {ns.command!r}")
    except _UsageError as exc:
        print(f"usage error: {exc}", file=_sys.stderr)
        return EXIT_USAGE
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return EXIT_PARSE
    except EtskitError as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return EXIT_PARSE


def main() -> None:
    raise SystemExit(run())


if __name__ == "__main__":
    main()
