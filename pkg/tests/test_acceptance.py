"""Acceptance suite: one test per criterion, one printed verdict line each.

Run with ``pytest tests/test_acceptance.py -v -s``.
"""

import random
import time

import etskit as ek
from etskit import Evaluator, evaluate, evaluate_naive, parse_formula
from etskit.proofkit import bundled_derivations, check_proof, check_with_registry
from etskit.testgen import (
    GenParams, all_coalitions, axiom_sweep, pool_for_system, random_formula,
    random_system, rule_preservation_check,
)

GOLDEN = {
    "t1": [("u", "S{a} p", True), ("v", "S{a} p", True),
           ("u", "H{a} p", False), ("v", "H{a} p", False),
           ("u", "K{a} S{a} p", True), ("v", "K{a} S{a} p", True)],
    "t2": [("u", "H{a} p", True), ("v", "H{a} p", True)],
    "t3": [("s", "H{a} q", True), ("s", "H{a} S{a} p", True),
           ("s", "H{a} H{a} p", False)],
    "t4": [("u", "S{a} p & S{b} p & !S{a} q & !S{b} q", True),
           ("u", "H{a} p & H{b} p", True)],
    "t5": [("u", "S{a} p & !H{a} p & !K{a} S{a} p", True),
           ("u", "H{b} p", True)],
    "t6": [("v", "S{a,b} p & K{a,b} S{a,b} p & !H{a,b} p", True),
           ("v", "H{b,c} p", True)],
    "t7": [("u", "S{a,b} p", False), ("u", "H{a,b} (p | q)", True)],
    "t8": [("v", "S{} p", True), ("v", "K{a} S{} p", False),
           ("v", "K{b} S{} p", False), ("v", "K{a,b} S{} p", True)],
}


def _report(criterion: str, ok: bool, detail: str) -> None:
    print(f"[acceptance] {criterion}: {'PASS' if ok else 'FAIL'} ({detail})")
    assert ok, f"{criterion}: {detail}"


def test_criterion_1_golden_claim_corpus(systems, claims_map):
    t0 = time.perf_counter()
    checked = 0
    mismatches = []
    for name, expectations in GOLDEN.items():
        ev = Evaluator(systems[name])
        for state, text, expected in expectations:
            checked += 1
            if ev.check(state, parse_formula(text)) != expected:
                mismatches.append(f"{name}: {state} {text}")
    # the bundled claims files state the same facts; they must agree too
    for name, sys in systems.items():
        for rep in ek.check_claims(sys, claims_map[name]):
            checked += 1
            if not rep.matches:
                mismatches.append(f"{name}: {rep.claim}")
    elapsed = time.perf_counter() - t0
    _report(
        "criterion 1 golden-claim corpus",
        not mismatches and elapsed < 1.0,
        f"{checked} claims, {len(mismatches)} mismatches, {elapsed:.2f}s"
        f"{'' if elapsed < 1.0 else ' OVER 1s BUDGET'}",
    )


def test_criterion_2_soundness_sweep():
    t0 = time.perf_counter()
    violations = 0
    preservation_failures = 0
    schemas_seen = set()
    instances = 0
    for seed in range(500):
        params = GenParams(seed=seed, max_states=4, max_agents=3, max_votes=2,
                           formula_depth=2)
        sys = random_system(params)
        pool, _ = pool_for_system(sys, depth=2)
        ev = Evaluator(sys)
        rep = axiom_sweep(sys, pool, evaluator=ev)
        pres = rule_preservation_check(sys, pool, evaluator=ev)
        violations += len(rep.violations)
        preservation_failures += len(pres.failures)
        schemas_seen.update(rep.instances)
        instances += rep.total_instances
    elapsed = time.perf_counter() - t0
    _report(
        "criterion 2 soundness sweep",
        violations == 0 and preservation_failures == 0
        and len(schemas_seen) == 11 and elapsed < 60.0,
        f"500 systems, {len(schemas_seen)} schemas, {instances} instances, "
        f"{violations} violations, {preservation_failures} preservation "
        f"failures, {elapsed:.1f}s",
    )


def test_criterion_3_oracle_equivalence():
    disagreements = 0
    for k in range(1000):
        sys = random_system(GenParams(seed=k))
        rng = random.Random(7_000_000 + k)
        f = random_formula(rng, 3, tuple(sorted(sys.valuation)),
                           all_coalitions(sys.agents))
        w = rng.choice(sys.states)
        if evaluate(sys, w, f) != evaluate_naive(sys, w, f):
            disagreements += 1
    _report(
        "criterion 3 oracle equivalence",
        disagreements == 0,
        f"1000 triples, {disagreements} disagreements",
    )


def test_criterion_4_proof_suite():
    import test_proofkit

    scripts = bundled_derivations()
    verdicts, _ = check_with_registry(scripts)
    required = {
        "strategic_positive_introspection", "how_implies_know_strat",
        "monotonicity_h", "monotonicity_s", "s_necessitation",
        "positive_introspection",
    }
    accepted = {name for name, v in verdicts.items() if v}
    missing = required - accepted

    mutants = 0
    survivors = 0
    for name, proof in scripts:
        for _tag, mutant in test_proofkit._mutants(proof):
            mutants += 1
            if check_proof(mutant):
                survivors += 1
    _report(
        "criterion 4 proof suite",
        not missing and mutants >= 20 and survivors == 0,
        f"{len(accepted)}/{len(verdicts)} scripts accepted, "
        f"{mutants} mutants, {survivors} survived",
    )


def test_criterion_5_invariant_suites():
    import test_properties

    suites = [
        test_properties.test_strategic_truth_semantically,
        test_properties.test_know_how_constant_on_indistinguishability_classes,
        test_properties.test_coalition_monotonicity_of_s_and_h,
        test_properties.test_empty_coalition_bridge,
        test_properties.test_outcomes_shrink_under_profile_extension,
        test_properties.test_indistinguishability_anti_monotone,
        test_properties.test_outcomes_never_empty,
        test_properties.test_parse_print_round_trip,
        test_properties.test_lower_derived_preserves_evaluation,
        test_properties.test_engine_agrees_with_naive_oracle,
    ]
    failed = []
    for suite in suites:
        try:
            suite()
        except Exception as exc:  # noqa: BLE001 - report which suite failed
            failed.append(f"{suite.__name__}: {exc}")
    _report(
        "criterion 5 invariant suites",
        not failed,
        f"{len(suites)} suites x 200 cases, failures: {failed or 'none'}",
    )
