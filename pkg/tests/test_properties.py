"""Property suites over random systems and formulas.

Each property runs at least 200 generated cases.  Systems and formulas are
derived deterministically from drawn seeds, which keeps cases cheap and
reproducible under shrinking.
"""

import random

from hypothesis import given, settings, strategies as st

import etskit as ek
from etskit import (
    Evaluator, StrategyProfile, evaluate, indist_coalition, lower_derived,
    outcomes, parse_formula, print_formula,
)
from etskit.formula import How, Know, Strat
from etskit.testgen import (
    GenParams, all_coalitions, random_formula, random_system,
)

CASES = settings(max_examples=200, deadline=None)

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def make_case(seed, depth=2):
    """System plus a formula over its variables and coalitions."""
    sys = random_system(GenParams(seed=seed))
    rng = random.Random(seed ^ 0x5EED)
    f = random_formula(rng, depth, tuple(sorted(sys.valuation)),
                       all_coalitions(sys.agents))
    return sys, rng, f


def pick_coalition(rng, sys):
    return tuple(sorted(rng.sample(sys.agents,
                                   rng.randint(0, len(sys.agents)))))


@CASES
@given(seeds)
def test_strategic_truth_semantically(seed):
    sys, rng, f = make_case(seed)
    c = pick_coalition(rng, sys)
    ev = Evaluator(sys)
    for w in sys.states:
        if ev.check(w, How(c, f)):
            assert ev.check(w, Strat(c, f))


@CASES
@given(seeds)
def test_know_how_constant_on_indistinguishability_classes(seed):
    # positive and negative strategic introspection in one sweep: the H
    # verdict cannot differ across states the coalition cannot tell apart
    sys, rng, f = make_case(seed)
    c = pick_coalition(rng, sys)
    ev = Evaluator(sys)
    verdicts = {w: ev.check(w, How(c, f)) for w in sys.states}
    for w1 in sys.states:
        for w2 in sys.states:
            if indist_coalition(sys, c, w1, w2):
                assert verdicts[w1] == verdicts[w2]


@CASES
@given(seeds)
def test_coalition_monotonicity_of_s_and_h(seed):
    sys, rng, f = make_case(seed)
    d = pick_coalition(rng, sys)
    c = tuple(sorted(rng.sample(d, rng.randint(0, len(d)))))
    ev = Evaluator(sys)
    for w in sys.states:
        if ev.check(w, Strat(c, f)):
            assert ev.check(w, Strat(d, f))
        if ev.check(w, How(c, f)):
            assert ev.check(w, How(d, f))


@CASES
@given(seeds)
def test_empty_coalition_bridge(seed):
    sys, _, f = make_case(seed)
    ev = Evaluator(sys)
    for w in sys.states:
        if ev.check(w, Know((), f)):
            assert ev.check(w, How((), f))


@CASES
@given(seeds)
def test_outcomes_shrink_under_profile_extension(seed):
    sys, rng, _ = make_case(seed)
    d = pick_coalition(rng, sys)
    c = tuple(sorted(rng.sample(d, rng.randint(0, len(d)))))
    votes_d = tuple(rng.choice(sys.votes) for _ in d)
    big = StrategyProfile(d, votes_d)
    small = StrategyProfile(c, tuple(votes_d[d.index(a)] for a in c))
    for w in sys.states:
        assert outcomes(sys, w, big) <= outcomes(sys, w, small)


@CASES
@given(seeds)
def test_indistinguishability_anti_monotone(seed):
    sys, rng, _ = make_case(seed)
    d = pick_coalition(rng, sys)
    c = tuple(sorted(rng.sample(d, rng.randint(0, len(d)))))
    for w1 in sys.states:
        for w2 in sys.states:
            if indist_coalition(sys, d, w1, w2):
                assert indist_coalition(sys, c, w1, w2)


@CASES
@given(seeds)
def test_outcomes_never_empty(seed):
    sys, rng, _ = make_case(seed)
    c = pick_coalition(rng, sys)
    for s in ek.enumerate_profiles(sys, c):
        for w in sys.states:
            assert outcomes(sys, w, s)


@CASES
@given(seeds)
def test_parse_print_round_trip(seed):
    rng = random.Random(seed)
    f = random_formula(rng, 4, ("p", "q", "r"),
                       all_coalitions(("a", "b", "c")))
    assert parse_formula(print_formula(f)) == f


@CASES
@given(seeds)
def test_lower_derived_preserves_evaluation(seed):
    sys, rng, f = make_case(seed, depth=3)
    g = lower_derived(f)
    assert lower_derived(g) == g
    ev = Evaluator(sys)
    for w in sys.states:
        assert ev.check(w, f) == ev.check(w, g)


@CASES
@given(seeds)
def test_engine_agrees_with_naive_oracle(seed):
    sys, rng, f = make_case(seed, depth=2)
    w = rng.choice(sys.states)
    assert evaluate(sys, w, f) == ek.evaluate_naive(sys, w, f)
