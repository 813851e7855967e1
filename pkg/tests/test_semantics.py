import pytest

import etskit as ek
from etskit import (
    Evaluator, StrategyProfile, evaluate, evaluate_naive, find_witness,
    holds_everywhere, parse_claims, parse_formula,
)
from etskit.errors import ClaimsFormatError, InputError, UnknownIdentifierError

ENGINES = ["python"] + (["compiled"] if ek.HAVE_COMPILED else [])


@pytest.fixture(params=ENGINES)
def engine(request):
    return request.param


class TestGoldenClaims:
    def test_corpus(self, systems, claims_map, engine):
        for name, sys in systems.items():
            for report in ek.check_claims(sys, claims_map[name], engine=engine):
                assert report.matches, f"{name}: {report.claim}"

    def test_corpus_naive(self, systems, claims_map):
        for name, sys in systems.items():
            for report in ek.check_claims(sys, claims_map[name], naive=True):
                assert report.matches, f"{name}: {report.claim}"


class TestEvaluate:
    def test_t1(self, systems, engine):
        t1 = systems["t1"]
        assert evaluate(t1, "u", parse_formula("S{a} p"), engine)
        assert not evaluate(t1, "u", parse_formula("H{a} p"), engine)
        assert evaluate(t1, "u", parse_formula("K{a} S{a} p"), engine)

    def test_t3_imperfect_recall(self, systems, engine):
        t3 = systems["t3"]
        assert evaluate(t3, "s", parse_formula("H{a} S{a} p"), engine)
        assert not evaluate(t3, "s", parse_formula("H{a} H{a} p"), engine)

    def test_t8_empty_coalition(self, systems, engine):
        t8 = systems["t8"]
        assert evaluate(t8, "v", parse_formula("S{} p"), engine)
        assert not evaluate(t8, "v", parse_formula("K{a} S{} p"), engine)
        assert evaluate(t8, "v", parse_formula("K{a,b} S{} p"), engine)

    def test_nontermination_forced_by_seriality(self, systems, engine):
        for sys in systems.values():
            for w in sys.states:
                assert evaluate(sys, w, parse_formula("!S{a} false"), engine)

    def test_unknown_variable_false_everywhere(self, systems, engine):
        t1 = systems["t1"]
        for w in t1.states:
            assert not evaluate(t1, w, parse_formula("fresh_var"), engine)
            assert evaluate(t1, w, parse_formula("!fresh_var"), engine)

    def test_unknown_state_raises(self, systems):
        with pytest.raises(UnknownIdentifierError):
            evaluate(systems["t1"], "ghost", parse_formula("p"))

    def test_unknown_coalition_agent_raises(self, systems):
        with pytest.raises(UnknownIdentifierError):
            evaluate(systems["t1"], "u", parse_formula("K{zz} p"))

    def test_derived_connectives(self, systems, engine):
        t7 = systems["t7"]
        assert evaluate(t7, "w1", parse_formula("p | q"), engine)
        assert evaluate(t7, "u", parse_formula("true & !p"), engine)
        assert not evaluate(t7, "u", parse_formula("p | q"), engine)


class TestEvaluatorSessions:
    def test_memo_shared_across_queries(self, systems):
        ev = Evaluator(systems["t6"])
        f = parse_formula("H{b,c} p")
        assert ev.check("v", f)
        assert ev.check("u2", f)
        assert not ev.check("w2", f)

    def test_extension_states(self, systems):
        ev = Evaluator(systems["t1"])
        assert ev.extension_states(parse_formula("S{a} p")) == {"u", "v", "w"}

    def test_extensions_batched(self, systems):
        ev = Evaluator(systems["t1"])
        fs = [parse_formula("p"), parse_formula("!p"), parse_formula("S{a} p")]
        masks = ev.extensions(fs)
        assert masks == [ev.extension(f) for f in fs]

    def test_engine_selection_reported(self, systems):
        assert Evaluator(systems["t1"], engine="python").engine_name == "python"
        if ek.HAVE_COMPILED:
            assert Evaluator(systems["t1"]).engine_name == "compiled"


class TestNaiveOracle:
    def test_t7_examples(self, systems):
        t7 = systems["t7"]
        assert not evaluate_naive(t7, "u", parse_formula("S{a,b} p"))
        assert evaluate_naive(t7, "u", parse_formula("H{a,b} (p | q)"))

    def test_agrees_with_engine_on_corpus(self, systems, claims_map):
        for name, sys in systems.items():
            ev = Evaluator(sys)
            for claim in claims_map[name]:
                assert (ev.check(claim.state, claim.formula)
                        == evaluate_naive(sys, claim.state, claim.formula))


class TestHoldsEverywhere:
    def test_examples(self, systems):
        t1 = systems["t1"]
        assert holds_everywhere(t1, parse_formula("p -> p"))
        assert not holds_everywhere(t1, parse_formula("p"))
        for sys in systems.values():
            assert holds_everywhere(sys, parse_formula("!S{} false"))


class TestFindWitness:
    def test_know_how_witness(self, systems):
        assert find_witness(systems["t2"], "u", parse_formula("H{a} p")) \
            == StrategyProfile(("a",), ("L",))

    def test_strategy_witness(self, systems):
        assert find_witness(systems["t1"], "u", parse_formula("S{a} p")) \
            == StrategyProfile(("a",), ("L",))

    def test_no_witness_iff_false(self, systems):
        assert find_witness(systems["t1"], "u", parse_formula("H{a} p")) is None

    def test_lexicographically_first(self, systems):
        # in t6 both {b=R, c=R} works and nothing earlier does
        w = find_witness(systems["t6"], "v", parse_formula("H{b,c} p"))
        assert w == StrategyProfile(("b", "c"), ("R", "R"))

    def test_empty_coalition_witness(self, systems):
        assert find_witness(systems["t8"], "v", parse_formula("S{} p")) \
            == StrategyProfile((), ())

    def test_witness_certifies(self, systems):
        # replaying the profile through the model operations re-proves it
        t6 = systems["t6"]
        f = parse_formula("H{b,c} p")
        w = find_witness(t6, "v", f)
        ext = Evaluator(t6).extension_states(parse_formula("p"))
        reach = set()
        for w2 in t6.states:
            if ek.indist_coalition(t6, ("b", "c"), "v", w2):
                reach |= ek.outcomes(t6, w2, w)
        assert reach <= ext

    def test_non_modal_top_rejected(self, systems):
        with pytest.raises(InputError):
            find_witness(systems["t1"], "u", parse_formula("K{a} p"))


class TestClaimsFormat:
    def test_parse(self):
        claims = parse_claims("# c\nu |= p\nv |/= K{a} p\n")
        assert [(c.state, c.expected) for c in claims] \
            == [("u", True), ("v", False)]

    def test_bad_relation(self):
        with pytest.raises(ClaimsFormatError, match="line 1"):
            parse_claims("u != p\n")

    def test_bad_formula_reports_line(self):
        with pytest.raises(ClaimsFormatError, match="line 2"):
            parse_claims("u |= p\nv |= (((\n")

    def test_reports_have_witnesses_for_modal_claims(self, systems):
        claims = parse_claims("u |= S{a} p\n")
        [report] = ek.check_claims(systems["t1"], claims)
        assert report.matches and report.witness is not None
