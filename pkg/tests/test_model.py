import itertools

import pytest

import etskit as ek
from etskit import StrategyProfile
from etskit.errors import (
    InputError, SystemFormatError, UnknownIdentifierError,
)


def profile(**votes):
    return StrategyProfile.from_mapping(votes)


class TestStrategyProfile:
    def test_domain_must_match_coalition(self):
        with pytest.raises(InputError):
            StrategyProfile(("a", "b"), ("L",))

    def test_coalition_must_be_canonical(self):
        with pytest.raises(InputError):
            StrategyProfile(("b", "a"), ("L", "R"))

    def test_empty_profile(self):
        empty = StrategyProfile((), ())
        assert str(empty) == "{}"
        assert list(empty.items()) == []

    def test_str(self):
        assert str(profile(a="L", b="R")) == "{a=L, b=R}"


class TestLoader:
    def test_corpus_loads_and_validates(self, systems):
        for name, sys in systems.items():
            assert ek.validate_system(sys).ok, name

    def test_registries_sorted(self, systems):
        t6 = systems["t6"]
        assert t6.agents == ("a", "b", "c")
        assert t6.states == tuple(sorted(t6.states))

    def test_unknown_state_reports_line(self):
        text = "agents: a\nvotes: L\nstates: u\ntrans u [a=L] -> nowhere\n"
        with pytest.raises(SystemFormatError, match=r"line 4.*nowhere"):
            ek.load_system(text)

    def test_unknown_agent_in_trans(self):
        text = "agents: a\nvotes: L\nstates: u\ntrans u [b=L] -> u\n"
        with pytest.raises(SystemFormatError, match=r"line 4.*'b'"):
            ek.load_system(text)

    def test_unknown_state_in_indist(self):
        text = ("agents: a\nvotes: L\nstates: u\nindist a: {u ghost}\n"
                "trans u [a=L] -> u\n")
        with pytest.raises(SystemFormatError, match="ghost"):
            ek.load_system(text)

    def test_missing_section(self):
        with pytest.raises(SystemFormatError, match="votes"):
            ek.load_system("agents: a\nstates: u\ntrans u [a=L] -> u\n")

    def test_comments_and_blank_lines(self):
        text = ("# header\nagents: a\n\nvotes: L\nstates: u  # inline\n"
                "trans u [a=*] -> u\n")
        sys = ek.load_system(text)
        assert ek.validate_system(sys).ok

    def test_wildcard_expansion(self, systems):
        # t4's [a=D b=*] line covers both votes of b
        t4 = systems["t4"]
        assert ek.outcomes(t4, "u", profile(a="D", b="C")) == {"w"}
        assert ek.outcomes(t4, "u", profile(a="D", b="D")) == {"w"}

    def test_unlisted_agent_in_pattern_is_wildcard(self):
        text = ("agents: a b\nvotes: L R\nstates: u\n"
                "trans u [a=L] -> u\ntrans u [a=R] -> u\n")
        sys = ek.load_system(text)
        assert ek.validate_system(sys).ok


class TestValidate:
    def test_t1_ok(self, systems):
        assert ek.validate_system(systems["t1"]).ok

    def test_deleted_self_loop_breaks_seriality(self, data_root):
        text = "\n".join(
            line for line in (data_root / "t1.ets").read_text().splitlines()
            if not line.startswith("trans w ")
        )
        sys = ek.load_system(text, "t1-broken")
        report = ek.validate_system(sys)
        assert not report.ok
        assert "state w has no transition under profile a=L" in report.violations
        assert "state w has no transition under profile a=R" in report.violations

    def test_state_in_two_classes_is_not_a_partition(self):
        text = ("agents: a\nvotes: L\nstates: u v\n"
                "indist a: {u v} {u}\n"
                "trans u [a=L] -> u\ntrans v [a=L] -> v\n")
        sys = ek.load_system(text)
        report = ek.validate_system(sys)
        assert not report.ok
        assert any("not a partition" in v for v in report.violations)

    def test_missing_state_in_partition(self):
        sys = ek.EpistemicTransitionSystem(
            agents=("a",), states=("u", "v"), votes=("L",),
            indist={"a": (frozenset({"u"}),)},
            mechanism=ek.Mechanism.from_triples(
                [("u", ("L",), "u"), ("v", ("L",), "v")]
            ),
            valuation={},
        )
        report = ek.validate_system(sys)
        assert any("state v missing" in v for v in report.violations)

    def test_empty_registries_flagged(self):
        sys = ek.EpistemicTransitionSystem(
            agents=(), states=("u",), votes=(),
            indist={}, mechanism=ek.Mechanism({}), valuation={},
        )
        report = ek.validate_system(sys)
        assert "agent registry is empty" in report.violations
        assert "vote registry is empty" in report.violations

    def test_valuation_of_unknown_state(self):
        sys = ek.EpistemicTransitionSystem(
            agents=("a",), states=("u",), votes=("L",),
            indist={"a": (frozenset({"u"}),)},
            mechanism=ek.Mechanism.from_triples([("u", ("L",), "u")]),
            valuation={"p": frozenset({"ghost"})},
        )
        assert any("ghost" in v for v in ek.validate_system(sys).violations)


class TestIndistCoalition:
    def test_t1_singleton(self, systems):
        assert ek.indist_coalition(systems["t1"], ("a",), "u", "v")

    def test_empty_coalition_everywhere(self, systems):
        t1 = systems["t1"]
        for w1 in t1.states:
            for w2 in t1.states:
                assert ek.indist_coalition(t1, (), w1, w2)

    def test_t6_pairs(self, systems):
        t6 = systems["t6"]
        assert ek.indist_coalition(t6, ("a", "b"), "u", "v")
        assert not ek.indist_coalition(t6, ("b", "c"), "u", "v")

    def test_unknown_state_raises(self, systems):
        with pytest.raises(UnknownIdentifierError):
            ek.indist_coalition(systems["t1"], ("a",), "u", "ghost")

    def test_unknown_agent_raises(self, systems):
        with pytest.raises(UnknownIdentifierError):
            ek.indist_coalition(systems["t1"], ("z",), "u", "v")

    def test_equivalence_relation(self, systems):
        t6 = systems["t6"]
        for c in [(), ("a",), ("b", "c"), ("a", "b", "c")]:
            for w1 in t6.states:
                assert ek.indist_coalition(t6, c, w1, w1)
                for w2 in t6.states:
                    assert (ek.indist_coalition(t6, c, w1, w2)
                            == ek.indist_coalition(t6, c, w2, w1))
                    for w3 in t6.states:
                        if (ek.indist_coalition(t6, c, w1, w2)
                                and ek.indist_coalition(t6, c, w2, w3)):
                            assert ek.indist_coalition(t6, c, w1, w3)

    def test_anti_monotone_in_coalition(self, systems):
        t6 = systems["t6"]
        agents = t6.agents
        subsets = [
            tuple(sorted(c)) for r in range(len(agents) + 1)
            for c in itertools.combinations(agents, r)
        ]
        for c in subsets:
            for d in subsets:
                if not set(c) <= set(d):
                    continue
                for w1 in t6.states:
                    for w2 in t6.states:
                        if ek.indist_coalition(t6, d, w1, w2):
                            assert ek.indist_coalition(t6, c, w1, w2)


class TestOutcomes:
    def test_t1_examples(self, systems):
        t1 = systems["t1"]
        assert ek.outcomes(t1, "u", profile(a="L")) == {"w"}
        assert ek.outcomes(t1, "u", StrategyProfile((), ())) == {"w", "w2"}

    def test_t7_consensus_nondeterminism(self, systems):
        assert ek.outcomes(systems["t7"], "u", profile(a="C", b="C")) \
            == {"w1", "w2"}

    def test_never_empty_on_validated_corpus(self, systems):
        for sys in systems.values():
            for w in sys.states:
                for c in ((), sys.agents):
                    for s in ek.enumerate_profiles(sys, c):
                        assert ek.outcomes(sys, w, s)

    def test_restriction_monotonicity(self, systems):
        # extending a profile can only shrink the outcome set
        t6 = systems["t6"]
        for w in t6.states:
            full = profile(a="L", b="R", c="L")
            sub = profile(a="L", b="R")
            assert ek.outcomes(t6, w, full) <= ek.outcomes(t6, w, sub)
            assert ek.outcomes(t6, w, sub) <= ek.outcomes(
                t6, w, profile(a="L"))

    def test_unknown_vote_rejected(self, systems):
        with pytest.raises(UnknownIdentifierError):
            ek.outcomes(systems["t1"], "u", profile(a="X"))


class TestEnumerateProfiles:
    def test_counts(self, systems):
        t6 = systems["t6"]  # two votes, three agents
        for size, c in [(0, ()), (1, ("a",)), (2, ("a", "c")),
                        (3, ("a", "b", "c"))]:
            assert len(ek.enumerate_profiles(t6, c)) == 2 ** size

    def test_empty_coalition_single_profile(self, systems):
        assert ek.enumerate_profiles(systems["t1"], ()) \
            == [StrategyProfile((), ())]

    def test_lexicographic_order(self, systems):
        t1 = systems["t1"]
        assert [s.votes for s in ek.enumerate_profiles(t1, ("a",))] \
            == [("L",), ("R",)]
        t6 = systems["t6"]
        votes = [s.votes for s in ek.enumerate_profiles(t6, ("a", "b"))]
        assert votes == [("L", "L"), ("L", "R"), ("R", "L"), ("R", "R")]

    def test_deterministic(self, systems):
        t6 = systems["t6"]
        assert (ek.enumerate_profiles(t6, ("a", "b"))
                == ek.enumerate_profiles(t6, ("a", "b")))
