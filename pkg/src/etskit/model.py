"""Epistemic transition systems.

A system bundles sorted registries of agents, states, and votes, a per-agent
partition of the states into indistinguishability classes, a serial vote
aggregation mechanism, and a valuation of propositional variables.  All data
is canonicalized on construction and treated as immutable afterwards, so
every operation here is a pure read.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping

from .errors import InputError, SystemFormatError, UnknownIdentifierError

_IDENT = re.compile(r"[A-Za-z0-9_]+\Z")

Coalition = tuple[str, ...]


def _check_ident(kind: str, name: str) -> str:
    if not isinstance(name, str) or not _IDENT.match(name):
        raise InputError(f"bad {kind} identifier {name!r}: expected a nonempty "
                         "token of letters, digits, or underscores")
    return name


def coalition(agents: Iterable[str]) -> Coalition:
    """Canonical coalition: sorted, duplicate-free tuple of agent names."""
    return tuple(sorted(set(agents)))


@dataclass(frozen=True)
class StrategyProfile:
    """One vote per member of a coalition.

    The assignment domain is exactly the coalition; the empty coalition has
    exactly one profile, the empty one.
    """

    agents: Coalition
    votes: tuple[str, ...]

    def __post_init__(self):
        if tuple(sorted(set(self.agents))) != self.agents:
            raise InputError(f"profile coalition {self.agents!r} is not sorted "
                             "and duplicate-free")
        if len(self.votes) != len(self.agents):
            raise InputError(f"profile assigns {len(self.votes)} votes to "
                             f"{len(self.agents)} agents")
        for a in self.agents:
            _check_ident("agent", a)
        for v in self.votes:
            _check_ident("vote", v)

    @classmethod
    def from_mapping(cls, assignment: Mapping[str, str]) -> "StrategyProfile":
        agents = coalition(assignment)
        return cls(agents, tuple(assignment[a] for a in agents))

    def vote_for(self, agent: str) -> str:
        try:
            return self.votes[self.agents.index(agent)]
        except ValueError:
            raise UnknownIdentifierError(f"agent {agent!r} is not in the "
                                         f"profile's coalition") from None

    def items(self) -> Iterator[tuple[str, str]]:
        return iter(zip(self.agents, self.votes))

    def pairs_str(self) -> str:
        return " ".join(f"{a}={v}" for a, v in self.items())

    def __str__(self) -> str:
        return "{" + ", ".join(f"{a}={v}" for a, v in self.items()) + "}"


@dataclass(frozen=True)
class Mechanism:
    """Vote aggregation table, expanded to one entry per full profile.

    ``table[state][votes]`` is the set of possible successor states when the
    full strategy profile ``votes`` (one vote per agent, in sorted agent
    order) is cast in ``state``.  Multiple successors are legal; seriality
    (at least one successor per state and full profile) is an invariant
    checked by :func:`validate_system`, not enforced here.
    """

    table: Mapping[str, Mapping[tuple[str, ...], frozenset[str]]]

    @classmethod
    def from_triples(
        cls, triples: Iterable[tuple[str, tuple[str, ...], str]]
    ) -> "Mechanism":
        acc: dict[str, dict[tuple[str, ...], set[str]]] = {}
        for source, votes, target in triples:
            acc.setdefault(source, {}).setdefault(tuple(votes), set()).add(target)
        return cls({
            w: {p: frozenset(ts) for p, ts in rows.items()}
            for w, rows in acc.items()
        })

    def targets(self, state: str, votes: tuple[str, ...]) -> frozenset[str]:
        return self.table.get(state, {}).get(votes, frozenset())

    def triples(self) -> Iterator[tuple[str, tuple[str, ...], str]]:
        for w in sorted(self.table):
            for votes in sorted(self.table[w]):
                for t in sorted(self.table[w][votes]):
                    yield w, votes, t


@dataclass(frozen=True)
class EpistemicTransitionSystem:
    """States, per-agent indistinguishability, votes, mechanism, valuation."""

    agents: Coalition
    states: tuple[str, ...]
    votes: tuple[str, ...]
    indist: Mapping[str, tuple[frozenset[str], ...]]
    mechanism: Mechanism
    valuation: Mapping[str, frozenset[str]]
    name: str = "<system>"

    def __post_init__(self):
        object.__setattr__(self, "agents", tuple(sorted(set(self.agents))))
        object.__setattr__(self, "states", tuple(sorted(set(self.states))))
        object.__setattr__(self, "votes", tuple(sorted(set(self.votes))))
        indist = {
            a: tuple(sorted((frozenset(b) for b in blocks), key=sorted))
            for a, blocks in self.indist.items()
        }
        object.__setattr__(self, "indist", indist)
        object.__setattr__(
            self,
            "valuation",
            {p: frozenset(ws) for p, ws in self.valuation.items()},
        )

    def require_state(self, w: str) -> str:
        if w not in self.states:
            raise UnknownIdentifierError(f"unknown state {w!r}")
        return w

    def require_agents(self, agents: Iterable[str]) -> Coalition:
        c = coalition(agents)
        missing = [a for a in c if a not in self.agents]
        if missing:
            raise UnknownIdentifierError(
                f"unknown agent{'s' if len(missing) > 1 else ''}: "
                + " ".join(missing)
            )
        return c

    def class_of(self, agent: str, state: str) -> frozenset[str]:
        """Indistinguishability class of ``state`` for one agent."""
        for block in self.indist.get(agent, ()):
            if state in block:
                return block
        return frozenset((state,))

    def prop_states(self, var: str) -> frozenset[str]:
        """Extension of a propositional variable; unknown variables are empty."""
        return self.valuation.get(var, frozenset())


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    violations: tuple[str, ...] = ()

    def __bool__(self) -> bool:
        return self.ok


def validate_system(sys: EpistemicTransitionSystem) -> ValidationReport:
    """Check every structural invariant; violations are data, not failures."""
    bad: list[str] = []
    states = set(sys.states)

    if not sys.agents:
        bad.append("agent registry is empty")
    if not sys.votes:
        bad.append("vote registry is empty")

    for a in sorted(sys.indist):
        if a not in sys.agents:
            bad.append(f"indist {a}: unknown agent {a!r}")
    for a in sys.agents:
        blocks = sys.indist.get(a, ())
        seen: set[str] = set()
        for block in blocks:
            for w in sorted(block):
                if w not in states:
                    bad.append(f"indist {a}: unknown state {w!r}")
                elif w in seen:
                    bad.append(f"indist {a}: not a partition: state {w} "
                               "appears in more than one class")
            seen |= set(block)
        for w in sys.states:
            if w not in seen:
                bad.append(f"indist {a}: not a partition: state {w} missing "
                           "from every class")

    for p in sorted(sys.valuation):
        for w in sorted(sys.valuation[p]):
            if w not in states:
                bad.append(f"prop {p}: unknown state {w!r}")

    for w in sorted(sys.mechanism.table):
        if w not in states:
            bad.append(f"mechanism: unknown source state {w!r}")
    for w, votes, t in sys.mechanism.triples():
        if len(votes) != len(sys.agents):
            bad.append(f"mechanism: profile ({' '.join(votes)}) at state {w} "
                       f"does not cover the {len(sys.agents)} agents")
            continue
        for v in votes:
            if v not in sys.votes:
                bad.append(f"mechanism: unknown vote {v!r} at state {w}")
        if t not in states:
            bad.append(f"mechanism: unknown target state {t!r} from {w}")

    # Seriality: every state must move under every full profile.
    if sys.agents and sys.votes:
        for w in sys.states:
            for votes in itertools.product(sys.votes, repeat=len(sys.agents)):
                if not sys.mechanism.targets(w, votes):
                    pairs = " ".join(
                        f"{a}={v}" for a, v in zip(sys.agents, votes)
                    )
                    bad.append(f"state {w} has no transition under profile "
                               f"{pairs}")

    return ValidationReport(not bad, tuple(bad))


def indist_coalition(
    sys: EpistemicTransitionSystem, c: Iterable[str], w1: str, w2: str
) -> bool:
    """True iff ``w1`` and ``w2`` are indistinguishable to every member of
    the coalition; vacuously true for the empty coalition."""
    c = sys.require_agents(c)
    sys.require_state(w1)
    sys.require_state(w2)
    return all(w2 in sys.class_of(a, w1) for a in c)


def coalition_class(
    sys: EpistemicTransitionSystem, c: Iterable[str], w: str
) -> frozenset[str]:
    """All states the coalition cannot tell apart from ``w``."""
    c = sys.require_agents(c)
    sys.require_state(w)
    block = set(sys.states)
    for a in c:
        block &= sys.class_of(a, w)
    return frozenset(block)


def outcomes(
    sys: EpistemicTransitionSystem, w: str, profile: StrategyProfile
) -> frozenset[str]:
    """States reachable from ``w`` under some full extension of ``profile``."""
    sys.require_state(w)
    sys.require_agents(profile.agents)
    for v in profile.votes:
        if v not in sys.votes:
            raise UnknownIdentifierError(f"unknown vote {v!r}")
    fixed = dict(profile.items())
    options = [
        (fixed[a],) if a in fixed else sys.votes for a in sys.agents
    ]
    result: set[str] = set()
    for votes in itertools.product(*options):
        result |= sys.mechanism.targets(w, votes)
    return frozenset(result)


def enumerate_profiles(
    sys: EpistemicTransitionSystem, c: Iterable[str]
) -> list[StrategyProfile]:
    """All |V|^|C| profiles of the coalition, in lexicographic order over
    (sorted agents, sorted votes).  Deterministic; the empty coalition yields
    exactly one empty profile."""
    c = sys.require_agents(c)
    return [
        StrategyProfile(c, votes)
        for votes in itertools.product(sys.votes, repeat=len(c))
    ]


# ---------------------------------------------------------------------------
# System file format
#
#   # comment
#   agents: a b
#   votes: L R
#   states: u v w
#   prop p: w            (zero or more; unlisted variables are empty)
#   indist a: {u v} {w}  (at most one line per agent; unlisted states are
#                         singleton classes)
#   trans u [a=L b=*] -> w   (one or more; * means any vote; agents not
#                             mentioned in the bracket are wildcards)
# ---------------------------------------------------------------------------

_TRANS = re.compile(r"trans\s+(\S+)\s+\[([^\]]*)\]\s*->\s*(\S+)\s*\Z")
_BLOCK = re.compile(r"\{([^{}]*)\}")


def load_system(text: str, name: str = "<string>") -> EpistemicTransitionSystem:
    """Parse the line-oriented system format; rejects unknown identifiers
    with line numbers."""
    agents: list[str] | None = None
    votes: list[str] | None = None
    states: list[str] | None = None
    deferred: list[tuple[int, str]] = []

    def fail(lineno: int, msg: str) -> SystemFormatError:
        return SystemFormatError(f"{name}: line {lineno}: {msg}")

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, _, rest = line.partition(":")
        key = key.strip()
        if key in ("agents", "votes", "states"):
            if ":" not in line:
                raise fail(lineno, f"expected '{key}: ...'")
            toks = rest.split()
            if not toks:
                raise fail(lineno, f"{key} registry must not be empty")
            for t in toks:
                if not _IDENT.match(t):
                    raise fail(lineno, f"bad identifier {t!r}")
            if len(set(toks)) != len(toks):
                raise fail(lineno, f"duplicate identifier in {key} registry")
            if key == "agents":
                if agents is not None:
                    raise fail(lineno, "duplicate agents line")
                agents = toks
            elif key == "votes":
                if votes is not None:
                    raise fail(lineno, "duplicate votes line")
                votes = toks
            else:
                if states is not None:
                    raise fail(lineno, "duplicate states line")
                states = toks
        else:
            deferred.append((lineno, line))

    if agents is None:
        raise SystemFormatError(f"{name}: missing 'agents:' line")
    if votes is None:
        raise SystemFormatError(f"{name}: missing 'votes:' line")
    if states is None:
        raise SystemFormatError(f"{name}: missing 'states:' line")

    agent_set, vote_set, state_set = set(agents), set(votes), set(states)
    valuation: dict[str, frozenset[str]] = {}
    indist: dict[str, list[frozenset[str]]] = {}
    triples: list[tuple[str, tuple[str, ...], str]] = []
    sorted_agents = tuple(sorted(agent_set))

    for lineno, line in deferred:
        if line.startswith("prop"):
            head, _, rest = line.partition(":")
            parts = head.split()
            if len(parts) != 2 or ":" not in line:
                raise fail(lineno, "expected 'prop NAME: state...'")
            p = parts[1]
            if not _IDENT.match(p):
                raise fail(lineno, f"bad variable name {p!r}")
            if p in valuation:
                raise fail(lineno, f"duplicate prop line for {p!r}")
            ws = rest.split()
            for w in ws:
                if w not in state_set:
                    raise fail(lineno, f"unknown state {w!r}")
            valuation[p] = frozenset(ws)
        elif line.startswith("indist"):
            head, _, rest = line.partition(":")
            parts = head.split()
            if len(parts) != 2 or ":" not in line:
                raise fail(lineno, "expected 'indist AGENT: {s1 s2} ...'")
            a = parts[1]
            if a not in agent_set:
                raise fail(lineno, f"unknown agent {a!r}")
            if a in indist:
                raise fail(lineno, f"duplicate indist line for agent {a!r}")
            stripped = _BLOCK.sub("", rest).strip()
            if stripped:
                raise fail(lineno, f"stray text {stripped!r} outside a {{...}} "
                           "class")
            blocks = []
            for body in _BLOCK.findall(rest):
                members = body.replace(",", " ").split()
                if not members:
                    raise fail(lineno, "empty indistinguishability class")
                for w in members:
                    if w not in state_set:
                        raise fail(lineno, f"unknown state {w!r}")
                blocks.append(frozenset(members))
            indist[a] = blocks
        elif line.startswith("trans"):
            m = _TRANS.match(line)
            if not m:
                raise fail(lineno, "expected 'trans STATE [a=V b=*] -> STATE'")
            src, pattern, dst = m.group(1), m.group(2), m.group(3)
            if src not in state_set:
                raise fail(lineno, f"unknown state {src!r}")
            if dst not in state_set:
                raise fail(lineno, f"unknown state {dst!r}")
            choice: dict[str, tuple[str, ...]] = {}
            for item in pattern.replace(",", " ").split():
                agent, eq, vote = item.partition("=")
                if not eq:
                    raise fail(lineno, f"expected AGENT=VOTE, got {item!r}")
                if agent not in agent_set:
                    raise fail(lineno, f"unknown agent {agent!r}")
                if agent in choice:
                    raise fail(lineno, f"agent {agent!r} listed twice")
                if vote == "*":
                    choice[agent] = tuple(sorted(vote_set))
                elif vote in vote_set:
                    choice[agent] = (vote,)
                else:
                    raise fail(lineno, f"unknown vote {vote!r}")
            options = [
                choice.get(a, tuple(sorted(vote_set))) for a in sorted_agents
            ]
            for full in itertools.product(*options):
                triples.append((src, full, dst))
        else:
            raise fail(lineno, f"unrecognized line {line!r}")

    if not triples:
        raise SystemFormatError(f"{name}: no trans lines")

    # Unlisted states become singleton classes.
    full_indist: dict[str, tuple[frozenset[str], ...]] = {}
    for a in sorted_agents:
        blocks = list(indist.get(a, []))
        listed = set().union(*blocks) if blocks else set()
        blocks.extend(frozenset((w,)) for w in state_set - listed)
        full_indist[a] = tuple(blocks)

    return EpistemicTransitionSystem(
        agents=sorted_agents,
        states=tuple(sorted(state_set)),
        votes=tuple(sorted(vote_set)),
        indist=full_indist,
        mechanism=Mechanism.from_triples(triples),
        valuation=valuation,
        name=name,
    )


def load_system_path(path) -> EpistemicTransitionSystem:
    from pathlib import Path

    path = Path(path)
    return load_system(path.read_text(encoding="utf-8"), name=path.name)
