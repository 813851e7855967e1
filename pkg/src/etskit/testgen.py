"""Random serial systems and executable soundness sweeps.

A sweep instantiates every axiom schema with every pool formula (or pair)
and every admissible coalition (or pair), and confirms the instance holds
at every state.  The instantiation space is covered exhaustively, not
sampled: instances are grouped by the evaluator-computed extensions of
their metavariable formulas, each group is verified through one
representative, and group sizes make up the reported instance counts.  Two
instances in one group get identical truth values by compositionality, so
this is a quotient of the full space, not a subset of it.  Violations are
reported with representative formulas and the offending states.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from functools import lru_cache

from .errors import InputError
from ._tables import K_HOW, K_STRAT
from .formula import (
    FALSE, TRUE, And, Formula, How, Implies, Know, Not, Or, Strat, Var,
    print_formula,
)
from .model import (
    Coalition, EpistemicTransitionSystem, Mechanism, coalition,
)
from .semantics import Evaluator

POOL_CAP = 5000


@dataclass(frozen=True)
class GenParams:
    """Generator bounds; every generated system passes validation."""

    seed: int
    max_states: int = 4
    max_agents: int = 3
    max_votes: int = 2
    transition_density: float = 0.3
    formula_depth: int = 2
    variable_count: int = 2

    def __post_init__(self):
        for name in ("max_states", "max_agents", "max_votes",
                     "formula_depth", "variable_count"):
            if getattr(self, name) < 1:
                raise InputError(f"{name} must be at least 1")
        if not 0.0 < self.transition_density <= 1.0:
            raise InputError("transition_density must be in (0, 1]")


def _random_partition(rng: random.Random, states: tuple[str, ...]):
    labels = [rng.randrange(len(states)) for _ in states]
    blocks: dict[int, set[str]] = {}
    for w, lb in zip(states, labels):
        blocks.setdefault(lb, set()).add(w)
    return tuple(frozenset(b) for b in blocks.values())


def random_system(params: GenParams) -> EpistemicTransitionSystem:
    """Deterministic in the seed; seriality holds by construction."""
    rng = random.Random(params.seed)
    n_states = rng.randint(1, params.max_states)
    n_agents = rng.randint(1, params.max_agents)
    n_votes = rng.randint(1, params.max_votes)
    states = tuple(f"s{i}" for i in range(n_states))
    agents = tuple(f"a{i}" for i in range(n_agents))
    votes = tuple(f"v{i}" for i in range(n_votes))

    indist = {a: _random_partition(rng, states) for a in agents}

    triples = []
    for w in states:
        for full in itertools.product(votes, repeat=n_agents):
            targets = {rng.choice(states)}
            for t in states:
                if t not in targets and rng.random() < params.transition_density:
                    targets.add(t)
            for t in targets:
                triples.append((w, full, t))

    valuation = {
        f"p{i}": frozenset(w for w in states if rng.random() < 0.5)
        for i in range(params.variable_count)
    }

    return EpistemicTransitionSystem(
        agents=agents, states=states, votes=votes, indist=indist,
        mechanism=Mechanism.from_triples(triples), valuation=valuation,
        name=f"random(seed={params.seed})",
    )


def random_formula(
    rng: random.Random, depth: int, variables: tuple[str, ...],
    coalitions: tuple[Coalition, ...],
) -> Formula:
    """Random member of the language over the given variables/coalitions."""
    if depth <= 0 or rng.random() < 0.2:
        roll = rng.random()
        if roll < 0.8:
            return Var(rng.choice(variables))
        return TRUE if roll < 0.9 else FALSE
    kind = rng.choice(("not", "implies", "and", "or", "know", "strat", "how"))
    sub = lambda: random_formula(rng, depth - 1, variables, coalitions)
    if kind == "not":
        return Not(sub())
    if kind == "implies":
        return Implies(sub(), sub())
    if kind == "and":
        return And(sub(), sub())
    if kind == "or":
        return Or(sub(), sub())
    c = rng.choice(coalitions)
    return {"know": Know, "strat": Strat, "how": How}[kind](c, sub())


def all_coalitions(agents: tuple[str, ...]) -> tuple[Coalition, ...]:
    return tuple(
        coalition(c)
        for r in range(len(agents) + 1)
        for c in itertools.combinations(sorted(agents), r)
    )


@lru_cache(maxsize=32)
def formula_pool(
    agents: tuple[str, ...], depth: int = 2,
    variables: tuple[str, ...] = ("p0", "p1"), cap: int = POOL_CAP,
) -> tuple[tuple[Formula, ...], bool]:
    """All formulas of the given depth over the variables and every
    coalition, deduplicated, generation capped at ``cap`` (the flag reports
    whether the cap was hit)."""
    variables = [Var(v) for v in variables]
    coalitions = all_coalitions(agents)
    pool: list[Formula] = list(variables)
    seen: set[Formula] = set(pool)
    capped = False

    def add(f: Formula) -> bool:
        nonlocal capped
        if len(pool) >= cap:
            capped = True
            return False
        if f not in seen:
            seen.add(f)
            pool.append(f)
        return True

    for _ in range(depth):
        basis = list(pool)
        for f in basis:
            if capped:
                break
            add(Not(f))
            for c in coalitions:
                add(Know(c, f))
                add(Strat(c, f))
                add(How(c, f))
        for f in basis:
            if capped:
                break
            for g in basis:
                if not add(Implies(f, g)):
                    break
        if capped:
            break
    return tuple(pool), capped


def pool_for_system(
    sys: EpistemicTransitionSystem, depth: int = 2, cap: int = POOL_CAP,
) -> tuple[tuple[Formula, ...], bool]:
    """Pool over the system's own variables (first two, sorted) and the
    coalitions over its agents."""
    variables = tuple(sorted(sys.valuation))[:2] or ("p0",)
    return formula_pool(sys.agents, depth, variables, cap)


# -- sweep reports --------------------------------------------------------------

@dataclass(frozen=True)
class Violation:
    schema: str
    coalitions: tuple[Coalition, ...]
    formulas: tuple[str, ...]
    states: tuple[str, ...]

    def __str__(self) -> str:
        coals = " ".join("{" + ",".join(c) + "}" for c in self.coalitions)
        return (f"{self.schema}: coalitions [{coals}] formulas "
                f"[{' ; '.join(self.formulas)}] states [{' '.join(self.states)}]")


@dataclass
class SweepReport:
    system: str
    pool_size: int
    pool_capped: bool
    instances: dict[str, int] = field(default_factory=dict)
    classes: dict[str, int] = field(default_factory=dict)
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    @property
    def total_instances(self) -> int:
        return sum(self.instances.values())

    def kv_lines(self) -> list[str]:
        out = [f"pool={self.pool_size}", f"pool_capped={int(self.pool_capped)}"]
        out.extend(
            f"schema.{name}.instances={self.instances[name]} "
            f"schema.{name}.classes={self.classes[name]} "
            f"schema.{name}.violations="
            f"{sum(1 for v in self.violations if v.schema == name)}"
            for name in sorted(self.instances)
        )
        out.append(f"violations={len(self.violations)}")
        return out


@dataclass
class PreservationReport:
    system: str
    premise_count: int = 0
    checked: int = 0
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def _mask_states(sys: EpistemicTransitionSystem, ev: Evaluator, mask: int):
    return tuple(w for w in sys.states if (mask >> ev.tables.state_index[w]) & 1)


class _ExtensionIndex:
    """Groups pool formulas by extension and serves modal extensions of
    representatives, all through one evaluator."""

    def __init__(self, sys: EpistemicTransitionSystem, ev: Evaluator,
                 pool: tuple[Formula, ...]):
        self.sys = sys
        self.ev = ev
        self.rep: dict[int, Formula] = {}
        self.count: dict[int, int] = {}
        for f, m in zip(pool, ev.extensions(pool)):
            if m not in self.rep:
                self.rep[m] = f
            self.count[m] = self.count.get(m, 0) + 1
        self.masks = sorted(self.rep)
        self._modal: dict[tuple, int] = {}
        self._implies: dict[tuple[int, int], Formula] = {}

    def implies_rep(self, m1: int, m2: int) -> Formula:
        """A formula whose extension is ext(rep(m1) -> rep(m2))."""
        f = self._implies.get((m1, m2))
        if f is None:
            f = Implies(self.rep[m1], self.rep[m2])
            self.rep.setdefault(self.ev.extension(f), f)
            self._implies[(m1, m2)] = f
        return f

    def modal(self, op, c: Coalition, f: Formula) -> int:
        key = (op, c, f)
        got = self._modal.get(key)
        if got is None:
            got = self.ev.extension(op(c, f))
            self._modal[key] = got
        return got


def axiom_sweep(
    sys: EpistemicTransitionSystem, pool: tuple[Formula, ...],
    evaluator: Evaluator | None = None, engine: str = "auto",
) -> SweepReport:
    """Exhaustively check every schema instance over the pool and all
    admissible coalitions; soundness predicts an empty violation list."""
    ev = evaluator if evaluator is not None else Evaluator(sys, engine=engine)
    idx = _ExtensionIndex(sys, ev, pool)
    full = ev.full_mask
    coalitions = all_coalitions(sys.agents)
    subset_pairs = [
        (c, d) for c in coalitions for d in coalitions if set(c) <= set(d)
    ]
    disjoint_pairs = [
        (c, d) for c in coalitions for d in coalitions if not set(c) & set(d)
    ]
    report = SweepReport(system=sys.name, pool_size=len(pool), pool_capped=False)
    masks = idx.masks
    n_masks = len(masks)
    n_pool = len(pool)

    def record(schema: str, coals, reps, bad_mask: int):
        report.violations.append(Violation(
            schema=schema,
            coalitions=tuple(coals),
            formulas=tuple(print_formula(r) for r in reps),
            states=_mask_states(sys, ev, bad_mask),
        ))

    def single(schema: str, check) -> None:
        report.instances[schema] = len(coalitions) * n_pool
        report.classes[schema] = len(coalitions) * n_masks
        for c in coalitions:
            for m in masks:
                bad = check(c, m) & full
                if bad:
                    record(schema, (c,), (idx.rep[m],), bad)

    def paired(schema: str, pairs, check) -> None:
        report.instances[schema] = len(pairs) * n_pool * n_pool
        report.classes[schema] = len(pairs) * n_masks * n_masks
        for c, d in pairs:
            for m1 in masks:
                for m2 in masks:
                    bad = check(c, d, m1, m2) & full
                    if bad:
                        record(schema, (c, d), (idx.rep[m1], idx.rep[m2]), bad)

    K, S, H = Know, Strat, How

    single("truth", lambda c, m: idx.modal(K, c, idx.rep[m]) & ~m)
    single(
        "negative-introspection",
        lambda c, m: (~idx.modal(K, c, idx.rep[m]))
        & ~idx.modal(K, c, Not(Know(c, idx.rep[m]))),
    )
    single(
        "strategic-negative-introspection",
        lambda c, m: (~idx.modal(H, c, idx.rep[m]))
        & ~idx.modal(K, c, Not(How(c, idx.rep[m]))),
    )
    single(
        "strategic-truth",
        lambda c, m: idx.modal(H, c, idx.rep[m]) & ~idx.modal(S, c, idx.rep[m]),
    )

    report.instances["monotonicity"] = len(subset_pairs) * n_pool
    report.classes["monotonicity"] = len(subset_pairs) * n_masks
    for c, d in subset_pairs:
        for m in masks:
            bad = idx.modal(K, c, idx.rep[m]) & ~idx.modal(K, d, idx.rep[m]) & full
            if bad:
                record("monotonicity", (c, d), (idx.rep[m],), bad)

    paired(
        "distributivity",
        [(c, c) for c in coalitions],
        lambda c, _d, m1, m2: idx.modal(K, c, idx.implies_rep(m1, m2))
        & idx.modal(K, c, idx.rep[m1]) & ~idx.modal(K, c, idx.rep[m2]),
    )

    def coop(op):
        def check(c, d, m1, m2):
            u = coalition(tuple(c) + tuple(d))
            return (idx.modal(op, c, idx.implies_rep(m1, m2))
                    & idx.modal(op, d, idx.rep[m1])
                    & ~idx.modal(op, u, idx.rep[m2]))
        return check

    paired("cooperation", disjoint_pairs, coop(S))
    paired("epistemic-cooperation", disjoint_pairs, coop(H))

    paired(
        "epistemic-determinicity",
        [(c, c) for c in coalitions],
        lambda c, _d, m1, m2: idx.modal(H, c, idx.implies_rep(m1, m2))
        & idx.modal(K, c, Strat((), idx.rep[m1]))
        & ~idx.modal(H, c, idx.rep[m2]),
    )

    report.instances["empty-coalition"] = n_pool
    report.classes["empty-coalition"] = n_masks
    for m in masks:
        bad = idx.modal(K, (), idx.rep[m]) & ~idx.modal(H, (), idx.rep[m]) & full
        if bad:
            record("empty-coalition", ((),), (idx.rep[m],), bad)

    report.instances["nontermination"] = len(coalitions)
    report.classes["nontermination"] = len(coalitions)
    for c in coalitions:
        bad = ev.extension(Strat(c, FALSE))
        if bad:
            record("nontermination", (c,), (FALSE,), bad)

    return report


_PRESERVATION_REPS = 8


def rule_preservation_check(
    sys: EpistemicTransitionSystem, pool: tuple[Formula, ...],
    evaluator: Evaluator | None = None, engine: str = "auto",
) -> PreservationReport:
    """For every pool formula valid on the system, its K/S/H closures must
    be valid too, for every coalition.

    Valid pool formulas all share one extension (every state), so the
    closures are verified through the first few valid formulas and the
    remaining instances follow by extension-compositionality; the reported
    ``checked`` count covers the whole space.
    """
    ev = evaluator if evaluator is not None else Evaluator(sys, engine=engine)
    full = ev.full_mask
    report = PreservationReport(system=sys.name)
    coalitions = all_coalitions(sys.agents)
    reps: list[Formula] = []
    for f in pool:
        if ev.extension(f) != full:
            continue
        report.premise_count += 1
        if len(reps) < _PRESERVATION_REPS:
            reps.append(f)
    report.checked = report.premise_count * len(coalitions) * 3
    for f in reps:
        for c in coalitions:
            for op, tag in ((Know, "K"), (Strat, "S"), (How, "H")):
                if ev.extension(op(c, f)) != full:
                    coal = "{" + ",".join(c) + "}"
                    report.failures.append(
                        f"{tag}{coal} {print_formula(f)} is not valid although "
                        f"{print_formula(f)} is"
                    )
    return report


def corrupted_evaluator_factory(sys: EpistemicTransitionSystem,
                                engine: str = "auto") -> Evaluator:
    """Evaluator with the strategic and know-how clauses transposed.

    Used to confirm the sweeps have teeth: on t1 this misreads S{a} p as the
    (false) know-how claim and vice versa, so strategic-truth instances fail.
    (A one-sided misreading of S as H is semantically undetectable: every
    axiom stays valid when S is interpreted as H throughout.)
    """
    ev = Evaluator(sys, engine=engine)
    real = ev._modal_kind

    def swapped(f):
        kind = real(f)
        if kind == K_STRAT:
            return K_HOW
        if kind == K_HOW:
            return K_STRAT
        return kind

    ev._modal_kind = swapped
    return ev
