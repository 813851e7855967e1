"""Satisfaction checking for the three coalition modalities.

Two independent routes compute the same relation:

* :class:`Evaluator` / :func:`evaluate` — the production path.  Formulas are
  encoded into flat node tables and evaluated with a (state, subformula)
  memo by a packed-bitmask engine; a compiled kernel is used when the
  extension module built, with a pure-Python engine as the import-time
  fallback.
* :func:`evaluate_naive` — the oracle.  A direct transcription of the
  satisfaction clauses over explicit state sets, recursing over all states
  with no memoization.  It shares nothing with the engine route beyond the
  model operations, which keeps disagreements between the two meaningful.

Evaluator instances are single-session objects: caches live on the instance
and are never shared across threads.  Distinct evaluators over the same
(immutable) system may run in parallel.
"""

from __future__ import annotations

import time
from array import array
from dataclasses import dataclass
from typing import Iterable

from . import _engine_py
from ._tables import (
    K_AND, K_FALSE, K_HOW, K_IMPLIES, K_KNOW, K_NOT, K_OR, K_STRAT, K_TRUE,
    K_VAR, encode_system,
)
from .errors import ClaimsFormatError, InputError
from .formula import (
    And, FalseLit, Formula, How, Implies, Know, Not, Or, Strat, TrueLit, Var,
    parse_formula, print_formula,
)
from .model import (
    EpistemicTransitionSystem, StrategyProfile, coalition_class,
    enumerate_profiles, outcomes,
)

try:
    from . import _engine
    HAVE_COMPILED = True
except ImportError:  # pragma: no cover - depends on the build
    _engine = None
    HAVE_COMPILED = False


def _pick_engine(engine: str):
    if engine == "auto":
        return _engine if HAVE_COMPILED else _engine_py
    if engine == "compiled":
        if not HAVE_COMPILED:
            raise InputError("compiled engine requested but not built")
        return _engine
    if engine == "python":
        return _engine_py
    raise InputError(f"unknown engine {engine!r}")


class Evaluator:
    """Memoized satisfaction checking over one system.

    Formulas registered through one evaluator share subformula nodes, so a
    batch of queries (the sweeps, the claims runner) reuses every previously
    computed (state, subformula) verdict.
    """

    def __init__(self, sys: EpistemicTransitionSystem, engine: str = "auto"):
        self.system = sys
        self.tables = encode_system(sys)
        self._impl = _pick_engine(engine)
        self._ids: dict[Formula, int] = {}
        self._kind = array("i")
        self._arg1 = array("i")
        self._arg2 = array("i")
        self._payload = array("q")
        self._memo = bytearray()

    @property
    def engine_name(self) -> str:
        return "compiled" if getattr(self._impl, "COMPILED", False) else "python"

    def _modal_kind(self, f: Formula) -> int:
        if isinstance(f, Know):
            return K_KNOW
        if isinstance(f, Strat):
            return K_STRAT
        return K_HOW

    def _add(self, kind: int, arg1: int, arg2: int, payload: int) -> int:
        self._kind.append(kind)
        self._arg1.append(arg1)
        self._arg2.append(arg2)
        self._payload.append(payload)
        return len(self._kind) - 1

    def register(self, f: Formula) -> int:
        """Intern a formula (and its subformulas) as engine nodes."""
        got = self._ids.get(f)
        if got is not None:
            return got
        if isinstance(f, Var):
            mask = 0
            for w in self.system.prop_states(f.name):
                if w in self.tables.state_index:
                    mask |= 1 << self.tables.state_index[w]
            node = self._add(K_VAR, 0, 0, mask)
        elif isinstance(f, FalseLit):
            node = self._add(K_FALSE, 0, 0, 0)
        elif isinstance(f, TrueLit):
            node = self._add(K_TRUE, 0, 0, 0)
        elif isinstance(f, Not):
            a = self.register(f.arg)
            node = self._add(K_NOT, a, 0, 0)
        elif isinstance(f, (And, Or, Implies)):
            a = self.register(f.left)
            b = self.register(f.right)
            kind = {And: K_AND, Or: K_OR, Implies: K_IMPLIES}[type(f)]
            node = self._add(kind, a, b, 0)
        elif isinstance(f, (Know, Strat, How)):
            self.system.require_agents(f.coalition)
            a = self.register(f.arg)
            mask = 0
            for agent in f.coalition:
                mask |= 1 << self.system.agents.index(agent)
            node = self._add(self._modal_kind(f), a, 0, mask)
        else:
            raise InputError(f"not a formula: {f!r}")
        self._ids[f] = node
        self._memo.extend(bytes(self.tables.n_states))
        return node

    def check(self, state: str, f: Formula) -> bool:
        w = self.tables.state_index.get(state)
        if w is None:
            self.system.require_state(state)
        root = self.register(f)
        return bool(self._impl.evaluate(
            self.tables, self._kind, self._arg1, self._arg2, self._payload,
            self._memo, root, w,
        ))

    def extension(self, f: Formula) -> int:
        """Bitmask (over state indices) of the states satisfying ``f``."""
        root = self.register(f)
        return self._impl.extension(
            self.tables, self._kind, self._arg1, self._arg2, self._payload,
            self._memo, root,
        )

    def extensions(self, formulas) -> list[int]:
        """Batched :meth:`extension`, one engine entry for the whole list."""
        roots = [self.register(f) for f in formulas]
        return self._impl.extensions(
            self.tables, self._kind, self._arg1, self._arg2, self._payload,
            self._memo, roots,
        )

    def extension_states(self, f: Formula) -> frozenset[str]:
        mask = self.extension(f)
        return frozenset(
            w for w, i in self.tables.state_index.items() if (mask >> i) & 1
        )

    @property
    def full_mask(self) -> int:
        return self.tables.full_mask


def evaluate(
    sys: EpistemicTransitionSystem, state: str, f: Formula,
    engine: str = "auto",
) -> bool:
    """Satisfaction at one state (fresh caches per call)."""
    return Evaluator(sys, engine=engine).check(state, f)


def holds_everywhere(
    sys: EpistemicTransitionSystem, f: Formula, engine: str = "auto"
) -> bool:
    """Model-level validity: satisfaction at every state."""
    ev = Evaluator(sys, engine=engine)
    return ev.extension(f) == ev.full_mask


# -- naive oracle -------------------------------------------------------------

def _naive_extension(sys: EpistemicTransitionSystem, f: Formula) -> frozenset[str]:
    states = frozenset(sys.states)
    if isinstance(f, Var):
        return sys.prop_states(f.name) & states
    if isinstance(f, TrueLit):
        return states
    if isinstance(f, FalseLit):
        return frozenset()
    if isinstance(f, Not):
        return states - _naive_extension(sys, f.arg)
    if isinstance(f, And):
        return _naive_extension(sys, f.left) & _naive_extension(sys, f.right)
    if isinstance(f, Or):
        return _naive_extension(sys, f.left) | _naive_extension(sys, f.right)
    if isinstance(f, Implies):
        return (states - _naive_extension(sys, f.left)) | _naive_extension(sys, f.right)
    if isinstance(f, Know):
        ext = _naive_extension(sys, f.arg)
        return frozenset(
            w for w in states
            if all(w2 in ext for w2 in coalition_class(sys, f.coalition, w))
        )
    if isinstance(f, Strat):
        ext = _naive_extension(sys, f.arg)
        profiles = enumerate_profiles(sys, f.coalition)
        return frozenset(
            w for w in states
            if any(outcomes(sys, w, s) <= ext for s in profiles)
        )
    if isinstance(f, How):
        ext = _naive_extension(sys, f.arg)
        profiles = enumerate_profiles(sys, f.coalition)
        result = set()
        for w in states:
            cls = coalition_class(sys, f.coalition, w)
            for s in profiles:
                reach: set[str] = set()
                for w2 in cls:
                    reach |= outcomes(sys, w2, s)
                if reach <= ext:
                    result.add(w)
                    break
        return frozenset(result)
    raise InputError(f"not a formula: {f!r}")


def evaluate_naive(sys: EpistemicTransitionSystem, state: str, f: Formula) -> bool:
    """Oracle route: explicit outcome-set inclusion over whole extensions."""
    sys.require_state(state)
    return state in _naive_extension(sys, f)


# -- witness extraction -------------------------------------------------------

def find_witness(
    sys: EpistemicTransitionSystem, state: str, f: Formula,
    engine: str = "auto",
) -> StrategyProfile | None:
    """First witnessing profile (in enumeration order) for a top-level
    strategic or know-how formula; ``None`` exactly when it is false."""
    if not isinstance(f, (Strat, How)):
        raise InputError("witness extraction needs a top-level S or H formula")
    sys.require_state(state)
    ev = Evaluator(sys, engine=engine)
    if isinstance(f, Strat):
        starts: Iterable[str] = (state,)
    else:
        starts = sorted(coalition_class(sys, f.coalition, state))
    for profile in enumerate_profiles(sys, f.coalition):
        reach: set[str] = set()
        for w2 in starts:
            reach |= outcomes(sys, w2, profile)
        if all(ev.check(u, f.arg) for u in sorted(reach)):
            return profile
    return None


# -- claims files -------------------------------------------------------------

@dataclass(frozen=True)
class Claim:
    """One line of a claims file: a state, a formula, and the expected verdict."""

    state: str
    formula: Formula
    expected: bool | None = None
    line: int = 0

    def __str__(self) -> str:
        rel = "|=" if self.expected in (True, None) else "|/="
        return f"{self.state} {rel} {print_formula(self.formula)}"


@dataclass(frozen=True)
class EvalReport:
    claim: Claim
    verdict: bool
    witness: StrategyProfile | None = None
    elapsed: float = 0.0

    @property
    def matches(self) -> bool:
        return self.claim.expected is None or self.verdict == self.claim.expected


def parse_claims(text: str, name: str = "<claims>") -> list[Claim]:
    """Lines ``STATE |= FORMULA`` (expected true) or ``STATE |/= FORMULA``
    (expected false); ``#`` starts a comment."""
    claims = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        state, _, rest = line.partition(" ")
        rest = rest.strip()
        if rest.startswith("|/="):
            expected, body = False, rest[3:]
        elif rest.startswith("|="):
            expected, body = True, rest[2:]
        else:
            raise ClaimsFormatError(
                f"{name}: line {lineno}: expected 'STATE |= FORMULA' or "
                "'STATE |/= FORMULA'"
            )
        try:
            f = parse_formula(body)
        except Exception as exc:
            raise ClaimsFormatError(f"{name}: line {lineno}: {exc}") from exc
        claims.append(Claim(state=state, formula=f, expected=expected, line=lineno))
    return claims


def check_claims(
    sys: EpistemicTransitionSystem, claims: Iterable[Claim],
    engine: str = "auto", naive: bool = False,
) -> list[EvalReport]:
    ev = None if naive else Evaluator(sys, engine=engine)
    reports = []
    for claim in claims:
        t0 = time.perf_counter()
        if naive:
            verdict = evaluate_naive(sys, claim.state, claim.formula)
        else:
            verdict = ev.check(claim.state, claim.formula)
        witness = None
        if verdict and isinstance(claim.formula, (Strat, How)):
            witness = find_witness(sys, claim.state, claim.formula)
        reports.append(EvalReport(
            claim=claim, verdict=verdict, witness=witness,
            elapsed=time.perf_counter() - t0,
        ))
    return reports
