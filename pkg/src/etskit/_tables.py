"""Packed integer encoding of a system for the evaluator engines.

States become bit positions (so sets of states are machine-word masks),
agents and votes become indices, and full strategy profiles become base-|V|
numerals with the first agent in sorted order as the most significant digit.
That numbering matches :func:`etskit.model.enumerate_profiles`, which keeps
witness search and engine evaluation order-consistent.
"""

from __future__ import annotations

from array import array
from dataclasses import dataclass

from .errors import CapacityError, InputError
from .model import EpistemicTransitionSystem

MAX_PACKED_STATES = 63


@dataclass
class SysTables:
    n_states: int
    n_agents: int
    n_votes: int
    n_full: int
    full_mask: int
    state_index: dict[str, int]
    states: tuple[str, ...]
    # agent_class[a * n_states + w] = partition class id of state w for agent a
    agent_class: array
    # trans[w * n_full + f] = successor mask under full profile numeral f
    trans: array


def encode_system(sys: EpistemicTransitionSystem) -> SysTables:
    n_states = len(sys.states)
    n_agents = len(sys.agents)
    n_votes = len(sys.votes)
    if n_states == 0:
        raise InputError("system has no states")
    if not n_agents or not n_votes:
        raise InputError("system has an empty agent or vote registry")
    if n_states > MAX_PACKED_STATES:
        raise CapacityError(
            f"{n_states} states exceed the packed-evaluator limit of "
            f"{MAX_PACKED_STATES}"
        )

    state_index = {w: i for i, w in enumerate(sys.states)}
    vote_index = {v: i for i, v in enumerate(sys.votes)}

    # States missing from an agent's partition get fresh singleton classes;
    # a validated system never has any, but stay safe for raw constructions.
    agent_class = array("b", [-1]) * (n_agents * n_states)
    for ai, a in enumerate(sys.agents):
        nxt = 0
        for block in sys.indist.get(a, ()):
            for w in block:
                if w in state_index:
                    agent_class[ai * n_states + state_index[w]] = nxt
            nxt += 1
        for wi in range(n_states):
            if agent_class[ai * n_states + wi] == -1:
                agent_class[ai * n_states + wi] = nxt
                nxt += 1
        if nxt > 127:
            raise CapacityError("too many indistinguishability classes")

    n_full = n_votes ** n_agents
    trans = array("q", bytes(8 * n_states * n_full))
    for w, votes, t in sys.mechanism.triples():
        f = 0
        for v in votes:
            f = f * n_votes + vote_index[v]
        trans[state_index[w] * n_full + f] |= 1 << state_index[t]

    return SysTables(
        n_states=n_states,
        n_agents=n_agents,
        n_votes=n_votes,
        n_full=n_full,
        full_mask=(1 << n_states) - 1,
        state_index=state_index,
        states=sys.states,
        agent_class=agent_class,
        trans=trans,
    )


# Node kinds shared by both engines.
K_VAR = 0      # payload: valuation mask
K_FALSE = 1
K_TRUE = 2
K_NOT = 3      # arg1
K_AND = 4      # arg1, arg2
K_OR = 5
K_IMPLIES = 6
K_KNOW = 7     # arg1, payload: coalition agent bitmask
K_STRAT = 8
K_HOW = 9
