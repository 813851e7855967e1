"""Pure-Python evaluator engine.

Same contract as the compiled ``_engine`` extension: evaluate encoded formula
nodes over packed system tables with a (node, state) memo.  Memo cells hold
0 (unknown), 1 (false), or 2 (true).  Selected automatically when the
compiled kernel is unavailable; also the reference the kernel is tested
against.
"""

from __future__ import annotations

from ._tables import (
    K_AND, K_FALSE, K_HOW, K_IMPLIES, K_KNOW, K_NOT, K_OR, K_STRAT, K_TRUE,
    K_VAR,
)

COMPILED = False


def _outcome_mask(trans, n_full, n_votes, n_agents, members, state, pc):
    """Union of successor masks over all full profiles consistent with the
    coalition profile numeral ``pc`` (digits in ``members`` order)."""
    votes = []
    rest = pc
    for _ in members:
        votes.append(rest % n_votes)
        rest //= n_votes
    votes.reverse()  # first member is the most significant digit
    mask = 0
    base = state * n_full
    for f in range(n_full):
        ok = True
        for mi, ai in enumerate(members):
            # agent ai's digit in the full-profile numeral f
            digit = (f // (n_votes ** (n_agents - 1 - ai))) % n_votes
            if digit != votes[mi]:
                ok = False
                break
        if ok:
            mask |= trans[base + f]
    return mask


def _sim(agent_class, n_states, members, w1, w2) -> bool:
    for ai in members:
        if agent_class[ai * n_states + w1] != agent_class[ai * n_states + w2]:
            return False
    return True


def _members(coal_mask: int, n_agents: int) -> list[int]:
    return [a for a in range(n_agents) if (coal_mask >> a) & 1]


def _eval(t, kind, arg1, arg2, payload, memo, node, state) -> int:
    cell = node * t.n_states + state
    got = memo[cell]
    if got:
        return got - 1
    k = kind[node]
    if k == K_VAR:
        res = (payload[node] >> state) & 1
    elif k == K_FALSE:
        res = 0
    elif k == K_TRUE:
        res = 1
    elif k == K_NOT:
        res = 1 - _eval(t, kind, arg1, arg2, payload, memo, arg1[node], state)
    elif k == K_AND:
        res = (_eval(t, kind, arg1, arg2, payload, memo, arg1[node], state)
               and _eval(t, kind, arg1, arg2, payload, memo, arg2[node], state))
    elif k == K_OR:
        res = (_eval(t, kind, arg1, arg2, payload, memo, arg1[node], state)
               or _eval(t, kind, arg1, arg2, payload, memo, arg2[node], state))
    elif k == K_IMPLIES:
        res = ((1 - _eval(t, kind, arg1, arg2, payload, memo, arg1[node], state))
               or _eval(t, kind, arg1, arg2, payload, memo, arg2[node], state))
    elif k == K_KNOW:
        members = _members(payload[node], t.n_agents)
        body = arg1[node]
        res = 1
        for w2 in range(t.n_states):
            if _sim(t.agent_class, t.n_states, members, state, w2):
                if not _eval(t, kind, arg1, arg2, payload, memo, body, w2):
                    res = 0
                    break
    elif k == K_STRAT or k == K_HOW:
        members = _members(payload[node], t.n_agents)
        body = arg1[node]
        if k == K_STRAT:
            starts = [state]
        else:
            starts = [
                w2 for w2 in range(t.n_states)
                if _sim(t.agent_class, t.n_states, members, state, w2)
            ]
        res = 0
        for pc in range(t.n_votes ** len(members)):
            reach = 0
            for w2 in starts:
                reach |= _outcome_mask(
                    t.trans, t.n_full, t.n_votes, t.n_agents, members, w2, pc
                )
            ok = 1
            w3 = 0
            while reach:
                if reach & 1:
                    if not _eval(t, kind, arg1, arg2, payload, memo, body, w3):
                        ok = 0
                        break
                reach >>= 1
                w3 += 1
            if ok:
                res = 1
                break
    else:
        raise AssertionError(f"bad node kind {k}")
    memo[cell] = res + 1
    return res


def evaluate(tables, kind, arg1, arg2, payload, memo, root, state) -> int:
    return _eval(tables, kind, arg1, arg2, payload, memo, root, state)


def extension(tables, kind, arg1, arg2, payload, memo, root) -> int:
    """Bitmask of the states where the root node holds."""
    mask = 0
    for w in range(tables.n_states):
        if _eval(tables, kind, arg1, arg2, payload, memo, root, w):
            mask |= 1 << w
    return mask


def extensions(tables, kind, arg1, arg2, payload, memo, roots) -> list[int]:
    return [
        extension(tables, kind, arg1, arg2, payload, memo, r) for r in roots
    ]
