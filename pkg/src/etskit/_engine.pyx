# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled evaluator engine.

Mirrors ``_engine_py`` node kind for node kind; the pure-Python module is the
reference this one is tested against.  States are bit positions in 64-bit
masks, full strategy profiles are base-|V| numerals with the first sorted
agent as the most significant digit.
"""

COMPILED = True

DEF MAXDIM = 64

cdef enum:
    K_VAR = 0
    K_FALSE = 1
    K_TRUE = 2
    K_NOT = 3
    K_AND = 4
    K_OR = 5
    K_IMPLIES = 6
    K_KNOW = 7
    K_STRAT = 8
    K_HOW = 9


cdef struct Ctx:
    const int* kind
    const int* arg1
    const int* arg2
    const long long* payload
    unsigned char* memo
    const long long* trans
    const signed char* agent_class
    int n_states
    int n_agents
    int n_votes
    long long n_full
    long long powv[MAXDIM]


cdef inline bint _sim(Ctx* c, long long coal, int w1, int w2) noexcept:
    cdef int a
    for a in range(c.n_agents):
        if (coal >> a) & 1:
            if c.agent_class[a * c.n_states + w1] != c.agent_class[a * c.n_states + w2]:
                return 0
    return 1


cdef long long _outcome_mask(Ctx* c, int* members, int n_members,
                             long long* votes, int state) noexcept:
    """Union of successor masks over full profiles consistent with the
    member votes."""
    cdef long long mask = 0
    cdef long long f
    cdef int mi, ai
    cdef bint ok
    for f in range(c.n_full):
        ok = 1
        for mi in range(n_members):
            ai = members[mi]
            if (f / c.powv[ai]) % c.n_votes != votes[mi]:
                ok = 0
                break
        if ok:
            mask |= c.trans[state * c.n_full + f]
    return mask


cdef int _eval(Ctx* c, int node, int state) except -1:
    cdef long long cell = (<long long> node) * c.n_states + state
    cdef int got = c.memo[cell]
    if got:
        return got - 1

    cdef int k = c.kind[node]
    cdef int res
    cdef long long coal, reach, pc, total, restv
    cdef int members[MAXDIM]
    cdef long long votes[MAXDIM]
    cdef int starts[MAXDIM]
    cdef int n_members, n_starts, a, w2, w3, mi, body

    if k == K_VAR:
        res = <int> ((c.payload[node] >> state) & 1)
    elif k == K_FALSE:
        res = 0
    elif k == K_TRUE:
        res = 1
    elif k == K_NOT:
        res = 1 - _eval(c, c.arg1[node], state)
    elif k == K_AND:
        res = 1 if (_eval(c, c.arg1[node], state)
                    and _eval(c, c.arg2[node], state)) else 0
    elif k == K_OR:
        res = 1 if (_eval(c, c.arg1[node], state)
                    or _eval(c, c.arg2[node], state)) else 0
    elif k == K_IMPLIES:
        res = 1 if ((not _eval(c, c.arg1[node], state))
                    or _eval(c, c.arg2[node], state)) else 0
    elif k == K_KNOW:
        coal = c.payload[node]
        body = c.arg1[node]
        res = 1
        for w2 in range(c.n_states):
            if _sim(c, coal, state, w2):
                if not _eval(c, body, w2):
                    res = 0
                    break
    elif k == K_STRAT or k == K_HOW:
        coal = c.payload[node]
        body = c.arg1[node]
        n_members = 0
        for a in range(c.n_agents):
            if (coal >> a) & 1:
                members[n_members] = a
                n_members += 1
        if k == K_STRAT:
            starts[0] = state
            n_starts = 1
        else:
            n_starts = 0
            for w2 in range(c.n_states):
                if _sim(c, coal, state, w2):
                    starts[n_starts] = w2
                    n_starts += 1
        total = 1
        for mi in range(n_members):
            total *= c.n_votes
        res = 0
        for pc in range(total):
            restv = pc
            for mi in range(n_members - 1, -1, -1):
                votes[mi] = restv % c.n_votes
                restv //= c.n_votes
            reach = 0
            for mi in range(n_starts):
                reach |= _outcome_mask(c, members, n_members, votes, starts[mi])
            res = 1
            w3 = 0
            while reach:
                if reach & 1:
                    if not _eval(c, body, w3):
                        res = 0
                        break
                reach >>= 1
                w3 += 1
            if res:
                break
    else:
        raise AssertionError(f"bad node kind {k}")

    c.memo[cell] = res + 1
    return res


cdef int _fill(Ctx* c, tables,
               const int[::1] kind, const int[::1] arg1, const int[::1] arg2,
               const long long[::1] payload, unsigned char[::1] memo) except -1:
    c.kind = &kind[0]
    c.arg1 = &arg1[0]
    c.arg2 = &arg2[0]
    c.payload = &payload[0]
    c.memo = &memo[0]
    c.n_states = tables.n_states
    c.n_agents = tables.n_agents
    c.n_votes = tables.n_votes
    c.n_full = tables.n_full
    if c.n_agents > MAXDIM or c.n_states > MAXDIM:
        raise OverflowError("system exceeds packed engine dimensions")
    cdef long long p = 1
    cdef int a
    for a in range(c.n_agents - 1, -1, -1):
        c.powv[a] = p
        p *= c.n_votes
    return 0


def evaluate(tables, kind, arg1, arg2, payload, memo, int root, int state):
    cdef const int[::1] kv = kind
    cdef const int[::1] a1 = arg1
    cdef const int[::1] a2 = arg2
    cdef const long long[::1] pl = payload
    cdef unsigned char[::1] mv = memo
    cdef const long long[::1] tv = tables.trans
    cdef const signed char[::1] av = tables.agent_class
    cdef Ctx c
    _fill(&c, tables, kv, a1, a2, pl, mv)
    c.trans = &tv[0]
    c.agent_class = &av[0]
    return _eval(&c, root, state)


def extension(tables, kind, arg1, arg2, payload, memo, int root):
    cdef const int[::1] kv = kind
    cdef const int[::1] a1 = arg1
    cdef const int[::1] a2 = arg2
    cdef const long long[::1] pl = payload
    cdef unsigned char[::1] mv = memo
    cdef const long long[::1] tv = tables.trans
    cdef const signed char[::1] av = tables.agent_class
    cdef Ctx c
    _fill(&c, tables, kv, a1, a2, pl, mv)
    c.trans = &tv[0]
    c.agent_class = &av[0]
    cdef long long mask = 0
    cdef int w
    for w in range(c.n_states):
        if _eval(&c, root, w):
            mask |= (<long long> 1) << w
    return mask


def extensions(tables, kind, arg1, arg2, payload, memo, roots):
    cdef const int[::1] kv = kind
    cdef const int[::1] a1 = arg1
    cdef const int[::1] a2 = arg2
    cdef const long long[::1] pl = payload
    cdef unsigned char[::1] mv = memo
    cdef const long long[::1] tv = tables.trans
    cdef const signed char[::1] av = tables.agent_class
    cdef Ctx c
    _fill(&c, tables, kv, a1, a2, pl, mv)
    c.trans = &tv[0]
    c.agent_class = &av[0]
    cdef long long mask
    cdef int w, root
    out = []
    for root in roots:
        mask = 0
        for w in range(c.n_states):
            if _eval(&c, root, w):
                mask |= (<long long> 1) << w
        out.append(mask)
    return out
