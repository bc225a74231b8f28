"""Pure-numpy fallback for the kernels in ``_kernels_nb``.

Particle moves and coincidence detection are vectorised per step; the few
interaction events per step are handled in Python.  Both backends consume
the same splitmix64 streams in the same order, so results are identical.
"""

import numpy as np

from .rng import next_uniform, next_uniform_array


def advance(adj, pos, walk_state):
    u = next_uniform_array(walk_state)
    pos[:] = adj[pos, (u * adj.shape[1]).astype(np.int64)]


def coincident_codes(pos):
    """Sorted codes ``a * k + b`` (a < b) for every coincident particle pair."""
    k = pos.shape[0]
    order = np.argsort(pos, kind="stable")
    sp = pos[order]
    same = sp[1:] == sp[:-1]
    if not same.any():
        return []
    codes = []
    start = 0
    for i in range(1, k + 1):
        if i == k or sp[i] != sp[start]:
            if i - start > 1:
                members = order[start:i]
                for x in range(len(members)):
                    for y in range(x + 1, len(members)):
                        codes.append(int(members[x]) * k + int(members[y]))
            start = i
    codes.sort()
    return codes


def simulate(adj, pos, walk_state, int_state, rho, xi, infected0, max_steps, track):
    r = adj.shape[1]
    k = pos.shape[0]
    pos = pos.copy()
    walk_state = walk_state.copy()
    istate = int(int_state[0])

    infected_at = np.where(infected0, 0, -1).astype(np.int64)
    pseudo_at = np.full(k, -1, np.int64)
    n_infected = int(np.count_nonzero(infected0))
    unmarked = k - n_infected
    unresolved = k * (k - 1) // 2
    weight = np.full((k, k) if track else (1, 1), -1, np.int64)
    ev_t, ev_a, ev_b = [], [], []

    def mark(x, t):
        if 0 <= infected_at[x] < t:
            return infected_at[x]
        if 0 <= pseudo_at[x] < t:
            return pseudo_at[x]
        return -1

    t = 0
    censored = False
    while True:
        if t >= max_steps:
            censored = True
            break
        t += 1
        u = next_uniform_array(walk_state)
        pos = adj[pos, (u * r).astype(np.int64)]

        for code in coincident_codes(pos):
            a, b = divmod(code, k)
            istate, u = next_uniform(istate)
            if u >= rho:
                continue
            ev_t.append(t)
            ev_a.append(a)
            ev_b.append(b)

            if track and weight[a, b] == -1:
                ma, mb = mark(a, t), mark(b, t)
            else:
                ma = mb = -1

            ia, ib = infected_at[a], infected_at[b]
            a_inf = 0 <= ia < t and (xi < 0 or ia + xi >= t)
            b_inf = 0 <= ib < t and (xi < 0 or ib + xi >= t)
            if a_inf and ib == -1:
                infected_at[b] = t
                n_infected += 1
                if pseudo_at[b] == -1:
                    unmarked -= 1
            elif b_inf and ia == -1:
                infected_at[a] = t
                n_infected += 1
                if pseudo_at[a] == -1:
                    unmarked -= 1

            if track:
                pa, pb = pseudo_at[a], pseudo_at[b]
                if 0 <= pa < t and pb == -1 and infected_at[b] == -1:
                    pseudo_at[b] = t
                    unmarked -= 1
                elif 0 <= pb < t and pa == -1 and infected_at[a] == -1:
                    pseudo_at[a] = t
                    unmarked -= 1
                if weight[a, b] == -1 and (ma >= 0 or mb >= 0):
                    act = mb if ma < 0 else ma if mb < 0 else min(ma, mb)
                    weight[a, b] = weight[b, a] = t - act
                    unresolved -= 1

        if track:
            if unresolved == 0:
                break
            if unresolved == unmarked * (unmarked - 1) // 2:
                free = np.flatnonzero((infected_at == -1) & (pseudo_at == -1))
                pseudo_at[free[0]] = t
                unmarked -= 1
        elif xi < 0:
            if n_infected == k:
                break
        elif not np.any((infected_at >= 0) & (infected_at + xi > t)):
            break

    return (t, censored, infected_at, pseudo_at, weight,
            np.array(ev_t, np.int64), np.array(ev_a, np.int64), np.array(ev_b, np.int64),
            pos, walk_state, np.array([istate], np.uint64))


def pair_meeting(adj, p0, p1, walk_state, int_state, rho, burn_in, window, max_steps):
    r = adj.shape[1]
    s0, s1 = int(walk_state[0]), int(walk_state[1])
    istate = int(int_state[0])
    p0, p1 = int(p0), int(p1)

    def move(p0, p1, s0, s1):
        s0, u0 = next_uniform(s0)
        s1, u1 = next_uniform(s1)
        return int(adj[p0, int(u0 * r)]), int(adj[p1, int(u1 * r)]), s0, s1

    for _ in range(burn_in):
        p0, p1, s0, s1 = move(p0, p1, s0, s1)
    s = 0
    while True:
        if s >= max_steps:
            return -1, False
        s += 1
        p0, p1, s0, s1 = move(p0, p1, s0, s1)
        if p0 == p1:
            break
    for w in range(window):
        if w > 0:
            p0, p1, s0, s1 = move(p0, p1, s0, s1)
        if p0 == p1:
            istate, u = next_uniform(istate)
            if u < rho:
                return s, True
    return s, False
