"""Numba-compiled hot loops.  Mirrors ``_kernels_np`` draw for draw."""

import numba
import numpy as np

from . import rng as _rng

_G = np.uint64(_rng.GAMMA)
_M1 = np.uint64(_rng.MIX1)
_M2 = np.uint64(_rng.MIX2)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_INV = _rng.INV_2_53


@numba.njit(cache=True)
def _uniform(states, i):
    s = states[i] + _G
    states[i] = s
    z = s
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    z = z ^ (z >> _S31)
    return np.float64(z >> _S11) * _INV


@numba.njit(cache=True)
def _grow(a):
    b = np.empty(2 * a.shape[0], dtype=a.dtype)
    b[: a.shape[0]] = a
    return b


@numba.njit(cache=True)
def advance(adj, pos, walk_state):
    r = adj.shape[1]
    for i in range(pos.shape[0]):
        u = _uniform(walk_state, i)
        pos[i] = adj[pos[i], int(u * r)]


@numba.njit(cache=True)
def simulate(adj, pos, walk_state, int_state, rho, xi, infected0, max_steps, track):
    n = adj.shape[0]
    r = adj.shape[1]
    k = pos.shape[0]
    pos = pos.copy()
    walk_state = walk_state.copy()
    int_state = int_state.copy()

    infected_at = np.full(k, -1, np.int64)
    pseudo_at = np.full(k, -1, np.int64)
    n_infected = 0
    for i in range(k):
        if infected0[i]:
            infected_at[i] = 0
            n_infected += 1
    unmarked = k - n_infected
    unresolved = k * (k - 1) // 2
    if track:
        weight = np.full((k, k), -1, np.int64)
    else:
        weight = np.full((1, 1), -1, np.int64)

    occ = np.full(n, -1, np.int64)
    nxt = np.empty(k, np.int64)
    codes = np.empty(max(1, k * (k - 1) // 2), np.int64)
    ev_t = np.empty(256, np.int64)
    ev_a = np.empty(256, np.int64)
    ev_b = np.empty(256, np.int64)
    ne = 0

    t = 0
    censored = False
    while True:
        if t >= max_steps:
            censored = True
            break
        t += 1
        for i in range(k):
            u = _uniform(walk_state, i)
            pos[i] = adj[pos[i], int(u * r)]

        m = 0
        for i in range(k):
            v = pos[i]
            j = occ[v]
            while j != -1:
                codes[m] = j * k + i
                m += 1
                j = nxt[j]
            nxt[i] = occ[v]
            occ[v] = i
        for i in range(k):
            occ[pos[i]] = -1
        if m > 1:
            codes[:m].sort()

        for c in range(m):
            a = codes[c] // k
            b = codes[c] % k
            if _uniform(int_state, 0) >= rho:
                continue
            if ne == ev_t.shape[0]:
                ev_t = _grow(ev_t)
                ev_a = _grow(ev_a)
                ev_b = _grow(ev_b)
            ev_t[ne] = t
            ev_a[ne] = a
            ev_b[ne] = b
            ne += 1

            # pre-step marks, needed for the edge weight
            ma = -1
            mb = -1
            if track and weight[a, b] == -1:
                if 0 <= infected_at[a] < t:
                    ma = infected_at[a]
                elif 0 <= pseudo_at[a] < t:
                    ma = pseudo_at[a]
                if 0 <= infected_at[b] < t:
                    mb = infected_at[b]
                elif 0 <= pseudo_at[b] < t:
                    mb = pseudo_at[b]

            # rule 2 against the I(t-1) snapshot
            ia = infected_at[a]
            ib = infected_at[b]
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
                pa = pseudo_at[a]
                pb = pseudo_at[b]
                if 0 <= pa < t and pb == -1 and infected_at[b] == -1:
                    pseudo_at[b] = t
                    unmarked -= 1
                elif 0 <= pb < t and pa == -1 and infected_at[a] == -1:
                    pseudo_at[a] = t
                    unmarked -= 1
                if weight[a, b] == -1 and (ma >= 0 or mb >= 0):
                    if ma < 0:
                        act = mb
                    elif mb < 0:
                        act = ma
                    else:
                        act = min(ma, mb)
                    weight[a, b] = t - act
                    weight[b, a] = t - act
                    unresolved -= 1

        if track:
            if unresolved == 0:
                break
            if unresolved == unmarked * (unmarked - 1) // 2:
                # no active edges left: pseudo-infect the lowest unmarked particle
                for i in range(k):
                    if infected_at[i] == -1 and pseudo_at[i] == -1:
                        pseudo_at[i] = t
                        unmarked -= 1
                        break
        elif xi < 0:
            if n_infected == k:
                break
        else:
            live = False
            for i in range(k):
                if infected_at[i] >= 0 and infected_at[i] + xi > t:
                    live = True
                    break
            if not live:
                break

    return (t, censored, infected_at, pseudo_at, weight,
            ev_t[:ne].copy(), ev_a[:ne].copy(), ev_b[:ne].copy(), pos, walk_state, int_state)


@numba.njit(cache=True)
def pair_meeting(adj, p0, p1, walk_state, int_state, rho, burn_in, window, max_steps):
    """First meeting of two walks after ``burn_in`` steps, plus whether an
    interaction happens within ``window`` steps starting at that meeting."""
    r = adj.shape[1]
    walk_state = walk_state.copy()
    int_state = int_state.copy()
    for _ in range(burn_in):
        p0 = adj[p0, int(_uniform(walk_state, 0) * r)]
        p1 = adj[p1, int(_uniform(walk_state, 1) * r)]
    s = 0
    while True:
        if s >= max_steps:
            return -1, False
        s += 1
        p0 = adj[p0, int(_uniform(walk_state, 0) * r)]
        p1 = adj[p1, int(_uniform(walk_state, 1) * r)]
        if p0 == p1:
            break
    meet = s
    for w in range(window):
        if w > 0:
            p0 = adj[p0, int(_uniform(walk_state, 0) * r)]
            p1 = adj[p1, int(_uniform(walk_state, 1) * r)]
        if p0 == p1 and _uniform(int_state, 0) < rho:
            return meet, True
    return meet, False
