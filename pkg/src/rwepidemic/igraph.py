"""Weighted interaction graphs on the particle set.

For a pair e = (x, y) with activation t(e) = min(t(x), t(y)), the weight is
the delay from t(e) to the first xy interaction strictly after t(e).  The SI
graph (``build_upsilon``) takes t(x) as infection times; the SIR graph
(``build_psi``) first weights every edge touching a genuinely infected
particle, then seeds pseudo-infections (never counted as infections) among
the survivors until every edge carries a weight.
"""

import json
import math
from dataclasses import dataclass

import numpy as np

from .epidemic import INF, EpidemicTrace, _xi_code, simulate_raw

SI, PHASE1, PHASE2 = 0, 1, 2
PHASE_NAMES = {SI: "si", PHASE1: "phase1", PHASE2: "phase2"}


class UnresolvedEdgeError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class ParticleGraph:
    k: int
    edges: frozenset  # of (a, b) with a < b

    def adjacency(self):
        nbrs = [[] for _ in range(self.k)]
        for a, b in self.edges:
            nbrs[a].append(b)
            nbrs[b].append(a)
        return nbrs

    def to_edge_list(self):
        return sorted(self.edges)


@dataclass(frozen=True, eq=False)
class WeightedInteractionGraph:
    """Complete graph on k particles; symmetric (k, k) arrays, -1 = unresolved / never."""

    k: int
    weights: np.ndarray
    activation: np.ndarray
    phase: np.ndarray
    censored: bool = False

    @property
    def resolved(self):
        iu = np.triu_indices(self.k, 1)
        return bool(np.all(self.weights[iu] >= 1))

    def edge_weights(self):
        """Upper-triangular weights in (0,1), (0,2), ..., (k-2,k-1) order."""
        return self.weights[np.triu_indices(self.k, 1)]

    def unresolved_pairs(self):
        iu = np.triu_indices(self.k, 1)
        bad = self.weights[iu] < 1
        return list(zip(iu[0][bad].tolist(), iu[1][bad].tolist()))

    def epochs(self):
        """Sorted times at which the active edge set changes."""
        iu = np.triu_indices(self.k, 1)
        act, w = self.activation[iu], self.weights[iu]
        ok = (act >= 0) & (w >= 1)
        return np.unique(np.concatenate([act[ok], act[ok] + w[ok]]))

    def active_at(self, t):
        """Edges active at step t: t(e) <= t <= t(e) + w(e) - 1."""
        iu = np.triu_indices(self.k, 1)
        act, w = self.activation[iu], self.weights[iu]
        on = (act >= 0) & (act <= t) & ((w < 1) | (t <= act + w - 1))
        return list(zip(iu[0][on].tolist(), iu[1][on].tolist()))

    def to_dict(self):
        iu = np.triu_indices(self.k, 1)
        return {
            "k": self.k,
            "censored": self.censored,
            "edges": [
                {"pair": [int(a), int(b)],
                 "weight": None if self.weights[a, b] < 1 else int(self.weights[a, b]),
                 "activation": None if self.activation[a, b] < 0 else int(self.activation[a, b]),
                 "phase": PHASE_NAMES.get(int(self.phase[a, b]))}
                for a, b in zip(*iu)
            ],
        }

    def to_json(self):
        return json.dumps(self.to_dict(), separators=(",", ":"))

    @classmethod
    def from_dict(cls, d):
        k = d["k"]
        w = np.full((k, k), -1, dtype=np.int64)
        act = np.full((k, k), -1, dtype=np.int64)
        ph = np.full((k, k), -1, dtype=np.int8)
        codes = {v: c for c, v in PHASE_NAMES.items()}
        for e in d["edges"]:
            a, b = e["pair"]
            w[a, b] = w[b, a] = -1 if e["weight"] is None else e["weight"]
            act[a, b] = act[b, a] = -1 if e["activation"] is None else e["activation"]
            ph[a, b] = ph[b, a] = codes.get(e["phase"], -1)
        return cls(k, w, act, ph, d.get("censored", False))


def _assemble(k, infected_at, pseudo_at, weight, censored, phase_genuine):
    mark = np.where(infected_at >= 0, infected_at, pseudo_at)
    act = np.full((k, k), -1, dtype=np.int64)
    both = (mark[:, None] >= 0) & (mark[None, :] >= 0)
    one = (mark[:, None] >= 0) ^ (mark[None, :] >= 0)
    act[both] = np.minimum(mark[:, None], mark[None, :])[both]
    act[one] = np.maximum(mark[:, None], mark[None, :])[one]
    np.fill_diagonal(act, -1)
    # phase comes from whichever endpoint set t(e)
    src = np.where(infected_at >= 0, 0, np.where(pseudo_at >= 0, 1, -1))
    ph = np.full((k, k), -1, dtype=np.int8)
    xi_ = np.arange(k)
    owner = np.where(
        (mark[:, None] >= 0) & ((mark[None, :] < 0) | (mark[:, None] <= mark[None, :])),
        xi_[:, None], xi_[None, :])
    osrc = src[owner]
    ph[osrc == 0] = phase_genuine
    ph[osrc == 1] = PHASE2
    ph[act < 0] = -1
    np.fill_diagonal(ph, -1)
    w = weight.copy()
    np.fill_diagonal(w, -1)
    return WeightedInteractionGraph(k, w, act, ph, bool(censored))


def _trace(g, k, rho, xi, seed, out, initial):
    steps, censored, infected_at, _, _, ev_t, ev_a, ev_b = out[:8]
    return EpidemicTrace(seed, g.n, g.r, k, rho, xi, infected_at,
                         np.column_stack([ev_t, ev_a, ev_b]), initial,
                         bool(censored), int(steps))


def default_graph_steps(n):
    return math.ceil(n ** 1.5)


def build_upsilon(g, k, rho, initial_infectives=(0,), seed=0, max_steps=None,
                  start=None, alpha=1.0):
    """SI run continued until every pair has interacted after its activation."""
    if max_steps is None:
        max_steps = default_graph_steps(g.n)
    out, initial = simulate_raw(g, k, rho, INF, initial_infectives, seed, max_steps,
                                True, start=start, alpha=alpha)
    _, censored, infected_at, pseudo_at, weight = out[:5]
    W = _assemble(k, infected_at, pseudo_at, weight, censored, SI)
    return W, _trace(g, k, rho, INF, seed, out, initial)


def build_psi(g, k, rho, xi, initial_infectives=(0,), seed=0, max_steps=None,
              start=None, alpha=1.0):
    """Two-phase SIR interaction graph; the returned trace is the genuine SIR outcome."""
    if _xi_code(xi) < 0:
        raise ValueError("build_psi needs a finite infectious period")
    if max_steps is None:
        max_steps = default_graph_steps(g.n)
    out, initial = simulate_raw(g, k, rho, xi, initial_infectives, seed, max_steps,
                                True, start=start, alpha=alpha)
    _, censored, infected_at, pseudo_at, weight = out[:5]
    W = _assemble(k, infected_at, pseudo_at, weight, censored, PHASE1)
    return W, _trace(g, k, rho, int(xi), seed, out, initial)


def build_from_schedule(schedule, k, xi, initial_infectives=(0,)):
    """Interaction graph from an explicit chronological list of ``(step, a, b)``
    interactions.  ``xi`` infinite gives the SI graph, finite the two-phase one.

    Returns ``(W, infected_at, pseudo_at)``.
    """
    xi_c = _xi_code(xi)
    infected = {int(p): 0 for p in initial_infectives}
    pseudo = {}
    weight = {}
    total = k * (k - 1) // 2

    def infectious(x, t):
        return x in infected and infected[x] < t and (xi_c < 0 or infected[x] + xi_c >= t)

    def mark(x, t):
        for table in (infected, pseudo):
            if x in table and table[x] < t:
                return table[x]
        return None

    by_step = {}
    for t, a, b in schedule:
        by_step.setdefault(int(t), []).append((min(int(a), int(b)), max(int(a), int(b))))
    for t in sorted(by_step):
        if len(weight) == total:
            break
        for a, b in by_step[t]:
            marks = [m for m in (mark(a, t), mark(b, t)) if m is not None]
            if infectious(a, t) and b not in infected:
                infected[b] = t
            elif infectious(b, t) and a not in infected:
                infected[a] = t
            if xi_c >= 0:
                if a in pseudo and pseudo[a] < t and b not in pseudo and b not in infected:
                    pseudo[b] = t
                elif b in pseudo and pseudo[b] < t and a not in pseudo and a not in infected:
                    pseudo[a] = t
            if (a, b) not in weight and marks:
                weight[(a, b)] = t - min(marks)
        unmarked = [x for x in range(k) if x not in infected and x not in pseudo]
        if len(weight) < total and total - len(weight) == len(unmarked) * (len(unmarked) - 1) // 2:
            pseudo[unmarked[0]] = t

    inf_at = np.array([infected.get(x, -1) for x in range(k)], dtype=np.int64)
    ps_at = np.array([pseudo.get(x, -1) for x in range(k)], dtype=np.int64)
    w = np.full((k, k), -1, dtype=np.int64)
    for (a, b), val in weight.items():
        w[a, b] = w[b, a] = val
    W = _assemble(k, inf_at, ps_at, w, len(weight) < total, SI if xi_c < 0 else PHASE1)
    return W, inf_at, ps_at


def threshold(w, xi):
    """f_xi: keep the edges of weight <= xi."""
    bad = w.unresolved_pairs()
    if bad:
        raise UnresolvedEdgeError(f"edge {bad[0]} has no weight")
    iu = np.triu_indices(w.k, 1)
    if xi is None or xi == INF:
        keep = np.ones(len(iu[0]), dtype=bool)
    else:
        keep = w.weights[iu] <= xi
    return ParticleGraph(w.k, frozenset(zip(iu[0][keep].tolist(), iu[1][keep].tolist())))


def components(pg):
    """Connected components (union-find), each a sorted list, ordered by smallest member."""
    parent = list(range(pg.k))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in pg.edges:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    groups = {}
    for x in range(pg.k):
        groups.setdefault(find(x), []).append(x)
    return [groups[root] for root in sorted(groups)]


def weighted_distances(w, sources):
    """Multi-source Dijkstra on the complete weighted graph (dense O(k^2))."""
    bad = w.unresolved_pairs()
    if bad:
        raise UnresolvedEdgeError(f"edge {bad[0]} has no weight")
    k = w.k
    dist = np.full(k, np.iinfo(np.int64).max, dtype=np.int64)
    dist[list(sources)] = 0
    done = np.zeros(k, dtype=bool)
    for _ in range(k):
        cand = np.where(done, np.iinfo(np.int64).max, dist)
        x = int(np.argmin(cand))
        if cand[x] == np.iinfo(np.int64).max:
            break
        done[x] = True
        row = w.weights[x]
        via = dist[x] + row
        upd = (~done) & (row >= 1) & (via < dist)
        dist[upd] = via[upd]
    return dist


# -- lemma audits -----------------------------------------------------------

def time_distance_holds(w, trace):
    """Infection time equals weighted distance from the initial infectives, for every particle."""
    d = weighted_distances(w, trace.initial)
    return bool(np.array_equal(d, trace.infected_at))


def infect_component_holds(w, trace, xi):
    """SIR-infected set equals the union of f_xi components holding an initial infective."""
    init = set(trace.initial)
    reach = set()
    for comp in components(threshold(w, xi)):
        if init.intersection(comp):
            reach.update(comp)
    return reach == trace.infected_set()


def triangle_holds(w, trace):
    t = trace.infected_at
    iu = np.triu_indices(w.k, 1)
    ok = (t[iu[0]] >= 0) & (t[iu[1]] >= 0) & (w.weights[iu] >= 1)
    return bool(np.all(np.abs(t[iu[0]] - t[iu[1]])[ok] <= w.weights[iu][ok]))


def good_weights(w, n):
    """Sum of weights <= k^2 n ln n and every weight < n^1.5."""
    z = w.edge_weights()
    if np.any(z < 1):
        return False
    return bool(z.sum() <= w.k ** 2 * n * math.log(n) and z.max() < n ** 1.5)


def largest_component(pg):
    return max(len(c) for c in components(pg))
