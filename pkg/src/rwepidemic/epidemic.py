"""SIR / SI dynamics carried by the walks.

Within a step: walks move, then every coincident unordered pair draws one
Bernoulli(rho) interaction, then infections are applied against I(t-1).
A particle infected at t_x is in R(t) once t_x + xi <= t, so it can still
pass the infection on at step t_x + xi (it was in I(t_x + xi - 1)).
"""

import json
import math
from collections import defaultdict
from dataclasses import dataclass

import numpy as np

from . import kernels, theory
from . import rng as _rng
from .walker import init_general_position

INF = math.inf
NEVER = -1


def _xi_code(xi):
    if xi is None or xi == INF:
        return -1
    if xi != int(xi) or xi < 1:
        raise ValueError("xi must be a positive integer or infinity")
    return int(xi)


def check_rho(rho):
    if not 0 < rho <= 1:
        raise ValueError(f"rho must lie in (0, 1], got {rho}")


def default_max_steps(n, r, k, rho, xi):
    base = 10 * math.ceil(theory.completion_prediction(n, max(k, 2), r, rho))
    return base if xi in (None, INF) else base + int(xi)


@dataclass(frozen=True, eq=False)
class EpidemicTrace:
    seed: object
    n: int
    r: int
    k: int
    rho: float
    xi: float
    infected_at: np.ndarray   # -1 = never
    interactions: np.ndarray  # rows (step, a, b), a < b
    initial: tuple
    censored: bool
    steps: int
    labels: tuple = None

    @property
    def I_0(self):
        return len(self.initial)

    @property
    def M_k(self):
        return int(np.count_nonzero(self.infected_at >= 0))

    @property
    def T_k(self):
        if self.M_k <= self.I_0:
            return None
        return int(self.infected_at.max())

    def infected_set(self):
        return {int(i) for i in np.flatnonzero(self.infected_at >= 0)}

    def to_dict(self):
        return {
            "seed": self.seed,
            "n": self.n,
            "r": self.r,
            "k": self.k,
            "rho": self.rho,
            "xi": None if self.xi == INF else self.xi,
            "infected_at": [None if t < 0 else int(t) for t in self.infected_at],
            "interactions": self.interactions.tolist(),
            "M_k": self.M_k,
            "T_k": self.T_k,
            "censored": self.censored,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), separators=(",", ":"))

    @classmethod
    def from_dict(cls, d):
        inf_at = np.array([-1 if t is None else t for t in d["infected_at"]], dtype=np.int64)
        inter = np.array(d["interactions"], dtype=np.int64).reshape(-1, 3)
        initial = tuple(int(i) for i in np.flatnonzero(inf_at == 0))
        xi = INF if d["xi"] is None else d["xi"]
        return cls(d["seed"], d["n"], d["r"], d["k"], d["rho"], xi, inf_at, inter,
                   initial, d["censored"], int(inf_at.max(initial=0)))


def simulate_raw(g, k, rho, xi, initial_infectives, seed, max_steps, track,
                 start=None, alpha=1.0):
    """Run the kernel; returns its raw output tuple plus the start state."""
    check_rho(rho)
    initial = sorted(set(int(i) for i in initial_infectives))
    if not initial:
        raise ValueError("need at least one initial infective")
    if initial[0] < 0 or initial[-1] >= k:
        raise ValueError("initial infective out of range")
    if max_steps < 1:
        raise ValueError("max_steps must be >= 1")
    if start is None:
        start = init_general_position(g, k, alpha=alpha, seed=seed)
    infected0 = np.zeros(k, dtype=np.bool_)
    infected0[initial] = True
    out = kernels.simulate(g.adj, start.positions.astype(np.int64), start.rng_states,
                           _rng.interaction_state(seed), float(rho), _xi_code(xi),
                           infected0, int(max_steps), bool(track))
    return out, tuple(initial)


def run_epidemic(g, k, rho, xi, initial_infectives=(0,), seed=0, max_steps=None,
                 start=None, alpha=1.0):
    if max_steps is None:
        max_steps = default_max_steps(g.n, g.r, k, rho, xi)
    out, initial = simulate_raw(g, k, rho, xi, initial_infectives, seed, max_steps,
                                False, start=start, alpha=alpha)
    steps, censored, infected_at, _, _, ev_t, ev_a, ev_b = out[:8]
    return EpidemicTrace(seed, g.n, g.r, k, rho, INF if _xi_code(xi) < 0 else int(xi),
                         infected_at, np.column_stack([ev_t, ev_a, ev_b]),
                         initial, bool(censored), int(steps))


def run_scripted(schedule, xi, initial_infectives, particles=None):
    """Replay interactions exactly at scheduled ``((x, y), step)`` events.

    Particles may be any hashable labels; the trace indexes them in the
    order of ``particles`` (default: sorted labels seen in the input).
    """
    xi_c = _xi_code(xi)
    steps = [s for _, s in schedule]
    if any(b < a for a, b in zip(steps, steps[1:])):
        raise ValueError("schedule steps must be non-decreasing")
    if particles is None:
        seen = set(initial_infectives)
        for (x, y), _ in schedule:
            seen.update((x, y))
        particles = sorted(seen)
    index = {p: i for i, p in enumerate(particles)}
    k = len(particles)
    infected_at = np.full(k, NEVER, dtype=np.int64)
    for p in initial_infectives:
        infected_at[index[p]] = 0

    by_step = defaultdict(list)
    rows = []
    for (x, y), s in schedule:
        a, b = sorted((index[x], index[y]))
        by_step[s].append((a, b))
        rows.append((s, a, b))

    def infectious(x, t):
        ia = infected_at[x]
        return 0 <= ia < t and (xi_c < 0 or ia + xi_c >= t)

    for t in sorted(by_step):
        new = []
        for a, b in by_step[t]:
            if infectious(a, t) and infected_at[b] == NEVER:
                new.append(b)
            elif infectious(b, t) and infected_at[a] == NEVER:
                new.append(a)
        infected_at[new] = t

    return EpidemicTrace(None, 0, 0, k, 1.0, INF if xi_c < 0 else xi_c, infected_at,
                         np.array(rows, dtype=np.int64).reshape(-1, 3),
                         tuple(index[p] for p in initial_infectives), False,
                         max(steps, default=0), tuple(particles))
