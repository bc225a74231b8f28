"""k independent synchronous simple random walks on a RegularGraph."""

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from . import rng as _rng
from ._kernels_np import advance as _advance


class PlacementError(RuntimeError):
    pass


@dataclass(frozen=True)
class MeetingEvent:
    step: int
    vertex: int
    particles: frozenset


@dataclass(frozen=True, eq=False)
class WalkState:
    """Positions at step ``step`` plus one splitmix state per particle."""

    positions: np.ndarray
    step: int = 0
    rng_states: np.ndarray = field(default=None, repr=False)

    @property
    def k(self):
        return len(self.positions)


def min_separation(n, k, alpha):
    if alpha <= 0:
        return 0
    return math.ceil(alpha * (math.log(math.log(n)) + math.log(k)))


def init_general_position(g, k, alpha=1.0, seed=0, retries=200, max_k_exponent=1.0):
    """Uniform placement conditioned on pairwise distance >= d_min.

    Particles are placed one at a time by rejection: each draw is uniform
    over V and is rejected while it lies within ``d_min - 1`` of an already
    placed particle.  A particle that exhausts ``retries`` draws raises
    :class:`PlacementError` naming the last conflicting pair.
    """
    if k < 2:
        raise ValueError("need at least two particles")
    if k > g.n ** max_k_exponent:
        raise ValueError(f"k={k} exceeds n^{max_k_exponent}")
    d_min = min_separation(g.n, k, alpha)
    gen = _rng.generator(seed, _rng.PLACE)
    owner = np.full(g.n, -1, dtype=np.int64)  # placed particle blocking each vertex
    positions = np.empty(k, dtype=np.int64)
    for i in range(k):
        for _ in range(retries):
            v = int(gen.integers(g.n))
            if owner[v] < 0:
                break
        else:
            raise PlacementError(
                f"particles {owner[v]} and {i} closer than d_min={d_min} after "
                f"{retries} draws (n={g.n}, k={k}, alpha={alpha})")
        positions[i] = v
        if d_min > 0:
            dist = g.bfs_distances(v, limit=d_min - 1)
            owner[(dist >= 0) & (owner < 0)] = i
    return WalkState(positions, 0, _rng.walk_states(seed, k))


def uniform_state(g, k, seed=0):
    """Independent uniform starting vertices (coincidences allowed)."""
    return init_general_position(g, k, alpha=0.0, seed=seed)


def step(state, g):
    """One synchronous move: every particle jumps to a uniform neighbour."""
    pos = state.positions.astype(np.int64, copy=True)
    rs = state.rng_states.copy()
    _advance(g.adj, pos, rs)
    return WalkState(pos, state.step + 1, rs)


def coincident_pairs(state):
    buckets = {}
    for i, v in enumerate(state.positions):
        buckets.setdefault(int(v), []).append(i)
    return [MeetingEvent(state.step, v, frozenset(ps))
            for v, ps in sorted(buckets.items()) if len(ps) > 1]


def dump_trajectory(g, state, steps, path):
    """Write ``step,particle,vertex`` rows for ``steps`` moves (debug aid; large)."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["step", "particle", "vertex"])
        for s in range(steps + 1):
            if s:
                state = step(state, g)
            for i, v in enumerate(state.positions):
                w.writerow([state.step, i, int(v)])
    return state
