"""Seed derivation and the splitmix64 streams shared by both kernel backends.

Every particle owns one 64-bit splitmix state derived from ``(seed, WALK, i)``
through :class:`numpy.random.SeedSequence`, so adding particles never shifts
the draws of existing ones.  Interaction draws use a separate stream.
"""

import numpy as np

GAMMA = 0x9E3779B97F4A7C15
MIX1 = 0xBF58476D1CE4E5B9
MIX2 = 0x94D049BB133111EB
MASK64 = 0xFFFFFFFFFFFFFFFF
INV_2_53 = 1.0 / 9007199254740992.0

# spawn-key namespaces
WALK = 0
INTERACT = 1
PLACE = 2
GRAPH = 3


def stream_seed(seed, *key):
    """One uint64 state for the stream named by ``key`` under ``seed``."""
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(x) for x in key))
    return ss.generate_state(1, np.uint64)[0]


def walk_states(seed, k):
    return np.array([stream_seed(seed, WALK, i) for i in range(k)], dtype=np.uint64)


def interaction_state(seed):
    return np.array([stream_seed(seed, INTERACT)], dtype=np.uint64)


def generator(seed, *key):
    """A numpy Generator for non-kernel randomness (placement, graph pairing)."""
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=tuple(key)))


def next_uniform(state):
    """Advance a Python-int splitmix state; return ``(new_state, u)`` with u in [0, 1)."""
    state = (state + GAMMA) & MASK64
    z = state
    z = ((z ^ (z >> 30)) * MIX1) & MASK64
    z = ((z ^ (z >> 27)) * MIX2) & MASK64
    z ^= z >> 31
    return state, (z >> 11) * INV_2_53


_G = np.uint64(GAMMA)
_M1 = np.uint64(MIX1)
_M2 = np.uint64(MIX2)
_S30, _S27, _S31, _S11 = np.uint64(30), np.uint64(27), np.uint64(31), np.uint64(11)


def next_uniform_array(states):
    """Vectorised splitmix64: advances ``states`` in place, returns uniforms."""
    states += _G
    z = states.copy()
    z ^= z >> _S30
    z *= _M1
    z ^= z >> _S27
    z *= _M2
    z ^= z >> _S31
    return (z >> _S11).astype(np.float64) * INV_2_53
