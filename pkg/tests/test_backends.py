import os
import subprocess
import sys

import numpy as np
import pytest

from rwepidemic import _kernels_np as npk
from rwepidemic import rng
from rwepidemic.rrg import generate_regular
from rwepidemic.walker import init_general_position

nbk = pytest.importorskip("rwepidemic._kernels_nb")


@pytest.fixture(scope="module")
def g():
    return generate_regular(300, 3, 4)


def _args(g, k, seed, rho, xi, track, max_steps=5000):
    st = init_general_position(g, k, alpha=0.0, seed=seed)
    inf0 = np.zeros(k, dtype=np.bool_)
    inf0[0] = True
    return (g.adj, st.positions.copy(), st.rng_states.copy(), rng.interaction_state(seed),
            rho, xi, inf0, max_steps, track)


@pytest.mark.parametrize("rho,xi,track", [(1.0, -1, False), (0.5, -1, True), (0.7, 15, False),
                                          (1.0, 4, True), (0.3, 60, True)])
def test_simulate_bit_identical(g, rho, xi, track):
    for seed in range(6):
        a = nbk.simulate(*_args(g, 12, seed, rho, xi, track))
        b = npk.simulate(*_args(g, 12, seed, rho, xi, track))
        assert len(a) == len(b)
        for x, y in zip(a, b):
            assert np.array_equal(np.asarray(x), np.asarray(y))


def test_advance_identical(g):
    st = init_general_position(g, 40, alpha=0.0, seed=2)
    pa, ra = st.positions.copy(), st.rng_states.copy()
    pb, rb = st.positions.copy(), st.rng_states.copy()
    for _ in range(50):
        nbk.advance(g.adj, pa, ra)
        npk.advance(g.adj, pb, rb)
    assert np.array_equal(pa, pb) and np.array_equal(ra, rb)


def test_pair_meeting_identical(g):
    for seed in range(10):
        st = init_general_position(g, 2, alpha=0.0, seed=seed)
        args = lambda: (g.adj, int(st.positions[0]), int(st.positions[1]), st.rng_states.copy(),
                        rng.interaction_state(seed), 0.5, 20, 20, 100_000)
        assert tuple(nbk.pair_meeting(*args())) == tuple(npk.pair_meeting(*args()))


def test_env_flag_selects_numpy():
    env = dict(os.environ, RWEPIDEMIC_NO_JIT="1")
    out = subprocess.run([sys.executable, "-c", "import rwepidemic; print(rwepidemic.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"


def test_same_trace_under_both_backends():
    code = ("from rwepidemic import generate_regular, run_epidemic;"
            "g = generate_regular(500, 3, 1);"
            "print(run_epidemic(g, 10, 0.5, 25, seed=3).to_json())")
    runs = []
    for flag in ("0", "1"):
        env = dict(os.environ, RWEPIDEMIC_NO_JIT=flag)
        runs.append(subprocess.run([sys.executable, "-c", code], env=env, capture_output=True,
                                   text=True, check=True).stdout)
    assert runs[0] == runs[1]
