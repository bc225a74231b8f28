"""Time the compiled and pure-numpy epidemic kernels on the same workload.

    python3 benchmarks/bench_kernels.py [--n 5000] [--k 50] [--reps 3]

Both backends are bit-identical, so the script also checks the outputs agree.
"""

import argparse
import time

import numpy as np

from rwepidemic import _kernels_np, rng
from rwepidemic.rrg import generate_regular
from rwepidemic.walker import init_general_position


def _args(g, k, seed, xi, track):
    st = init_general_position(g, k, seed=seed)
    inf0 = np.zeros(k, dtype=np.bool_)
    inf0[0] = True
    return (g.adj, st.positions.copy(), st.rng_states.copy(), rng.interaction_state(seed),
            1.0, xi, inf0, 10 * g.n, track)


def bench(fn, g, k, reps, xi, track):
    best = float("inf")
    out = None
    for s in range(reps):
        t0 = time.perf_counter()
        out = fn(*_args(g, k, s, xi, track))
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=5000)
    ap.add_argument("--k", type=int, default=50)
    ap.add_argument("--reps", type=int, default=3)
    a = ap.parse_args()
    g = generate_regular(a.n, 3, 0)
    fns = {"numpy": _kernels_np.simulate}
    try:
        from rwepidemic import _kernels_nb
        _kernels_nb.simulate(*_args(g, a.k, 0, -1, False))  # compile outside the timing
        fns["numba"] = _kernels_nb.simulate
    except ImportError:
        print("numba unavailable; timing the numpy path only")

    for label, xi, track in (("SI run", -1, False), ("SI graph (track)", -1, True)):
        res = {name: bench(fn, g, a.k, a.reps, xi, track) for name, fn in fns.items()}
        line = ", ".join(f"{name} {t * 1e3:9.2f} ms" for name, (t, _) in res.items())
        if len(res) == 2:
            same = all(np.array_equal(np.asarray(x), np.asarray(y))
                       for x, y in zip(res["numba"][1], res["numpy"][1]))
            line += f", speedup x{res['numpy'][0] / res['numba'][0]:.0f}, identical={same}"
        print(f"{label:18s} n={a.n} k={a.k}: {line}")


if __name__ == "__main__":
    main()
