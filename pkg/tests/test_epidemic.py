import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rwepidemic.epidemic import INF, EpidemicTrace, run_epidemic, run_scripted
from rwepidemic.rrg import generate_regular
from rwepidemic.walker import init_general_position, step

CHAIN = [(("a", "b"), 9), (("a", "d"), 11), (("b", "c"), 18), (("c", "d"), 22),
            (("c", "d"), 27), (("a", "c"), 100), (("b", "d"), 100)]


def _first_meeting(g, seed):
    """Oracle: step the walks by hand until the two particles coincide."""
    s = init_general_position(g, 2, seed=seed)
    while s.positions[0] != s.positions[1]:
        s = step(s, g)
    return s.step


@pytest.mark.parametrize("seed", range(8))
def test_pair_si_completes_at_first_meeting(g500, seed):
    tr = run_epidemic(g500, 2, 1.0, INF, seed=seed)
    assert not tr.censored
    assert tr.M_k == 2
    assert tr.T_k == _first_meeting(g500, seed)


def test_xi1_meeting_too_late():
    tr = run_scripted([(("x", "y"), 5)], 1, ["x"])
    assert tr.M_k == 1 and tr.T_k is None


def test_infection_allowed_on_last_infectious_step():
    # x infected at 0 is still in I(xi-1), so it infects at step xi but not xi+1
    assert run_scripted([(("x", "y"), 5)], 5, ["x"]).M_k == 2
    assert run_scripted([(("x", "y"), 6)], 5, ["x"]).M_k == 1
    # same for a secondary case: y infected at 3 with xi=3 reaches z at 6, not 7
    assert run_scripted([(("x", "y"), 3), (("y", "z"), 6)], 3, ["x"]).M_k == 3
    assert run_scripted([(("x", "y"), 3), (("y", "z"), 7)], 3, ["x"]).M_k == 2


def test_no_chaining_within_a_step():
    tr = run_scripted([(("a", "b"), 3), (("b", "c"), 3)], INF, ["a"])
    assert tr.infected_set() == {0, 1}
    tr = run_scripted([(("b", "c"), 3), (("a", "b"), 3)], INF, ["a"])
    assert tr.infected_set() == {0, 1}


def test_counterexample_chain():
    tr = run_scripted(CHAIN, 10, ["a"])
    t = dict(zip(tr.labels, tr.infected_at.tolist()))
    assert tr.M_k == 4
    assert t["a"] < t["b"] < t["c"] < t["d"]
    assert (t["b"], t["c"]) == (9, 18)
    # d catches it at 22 from c (infectious 18..28); the 27 contact is redundant
    assert t["d"] == 22


def test_counterexample_xi1():
    assert run_scripted(CHAIN, 1, ["a"]).M_k == 1


def test_empty_schedule():
    tr = run_scripted([], 3, ["a", "b"])
    assert tr.M_k == 2 and tr.T_k is None


def test_unsorted_schedule_rejected():
    with pytest.raises(ValueError):
        run_scripted([(("a", "b"), 5), (("a", "c"), 2)], 3, ["a"])


@pytest.mark.parametrize("rho", [0.0, -0.1, 1.5])
def test_bad_rho(g500, rho):
    with pytest.raises(ValueError):
        run_epidemic(g500, 4, rho, INF)


@pytest.mark.parametrize("xi", [0, 2.5, -3])
def test_bad_xi(g500, xi):
    with pytest.raises(ValueError):
        run_epidemic(g500, 4, 1.0, xi)


def test_censoring_flag(g500):
    tr = run_epidemic(g500, 10, 1.0, INF, seed=1, max_steps=3)
    assert tr.censored and tr.steps == 3


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10**6), rho=st.sampled_from([1.0, 0.5, 0.2]),
       xi=st.sampled_from([INF, 5, 50, 400]), k=st.integers(2, 12))
def test_replay_reproduces_kernel(g500, seed, rho, xi, k):
    tr = run_epidemic(g500, k, rho, xi, initial_infectives=(0,), seed=seed)
    sched = [((int(a), int(b)), int(t)) for t, a, b in tr.interactions]
    rep = run_scripted(sched, xi, [0], particles=list(range(k)))
    assert np.array_equal(rep.infected_at, tr.infected_at)
    # structural invariants
    inf = tr.infected_at
    assert inf[0] == 0 and np.all(inf[1:] != 0)
    assert tr.M_k >= tr.I_0
    if tr.T_k is not None:
        assert tr.T_k == inf.max() <= tr.steps
    if not tr.censored and xi == INF:
        assert tr.M_k == k
    if not tr.censored and xi != INF:
        # stopped once nobody is infectious
        assert inf.max() + xi <= tr.steps
    rows = tr.interactions
    assert np.all(rows[:, 1] < rows[:, 2]) and np.all(np.diff(rows[:, 0]) >= 0)


def test_seed_determinism(g500):
    a = run_epidemic(g500, 10, 0.5, 30, seed=4)
    b = run_epidemic(g500, 10, 0.5, 30, seed=4)
    assert a.to_json() == b.to_json()


def test_json_round_trip(g500):
    tr = run_epidemic(g500, 6, 1.0, 40, initial_infectives=(0, 2), seed=3)
    back = EpidemicTrace.from_dict(tr.to_dict())
    assert np.array_equal(back.infected_at, tr.infected_at)
    assert np.array_equal(back.interactions, tr.interactions)
    assert back.initial == (0, 2) and back.xi == 40 and back.M_k == tr.M_k


def test_json_infinite_xi(g500):
    tr = run_epidemic(g500, 3, 1.0, None, seed=0)
    d = tr.to_dict()
    assert d["xi"] is None
    assert EpidemicTrace.from_dict(d).xi == INF
