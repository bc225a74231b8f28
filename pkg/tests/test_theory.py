import math

import numpy as np
import pytest
from scipy import optimize, stats

from rwepidemic.igraph import threshold
from rwepidemic.theory import (INF, TheoryParams, completion_prediction, first_visit_pmf,
                               giant_fraction, phi_threshold, psi, q_edge, q_hat, sample_er,
                               sample_lambda, theta, two_particle_chain, xi_for_phi)


def test_psi_examples():
    for r in range(3, 9):
        assert psi(1.0, r) == 1
    assert psi(0.5, 3) == pytest.approx(2 / 3, abs=1e-15)


def test_psi_monotone_grid():
    rhos = np.linspace(0.05, 1, 20)
    for r in range(3, 11):
        vals = [psi(x, r) for x in rhos]
        assert np.all(np.diff(vals) > 0)
        assert all(x <= v <= 1 for x, v in zip(rhos, vals))
    # for rho < 1 the escape chain gets harder with degree: psi falls towards rho
    for rho in rhos[:-1]:
        vals = [psi(rho, r) for r in range(3, 11)]
        assert np.all(np.diff(vals) < 0)
        assert psi(rho, 10**8) == pytest.approx(rho, abs=1e-6)


@pytest.mark.parametrize("bad", [(0, 3), (1.2, 3), (0.5, 2)])
def test_psi_domain(bad):
    with pytest.raises(ValueError):
        psi(*bad)


def test_theta():
    assert theta(3) == 2 and theta(4) == 1.5
    assert theta(10**6) == pytest.approx(1, abs=1e-5)
    assert all(theta(r) > 1 for r in range(3, 50))


def test_phi_threshold_examples():
    assert phi_threshold(50, 1000, 3, 0.5, INF) == 50
    k, n, r, rho = 50, 1000, 3, 0.5
    assert phi_threshold(k, n, r, rho, 1) == pytest.approx(k * psi(rho, r) / (theta(r) * n), rel=1e-14)


def test_xi_inversion():
    xi = xi_for_phi(2, 200, 20000, 3, 1.0)
    exact = math.log(1 - 2 / 200) / math.log(1 - 1 / 40000)
    assert xi == round(exact) == 402
    assert 1.99 <= phi_threshold(200, 20000, 3, 1.0, xi) <= 2.01
    for other in (xi - 1, xi + 1):
        assert abs(phi_threshold(200, 20000, 3, 1.0, other) - 2) > abs(phi_threshold(200, 20000, 3, 1.0, xi) - 2)


@pytest.mark.parametrize("phi", [0.3, 0.5, 1.5, 2, 5, 15.9])
def test_xi_round_trip(phi):
    xi = xi_for_phi(phi, 200, 20000, 3, 0.5)
    assert abs(phi_threshold(200, 20000, 3, 0.5, xi) - phi) < 200 * q_edge(20000, 3, 0.5)


def test_xi_inversion_domain():
    with pytest.raises(ValueError):
        xi_for_phi(200, 200, 20000, 3, 1.0)


def test_giant_fraction_c2():
    oracle = optimize.brentq(lambda x: 1 - x - math.exp(-2 * x), 1e-6, 1, xtol=1e-15)
    assert giant_fraction(2) == pytest.approx(oracle, abs=1e-11)
    assert giant_fraction(2) == pytest.approx(0.79681, abs=1e-5)


def test_giant_fraction_shape():
    assert giant_fraction(1.0001) < 1e-3
    assert giant_fraction(20) > 0.999999
    cs = np.linspace(1.01, 10, 60)
    assert np.all(np.diff([giant_fraction(c) for c in cs]) > 0)
    with pytest.raises(ValueError):
        giant_fraction(1.0)


def test_completion_prediction():
    assert completion_prediction(5000, 50, 3, 1.0) == pytest.approx(1564.8, abs=0.05)
    assert completion_prediction(5000, 50, 3, 0.5) / completion_prediction(5000, 50, 3, 1.0) \
        == pytest.approx(1.5, rel=1e-14)
    k = 40
    ratio = completion_prediction(10**5, k * math.e ** 2, 3, 1) / completion_prediction(10**5, k, 3, 1)
    assert ratio == pytest.approx((math.log(k) + 2) / (math.e ** 2 * math.log(k)), rel=1e-14)


def test_two_particle_chain():
    phi, f, phi_T, check = two_particle_chain(1.0, 3)
    assert (phi, phi_T, check) == (0, 0, 1)
    phi, f, phi_T, check = two_particle_chain(0.5, 3)
    assert phi == pytest.approx(0.4) and f == 0.25
    assert phi_T == pytest.approx(1 / 3) and check == pytest.approx(psi(0.5, 3), abs=1e-15)


def test_params_invariants():
    for rho in (0.1, 0.5, 1.0):
        p = TheoryParams(20000, 3, 200, rho, 400)
        assert rho <= p.psi <= 1 and p.theta_r > 1
        assert 0 < p.q < 1 and 0 < p.q_hat < 1
        if p.phi > 1:
            assert 0 < p.C < 1
    d = TheoryParams(100, 3, 10, 1.0, INF).to_dict()
    assert d["xi"] is None and d["q_hat"] == 1.0 and d["phi"] == 10


def test_sample_lambda():
    q = 0.01
    W = sample_lambda(60, q, seed=1)
    z = W.edge_weights()
    assert np.all(z >= 1)
    se = math.sqrt((1 - q) / q ** 2 / len(z))
    assert abs(z.mean() - 1 / q) < 3 * se
    assert np.all(sample_lambda(10, 1.0, 0).edge_weights() == 1)
    assert np.array_equal(sample_lambda(20, 0.1, 5).weights, sample_lambda(20, 0.1, 5).weights)


def test_sample_er():
    assert sample_er(10, 0.0, 0).edges == frozenset()
    assert len(sample_er(10, 1.0, 0).edges) == 45
    k, p = 200, 0.05
    m = len(sample_er(k, p, 3).edges)
    N = k * (k - 1) // 2
    assert abs(m - N * p) < 3 * math.sqrt(N * p * (1 - p))


def test_first_visit_pmf():
    p = 1 / 20000
    T = 500
    tail = first_visit_pmf(np.arange(T, T + 2_000_000), p).sum()
    assert tail == pytest.approx((1 + p) ** -T, rel=1e-6)
    vals = first_visit_pmf(np.arange(0, 100), p)
    assert np.argmax(vals) == 0 and np.all(np.diff(vals) < 0)


def test_threshold_bridge():
    """threshold(Lambda) is Erdos-Renyi with q_hat: every edge present w.p. 1-(1-q)^xi."""
    k, q, xi, samples = 30, 0.02, 40, 10_000
    qh = 1 - (1 - q) ** xi
    iu = np.triu_indices(k, 1)
    counts = np.zeros(len(iu[0]))
    for s in range(samples):
        pg = threshold(sample_lambda(k, q, seed=10_000 + s), xi)
        m = np.zeros((k, k), dtype=bool)
        if pg.edges:
            a, b = zip(*pg.edges)
            m[list(a), list(b)] = True
        counts += m[iu]
    sigma = math.sqrt(qh * (1 - qh) / samples)
    z = np.abs(counts / samples - qh) / sigma
    # each edge frequency is unbiased, and all 435 stay inside a family-wise 1% band
    m = len(z)
    assert z.max() < stats.norm.isf(0.005 / m)
    # the number beyond 3 sigma matches its Binomial(m, 0.0027) law
    beyond = int(np.sum(z > 3))
    assert stats.binom.sf(beyond - 1, m, 2 * stats.norm.sf(3)) > 1e-3
    # pooled frequency
    assert abs(counts.sum() / (m * samples) - qh) < 4 * math.sqrt(qh * (1 - qh) / (m * samples))


def test_q_hat_limits():
    assert q_hat(1000, 3, 1.0, INF) == 1.0
    assert q_hat(1000, 3, 1.0, 1) == pytest.approx(q_edge(1000, 3, 1.0))
