"""Closed-form predictions and the reference samplers used as oracles."""

import math
from dataclasses import asdict, dataclass

import numpy as np

INF = math.inf


def psi(rho, r):
    """Effective per-meeting interaction probability."""
    if not 0 < rho <= 1:
        raise ValueError("rho must lie in (0, 1]")
    if r < 3:
        raise ValueError("r must be >= 3")
    return rho * (r - 1) / (r - 2 + rho)


def theta(r):
    if r < 3:
        raise ValueError("r must be >= 3")
    return (r - 1) / (r - 2)


def q_edge(n, r, rho):
    """Per-step pairwise interaction rate, psi / (theta_r n)."""
    return psi(rho, r) / (theta(r) * n)


def q_hat(n, r, rho, xi):
    if xi == INF:
        return 1.0
    return 1.0 - (1.0 - q_edge(n, r, rho)) ** xi


def phi_threshold(k, n, r, rho, xi):
    # (1 - q)^inf = 0
    return k * q_hat(n, r, rho, xi)


def xi_for_phi(phi, k, n, r, rho):
    """Integer xi whose phi_threshold lies closest to the target ``phi``."""
    if not 0 < phi < k:
        raise ValueError("phi target must lie in (0, k)")
    q = q_edge(n, r, rho)
    x = math.log1p(-phi / k) / math.log1p(-q)
    lo = max(1, math.floor(x))
    return min((lo, lo + 1), key=lambda xi: abs(phi_threshold(k, n, r, rho, xi) - phi))


def giant_fraction(c, tol=1e-12):
    """Root in (0, 1) of 1 - x = exp(-c x), by bisection."""
    if c <= 1:
        raise ValueError("giant component fraction needs c > 1")

    def g(x):
        return 1.0 - x - math.exp(-c * x)

    # g > 0 just right of 0 and g(1) < 0
    lo, hi = 0.0, 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if mid > 0 and g(mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def completion_prediction(n, k, r, rho):
    """Limit law 2 theta_r n ln k / (psi k) for the SI completion time."""
    return 2 * theta(r) * n * math.log(k) / (psi(rho, r) * k)


def two_particle_chain(rho, r):
    """(phi_escape, f, phi_T, 1 - phi_T) for two coincident particles."""
    phi = (1 - rho) * (r - 1) / (r - 1 + rho)
    f = 1 / (r - 1) ** 2
    phi_T = phi * (1 - f) / (1 - phi * f)
    return phi, f, phi_T, 1 - phi_T


def first_visit_pmf(t, p):
    """Leading-order first-visit probability p / (1 + p)^(t + 1)."""
    return p / (1 + p) ** (np.asarray(t, dtype=float) + 1)


def sample_lambda(k, q, seed):
    """The reference weighting: C(k, 2) i.i.d. Geom(q) weights on {1, 2, ...}."""
    from .igraph import WeightedInteractionGraph

    if not 0 < q <= 1:
        raise ValueError("q must lie in (0, 1]")
    gen = np.random.default_rng(seed)
    iu = np.triu_indices(k, 1)
    w = np.full((k, k), -1, dtype=np.int64)
    w[iu] = gen.geometric(q, size=len(iu[0]))
    w.T[iu] = w[iu]
    act = np.zeros((k, k), dtype=np.int64)
    np.fill_diagonal(act, -1)
    return WeightedInteractionGraph(k, w, act, np.zeros((k, k), dtype=np.int8))


def sample_er(k, q_hat, seed):
    from .igraph import ParticleGraph

    gen = np.random.default_rng(seed)
    iu = np.triu_indices(k, 1)
    keep = gen.random(len(iu[0])) < q_hat
    return ParticleGraph(k, frozenset(zip(iu[0][keep].tolist(), iu[1][keep].tolist())))


@dataclass(frozen=True)
class TheoryParams:
    n: int
    r: int
    k: int
    rho: float
    xi: float

    @property
    def psi(self):
        return psi(self.rho, self.r)

    @property
    def theta_r(self):
        return theta(self.r)

    @property
    def q(self):
        return q_edge(self.n, self.r, self.rho)

    @property
    def q_hat(self):
        return q_hat(self.n, self.r, self.rho, self.xi)

    @property
    def phi(self):
        return phi_threshold(self.k, self.n, self.r, self.rho, self.xi)

    @property
    def C(self):
        return giant_fraction(self.phi) if self.phi > 1 else None

    @property
    def T_pred(self):
        return completion_prediction(self.n, self.k, self.r, self.rho)

    def to_dict(self):
        d = asdict(self)
        d["xi"] = None if self.xi == INF else self.xi
        for name in ("psi", "theta_r", "q", "q_hat", "phi", "C", "T_pred"):
            d[name] = getattr(self, name)
        return d
