"""Reproducible multi-trial experiments and their aggregate statistics."""

import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from typing import Optional

import numpy as np
from scipy import stats
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from . import igraph, kernels, theory
from . import rng as _rng
from .epidemic import INF, run_epidemic
from .rrg import generate_regular
from .walker import init_general_position

log = logging.getLogger(__name__)

KINDS = ("meeting_time", "completion", "regimes", "weight_fit", "lemma_audit", "er_compare")
KS_LEVEL = 0.01
SIGMAS = 3.0


@dataclass
class ExperimentConfig:
    kind: str = "completion"
    n: int = 5000
    r: int = 3
    k: int = 50
    rho: float = 1.0
    xi: Optional[float] = None  # None = infinite
    phi: Optional[float] = None  # target; inverted to xi when set
    trials: int = 100
    base_seed: int = 0
    alpha: float = 1.0
    max_steps: Optional[int] = None
    initial: int = 1
    burn_in: int = 200
    window: int = 200
    regime_eps: float = 1.0
    er_samples: int = 10_000
    workers: int = 1

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown experiment kind {self.kind!r}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not 0 < self.rho <= 1:
            raise ValueError("rho must lie in (0, 1]")
        if self.xi is not None and self.phi is not None:
            raise ValueError("give xi or phi, not both")
        if not 1 <= self.initial < self.k:
            raise ValueError("need 1 <= initial infectives < k")

    @classmethod
    def from_dict(cls, d):
        names = {f.name for f in fields(cls)}
        unknown = set(d) - names
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)

    @property
    def xi_value(self):
        if self.phi is not None:
            return theory.xi_for_phi(self.phi, self.k, self.n, self.r, self.rho)
        return INF if self.xi is None or self.xi == INF else int(self.xi)

    def theory(self):
        return theory.TheoryParams(self.n, self.r, self.k, self.rho, self.xi_value)

    def to_dict(self):
        d = asdict(self)
        d["xi_resolved"] = None if self.xi_value == INF else self.xi_value
        return d


@dataclass
class TrialSummary:
    seed: int
    M_k: Optional[int] = None
    T_k: Optional[int] = None
    censored: bool = False
    good_weights: Optional[bool] = None
    lemmas: Optional[dict] = None
    largest_component: Optional[int] = None
    meet_time: Optional[int] = None
    interacted: Optional[bool] = None
    weights: Optional[list] = None
    error: Optional[str] = None

    def to_json(self):
        return json.dumps(asdict(self), separators=(",", ":"))

    @classmethod
    def from_json(cls, line):
        return cls(**json.loads(line))


def classify_regime(phi, k, eps=1.0):
    if phi <= 1:
        return "subcritical"
    if phi <= (1 + eps) * math.log(k):
        return "supercritical"
    return "full"


@dataclass
class KSResult:
    statistic: float
    critical: float
    passed: bool
    n: int


def geometric_cdf(x, q):
    x = np.asarray(x, dtype=float)
    return np.where(x < 1, 0.0, -np.expm1(np.floor(x) * np.log1p(-q)))


def ks_geometric(samples, q, level=KS_LEVEL):
    """Two-sided KS distance between integer samples and Geom(q) on {1, 2, ...}."""
    x = np.sort(np.asarray(samples, dtype=np.int64))
    N = len(x)
    if N < 100:
        raise ValueError(f"KS needs at least 100 samples, got {N}")
    vals, counts = np.unique(x, return_counts=True)
    Fn = np.cumsum(counts) / N
    # both CDFs are flat on [v_i, v_{i+1}); F rises there from F(v_i) to F(v_{i+1} - 1)
    upper = geometric_cdf(vals, q)
    nxt = np.append(vals[1:] - 1, vals[-1])
    D = max(np.max(np.abs(Fn - upper)),
            np.max(np.abs(Fn - geometric_cdf(nxt, q))),
            float(geometric_cdf(vals[0] - 1, q)))
    crit = float(stats.kstwo.ppf(1 - level, N))
    return KSResult(float(D), crit, bool(D <= crit), N)


# -- trials -----------------------------------------------------------------

def _trial(cfg, i):
    seed = cfg.base_seed + i
    s = TrialSummary(seed=seed)
    try:
        g = generate_regular(cfg.n, cfg.r, seed)
        kind = cfg.kind
        xi = cfg.xi_value
        init = tuple(range(cfg.initial))
        if kind == "meeting_time":
            st = init_general_position(g, 2, alpha=0.0, seed=seed)
            cap = cfg.max_steps or 100 * theory.theta(cfg.r) * cfg.n
            meet, hit = kernels.pair_meeting(
                g.adj, int(st.positions[0]), int(st.positions[1]), st.rng_states,
                _rng.interaction_state(seed), float(cfg.rho), cfg.burn_in, cfg.window, int(cap))
            s.meet_time = None if meet < 0 else int(meet)
            s.interacted = bool(hit)
            s.censored = meet < 0
        elif kind in ("completion", "regimes"):
            tr = run_epidemic(g, cfg.k, cfg.rho, xi, init, seed, cfg.max_steps, alpha=cfg.alpha)
            s.M_k, s.T_k, s.censored = tr.M_k, tr.T_k, tr.censored
        elif kind == "weight_fit" or (kind == "lemma_audit" and xi == INF):
            W, tr = igraph.build_upsilon(g, cfg.k, cfg.rho, init, seed, cfg.max_steps,
                                         alpha=cfg.alpha)
            s.M_k, s.T_k, s.censored = tr.M_k, tr.T_k, W.censored
            if not W.censored:
                s.good_weights = igraph.good_weights(W, cfg.n)
                if kind == "weight_fit":
                    s.weights = W.edge_weights().tolist()
                else:
                    s.lemmas = {"time_distance": igraph.time_distance_holds(W, tr),
                                "triangle": igraph.triangle_holds(W, tr)}
        else:  # SIR lemma audit or er_compare
            W, tr = igraph.build_psi(g, cfg.k, cfg.rho, xi, init, seed, cfg.max_steps,
                                     alpha=cfg.alpha)
            s.M_k, s.T_k, s.censored = tr.M_k, tr.T_k, W.censored
            if not W.censored:
                s.good_weights = igraph.good_weights(W, cfg.n)
                s.largest_component = igraph.largest_component(igraph.threshold(W, xi))
                s.lemmas = {"infect_component": igraph.infect_component_holds(W, tr, xi),
                            "sir_time_distance": _sir_time_distance(W, tr, xi)}
    except Exception as exc:  # recorded, never aborts the batch
        log.warning("trial %d failed: %s", seed, exc)
        s.error = f"{type(exc).__name__}: {exc}"
    return s


def _sir_time_distance(W, tr, xi):
    """Infection times equal weighted distances over the edges kept by f_xi."""
    w = W.weights.copy()
    w[(w > xi)] = -1
    k = W.k
    dist = np.full(k, -1, dtype=np.int64)
    big = np.iinfo(np.int64).max
    d = np.full(k, big, dtype=np.int64)
    d[list(tr.initial)] = 0
    done = np.zeros(k, dtype=bool)
    for _ in range(k):
        cand = np.where(done, big, d)
        x = int(np.argmin(cand))
        if cand[x] == big:
            break
        done[x] = True
        via = d[x] + w[x]
        upd = (~done) & (w[x] >= 1) & (via < d)
        d[upd] = via[upd]
    dist[done] = d[done]
    return bool(np.array_equal(dist, tr.infected_at))


def _run_one(args):
    return _trial(*args)


def run_trials(cfg):
    jobs = [(cfg, i) for i in range(cfg.trials)]
    if cfg.workers > 1:
        with ProcessPoolExecutor(cfg.workers) as ex:
            return list(ex.map(_run_one, jobs, chunksize=max(1, cfg.trials // (4 * cfg.workers))))
    return [_trial(cfg, i) for i in range(cfg.trials)]


# -- aggregation ------------------------------------------------------------

def _describe(values):
    v = np.asarray(values, dtype=float)
    if len(v) == 0:
        return None
    sd = float(v.std(ddof=1)) if len(v) > 1 else 0.0
    half = 1.96 * sd / math.sqrt(len(v))
    mean = float(v.mean())
    return {"n": len(v), "mean": mean, "median": float(np.median(v)), "sd": sd,
            "ci95": [mean - half, mean + half]}


def er_largest_components(k, q_hat, samples, seed):
    """Largest-component sizes of direct G(k, q_hat) samples (scipy csgraph)."""
    gen = np.random.default_rng(seed)
    iu = np.triu_indices(k, 1)
    out = np.empty(samples, dtype=np.int64)
    for s in range(samples):
        keep = gen.random(len(iu[0])) < q_hat
        m = coo_matrix((np.ones(keep.sum()), (iu[0][keep], iu[1][keep])), shape=(k, k))
        _, labels = connected_components(m, directed=False)
        out[s] = np.bincount(labels).max()
    return out


def aggregate(cfg, summaries):
    """Fold seed-ordered TrialSummary records into an aggregate report."""
    th = cfg.theory()
    ok = [s for s in summaries if s.error is None and not s.censored]
    rep = {
        "config": cfg.to_dict(),
        "theory": th.to_dict(),
        "regime": classify_regime(th.phi, cfg.k, cfg.regime_eps),
        "trials": len(summaries),
        "errors": sum(s.error is not None for s in summaries),
        "censored": sum(bool(s.censored) for s in summaries),
        "backend": kernels.BACKEND,
    }
    mk = [s.M_k for s in ok if s.M_k is not None]
    if mk:
        rep["M_k"] = _describe(mk)
        vals, cnt = np.unique(mk, return_counts=True)
        rep["M_k_histogram"] = {int(a): int(b) for a, b in zip(vals, cnt)}
        rep["frac_all_infected"] = float(np.mean(np.asarray(mk) == cfg.k))
        rep["frac_small"] = float(np.mean(np.asarray(mk) <= 4 * math.log(cfg.k)))
        if th.phi > 1 and th.phi < cfg.k:
            C = theory.giant_fraction(th.phi)
            large = np.asarray(mk) >= C * cfg.k / 2
            rep["C_pred"] = C
            rep["frac_large"] = float(large.mean())
            rep["large_mean_fraction"] = (float(np.mean(np.asarray(mk)[large]) / cfg.k)
                                          if large.any() else None)
    tk = [s.T_k for s in ok if s.T_k is not None]
    if tk:
        rep["T_k"] = _describe(tk)
        rep["T_k_median_over_pred"] = float(np.median(tk)) / th.T_pred
    if cfg.kind == "meeting_time":
        mt = [s.meet_time for s in ok]
        target = theory.theta(cfg.r) * cfg.n
        rep["meet_time"] = _describe(mt)
        rep["meet_mean_over_theta_n"] = float(np.mean(mt)) / target
        if len(mt) >= 100:
            rep["meet_ks"] = asdict(ks_geometric(mt, 1 / target))
        rep["interaction_fraction"] = float(np.mean([s.interacted for s in ok]))
        rep["psi"] = th.psi
    if cfg.kind == "weight_fit":
        pooled = [w for s in ok for w in (s.weights or [])]
        rep["pooled_weights"] = _describe(pooled)
        if len(pooled) >= 100:
            rep["weight_ks"] = asdict(ks_geometric(pooled, th.q))
    if cfg.kind in ("weight_fit", "lemma_audit", "er_compare"):
        gw = [s.good_weights for s in ok if s.good_weights is not None]
        rep["frac_good_weights"] = float(np.mean(gw)) if gw else None
    if cfg.kind == "lemma_audit":
        audited = [s for s in ok if s.lemmas is not None]
        names = sorted({n for s in audited for n in s.lemmas})
        rep["lemmas"] = {n: {"checked": sum(n in s.lemmas for s in audited),
                             "held": sum(bool(s.lemmas.get(n)) for s in audited)}
                         for n in names}
    if cfg.kind == "er_compare":
        lc = [s.largest_component for s in ok if s.largest_component is not None]
        ref = er_largest_components(cfg.k, th.q_hat, cfg.er_samples, cfg.base_seed)
        rep["largest_component"] = _describe(lc)
        rep["er_largest_component"] = _describe(ref)
        if lc:
            rep["largest_component_ratio"] = float(np.mean(lc) / ref.mean())
    return rep


def run_experiment(cfg):
    summaries = run_trials(cfg)
    return summaries, aggregate(cfg, summaries)


def write_jsonl(summaries, path):
    with open(path, "w") as fh:
        for s in summaries:
            fh.write(s.to_json() + "\n")


def read_jsonl(path):
    with open(path) as fh:
        return [TrialSummary.from_json(line) for line in fh if line.strip()]


def threshold_edge_frequencies(k, q, xi, samples, seed):
    """Per-edge presence frequency of f_xi(Lambda) over ``samples`` draws."""
    iu = np.triu_indices(k, 1)
    hits = np.zeros(len(iu[0]), dtype=np.int64)
    ss = np.random.SeedSequence(seed)
    for child in ss.spawn(samples):
        lam = theory.sample_lambda(k, q, child)
        hits += lam.weights[iu] <= xi
    return hits / samples


@dataclass
class SweepRow:
    phi: float
    xi: int
    mean_Mk: float
    frac_large: Optional[float]
    C_pred: Optional[float]
    extra: dict = field(default_factory=dict)


def sweep(base, phis):
    rows = []
    for phi in phis:
        d = asdict(base)
        d.update(kind="regimes", phi=phi, xi=None)
        cfg = ExperimentConfig(**d)
        _, rep = run_experiment(cfg)
        rows.append(SweepRow(phi, cfg.xi_value, rep["M_k"]["mean"] if "M_k" in rep else float("nan"),
                             rep.get("frac_large"), rep.get("C_pred")))
    return rows
