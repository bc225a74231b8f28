"""Random r-regular graphs: pairing-model generation and typicality checks."""

import math
from collections import deque
from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.linalg import ArpackNoConvergence, LinearOperator, eigsh

from . import rng as _rng

MAX_PAIRING_ATTEMPTS = 1000


class GenerationError(RuntimeError):
    pass


class ConvergenceError(RuntimeError):
    def __init__(self, msg, last_iterate=None):
        super().__init__(msg)
        self.last_iterate = last_iterate


@dataclass(frozen=True, eq=False)
class RegularGraph:
    """Immutable simple r-regular graph.  ``adj[v]`` holds v's neighbours, sorted."""

    n: int
    r: int
    adj: np.ndarray

    def __post_init__(self):
        self.adj.setflags(write=False)

    def __eq__(self, other):
        return (isinstance(other, RegularGraph) and self.n == other.n
                and self.r == other.r and np.array_equal(self.adj, other.adj))

    def neighbors(self, v):
        return self.adj[v]

    def edges(self):
        u = np.repeat(np.arange(self.n), self.r)
        v = self.adj.ravel()
        keep = u < v
        return np.column_stack([u[keep], v[keep]])

    def sparse(self):
        rows = np.repeat(np.arange(self.n), self.r)
        return csr_matrix((np.ones(self.n * self.r), (rows, self.adj.ravel())),
                          shape=(self.n, self.n))

    def bfs_distances(self, source, limit=None):
        """Hop distances from ``source`` (-1 where unreached or beyond ``limit``)."""
        dist = np.full(self.n, -1, dtype=np.int64)
        dist[source] = 0
        q = deque([source])
        while q:
            x = q.popleft()
            if limit is not None and dist[x] >= limit:
                continue
            for y in self.adj[x]:
                if dist[y] < 0:
                    dist[y] = dist[x] + 1
                    q.append(y)
        return dist


def from_edges(n, r, edges):
    """Build a RegularGraph from an edge array, validating regularity and simplicity."""
    edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    src = np.concatenate([edges[:, 0], edges[:, 1]])
    dst = np.concatenate([edges[:, 1], edges[:, 0]])
    if np.any(src == dst):
        raise ValueError("self-loop in edge list")
    deg = np.bincount(src, minlength=n)
    if deg.shape[0] != n or np.any(deg != r):
        raise ValueError(f"not {r}-regular on {n} vertices")
    order = np.lexsort((dst, src))
    adj = dst[order].reshape(n, r)
    if np.any(adj[:, 1:] == adj[:, :-1]):
        raise ValueError("parallel edges in edge list")
    return RegularGraph(n, r, adj)


def _check_params(n, r):
    if r < 3:
        raise ValueError(f"degree r={r} must be >= 3")
    if n <= r:
        raise ValueError(f"need n > r (got n={n}, r={r})")
    if (n * r) % 2:
        raise ValueError(f"n*r = {n * r} is odd; no {r}-regular graph on {n} vertices")


def generate_regular(n, r, seed, max_attempts=MAX_PAIRING_ATTEMPTS):
    """Uniform simple r-regular graph via the pairing model with full rejection."""
    _check_params(n, r)
    gen = _rng.generator(seed, _rng.GRAPH)
    stubs = np.repeat(np.arange(n, dtype=np.int64), r)
    for _ in range(max_attempts):
        pairs = gen.permutation(stubs).reshape(-1, 2)
        lo = pairs.min(axis=1)
        hi = pairs.max(axis=1)
        if np.any(lo == hi):
            continue
        codes = lo * n + hi
        if np.unique(codes).shape[0] != codes.shape[0]:
            continue
        return from_edges(n, r, np.column_stack([lo, hi]))
    raise GenerationError(
        f"no simple pairing after {max_attempts} attempts for n={n}, r={r}")


def save_graph(g, path):
    with open(path, "w") as fh:
        fh.write(f"{g.n} {g.r}\n")
        for row in g.adj:
            fh.write(" ".join(map(str, row)) + "\n")


def load_graph(path):
    with open(path) as fh:
        n, r = map(int, fh.readline().split())
        rows = [list(map(int, fh.readline().split())) for _ in range(n)]
    adj = np.array(rows, dtype=np.int64)
    if adj.shape != (n, r):
        raise ValueError(f"expected {n} rows of {r} neighbours")
    u = np.repeat(np.arange(n), r)
    v = adj.ravel()
    keep = u < v
    g = from_edges(n, r, np.column_stack([u[keep], v[keep]]))
    if not np.array_equal(g.adj, np.sort(adj, axis=1)):
        raise ValueError("adjacency is not symmetric")
    return g


# -- spectrum ---------------------------------------------------------------

def second_eigenvalue(g, tol=1e-8, maxiter=None):
    """Second-largest adjacency eigenvalue, by Lanczos on A with the
    uniform eigenvector deflated (shifted down to eigenvalue -r)."""
    n, r = g.n, g.r
    A = g.sparse()
    u = np.full(n, 1.0 / math.sqrt(n))
    resid = np.linalg.norm(A @ u - r * u)
    if resid > max(tol, 1e-12):
        raise ValueError(f"uniform vector is not an r-eigenvector (residual {resid:g})")

    def matvec(x):
        x = np.asarray(x).ravel()
        return A @ x - 2 * r * u * (u @ x)

    op = LinearOperator((n, n), matvec=matvec, dtype=np.float64)
    if n <= 16:
        dense = op @ np.eye(n)
        return float(np.linalg.eigvalsh(dense)[-1])
    v0 = np.cos(np.arange(n) * 1.3)  # deterministic start vector
    try:
        vals = eigsh(op, k=1, which="LA", tol=tol, v0=v0,
                     maxiter=maxiter or 100 * n, ncv=min(n, 40),
                     return_eigenvectors=False)
    except ArpackNoConvergence as exc:
        raise ConvergenceError("Lanczos did not converge for lambda2",
                               last_iterate=exc.eigenvalues) from exc
    return float(vals[0])


# -- typicality -------------------------------------------------------------

@dataclass
class TypicalityReport:
    connected: bool
    bipartite: bool
    lambda2: float
    lambda2_bound: float
    small_cycle_vertex_count: int
    small_cycle_bound: float
    L1: int
    p4_violation: bool
    treelike_fraction: float
    sample_size: int

    @property
    def p2(self):
        return self.lambda2 <= self.lambda2_bound

    @property
    def p3(self):
        return self.small_cycle_vertex_count <= self.small_cycle_bound

    @property
    def typical(self):
        return (self.connected and not self.bipartite and self.p2 and self.p3
                and not self.p4_violation)

    def to_dict(self):
        d = dict(self.__dict__)
        d.update(p2=self.p2, p3=self.p3, typical=self.typical)
        return d


def _L1(n, r, eps1):
    return int(math.floor(eps1 * math.log(n) / math.log(r) + 1e-12))


def two_colour(g):
    """Full BFS traversal: returns (connected, bipartite)."""
    colour = np.full(g.n, -1, dtype=np.int8)
    bipartite = True
    components = 0
    for s in range(g.n):
        if colour[s] >= 0:
            continue
        components += 1
        colour[s] = 0
        q = deque([s])
        while q:
            x = q.popleft()
            for y in g.adj[x]:
                if colour[y] < 0:
                    colour[y] = 1 - colour[x]
                    q.append(y)
                elif colour[y] == colour[x]:
                    bipartite = False
    return components == 1, bipartite


def shortest_cycle_through(g, v, limit):
    """Length of the shortest cycle through ``v`` if it is <= ``limit``, else None."""
    if limit < 3:
        return None
    dist = {v: 0}
    branch = {v: -1}
    parent = {v: -1}
    q = deque([v])
    best = None
    while q:
        x = q.popleft()
        if 2 * dist[x] + 1 > limit:
            break
        for y in g.adj[x]:
            y = int(y)
            if y == parent[x]:
                continue
            if y not in dist:
                dist[y] = dist[x] + 1
                branch[y] = y if x == v else branch[x]
                parent[y] = x
                q.append(y)
            elif branch[y] != branch[x] and y != v:
                length = dist[x] + dist[y] + 1
                if length <= limit and (best is None or length < best):
                    best = length
    return best


def _ball(g, v, radius):
    dist = g.bfs_distances(v, limit=radius)
    return np.flatnonzero(dist >= 0)


def _cyclomatic(g, verts):
    inside = np.zeros(g.n, dtype=bool)
    inside[verts] = True
    e = int(np.count_nonzero(inside[g.adj[verts]])) // 2
    return e - len(verts) + 1  # ball subgraphs are connected


def is_treelike(g, v, L1):
    return _cyclomatic(g, _ball(g, v, L1)) == 0


def check_typical(g, eps1=0.25, eps=0.1, sample_size=None, seed=0, tol=1e-8):
    if g.r < 3:
        raise ValueError("typicality is defined for r >= 3")
    if not 0 < eps1 < 1:
        raise ValueError("eps1 must lie in (0, 1)")
    if eps <= 0:
        raise ValueError("eps must be positive")
    n, r = g.n, g.r
    sample_size = n if sample_size is None else int(sample_size)
    if not 1 <= sample_size <= n:
        raise ValueError("sample_size must be in [1, n]")

    connected, bipartite = two_colour(g)
    lam2 = second_eigenvalue(g, tol=tol) if connected else float(r)
    L1 = _L1(n, r, eps1)

    on_small = [v for v in range(n) if shortest_cycle_through(g, v, L1) is not None]
    # P4: a small-cycle vertex whose 100*L1 ball carries two independent cycles
    p4 = any(_cyclomatic(g, _ball(g, v, 100 * L1)) >= 2 for v in on_small)

    if sample_size == n:
        sample = np.arange(n)
    else:
        sample = _rng.generator(seed, _rng.PLACE).choice(n, size=sample_size, replace=False)
    tree = sum(is_treelike(g, int(v), L1) for v in sample)

    return TypicalityReport(
        connected=connected,
        bipartite=bipartite,
        lambda2=lam2,
        lambda2_bound=2 * math.sqrt(r - 1) + eps,
        small_cycle_vertex_count=len(on_small),
        small_cycle_bound=n ** (2 * eps1),
        L1=L1,
        p4_violation=bool(p4),
        treelike_fraction=tree / len(sample),
        sample_size=len(sample),
    )
