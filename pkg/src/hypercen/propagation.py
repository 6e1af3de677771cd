"""
Monte-Carlo and exact counting of communications.

A message starts at node ``i``. Each hop across weight ``w`` multiplies
the path weight by ``w``; after every hop the receiver relays the message
onward with the pass probability. The expected weighted number of
communications is the truncated series ``sum_k beta^k (A^(k+1) 1)_i``,
i.e. the general centrality ``c(1, beta)`` when the series converges.

In a hypergraph the message alternates node -> edge (weights ``W``, relay
chance ``beta1`` at the edge) and edge -> node (weights ``W^T``, relay chance
``beta2`` at the node). Communications ending at edges and at nodes are
counted separately::

    edge_count = sum_k (b1 b2 W W^T)^k W 1
    node_count = b1 sum_k (b1 b2)^k (W W^T)^(k+1) 1

Two samplers are provided.

``"direct"``
    The message is relayed with the literal pass probability and the next
    receiver is drawn proportional to the hop weight; the walk carries the
    row sums as importance weights. Unbiased, but its variance is only
    finite when ``beta * rho(D A) < 1`` (``D`` the diagonal of degrees),
    which fails for most unit-weight graphs.

``"perron"`` (default)
    Doob h-transform by the Perron vector of every connected component:
    the next receiver is drawn proportional to ``A_uj h_j`` and the walk
    survives with probability ``beta * lambda``. Path weights telescope to
    ``h_i / h_u``, so per-walk contributions stay bounded and the variance
    is finite whenever ``beta * lambda_max < 1``. For a single self-looped
    node of weight 1 both samplers coincide.

Random streams: start node ``i`` draws from
``Generator(PCG64(SeedSequence(seed).spawn(n)[i]))`` and consumes walks in
fixed batches, so results do not depend on ``threads``.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.sparse.csgraph import connected_components

from .hypercore import Graph, Hypergraph

__all__ = [
    "PropagationConfig",
    "PropagationStats",
    "simulate_graph",
    "simulate_hyper",
    "enumerate_graph",
    "enumerate_hyper",
    "truncated_series_graph",
    "truncated_series_hyper",
    "variance_radius",
]

BATCH = 1 << 17


@dataclass(frozen=True)
class PropagationConfig:
    """Simulation settings.

    ``pass_probability_node`` is beta for graphs and beta2 for hypergraphs;
    ``pass_probability_edge`` is beta1 (hypergraphs only).
    ``alpha1``/``alpha2`` weight the edge/node counts in the hypergraph
    ``estimate`` column.
    """

    pass_probability_node: float = 0.5
    pass_probability_edge: float = 1.0
    walks_per_node: int = 10_000
    rng_seed: int = 0
    max_hops: int = 64
    sampler: str = "perron"
    alpha1: float = 1.0
    alpha2: float = 1.0
    threads: int = 1

    def __post_init__(self):
        for name in ("pass_probability_node", "pass_probability_edge"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {p}")
        if self.walks_per_node < 1:
            raise ValueError("walks_per_node must be >= 1")
        if self.max_hops < 1:
            raise ValueError("max_hops must be >= 1")
        if self.sampler not in ("perron", "direct"):
            raise ValueError(f"unknown sampler {self.sampler!r}")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")


@dataclass
class PropagationStats:
    estimate: np.ndarray
    stderr: np.ndarray
    mean_chain_length: np.ndarray
    edge_estimate: Optional[np.ndarray] = None
    edge_stderr: Optional[np.ndarray] = None
    node_estimate: Optional[np.ndarray] = None
    node_stderr: Optional[np.ndarray] = None
    truncation_bound: float = float("inf")
    walks: int = 0
    sampler: str = "perron"


# ---------------------------------------------------------------------------
# running moments (Chan et al. pairwise merge)


class _Moments:
    __slots__ = ("n", "mean", "m2")

    def __init__(self, k):
        self.n = 0
        self.mean = np.zeros(k)
        self.m2 = np.zeros(k)

    def add(self, values):
        # values: (batch, k)
        nb = values.shape[0]
        mb = values.mean(axis=0)
        m2b = ((values - mb) ** 2).sum(axis=0)
        n = self.n + nb
        delta = mb - self.mean
        self.mean = self.mean + delta * (nb / n)
        self.m2 = self.m2 + m2b + delta**2 * (self.n * nb / n)
        self.n = n

    def stderr(self):
        if self.n < 2:
            return np.zeros_like(self.mean)
        return np.sqrt(self.m2 / (self.n - 1) / self.n)


# ---------------------------------------------------------------------------
# transition tables


def _alias_row(p):
    """Vose alias table for one probability row (sums to 1)."""
    k = p.size
    prob = np.zeros(k)
    alias = np.arange(k)
    scaled = p * k
    small = [i for i in range(k) if scaled[i] < 1.0]
    large = [i for i in range(k) if scaled[i] >= 1.0]
    while small and large:
        s_, l_ = small.pop(), large.pop()
        prob[s_] = scaled[s_]
        alias[s_] = l_
        scaled[l_] = scaled[l_] + scaled[s_] - 1.0
        (small if scaled[l_] < 1.0 else large).append(l_)
    for i in large + small:
        # leftovers are 1 up to round-off; never route them to a zero column
        prob[i] = 1.0 if p[i] > 0 else 0.0
        if p[i] == 0:
            alias[i] = int(np.argmax(p))
    return prob, alias


class _Table:
    """Row-wise categorical sampler (alias method) plus per-transition
    multipliers."""

    def __init__(self, probs, mult):
        rows, cols = probs.shape
        self.cols = cols
        accept = np.zeros((rows, cols))
        alias = np.tile(np.arange(cols), (rows, 1))
        for u in range(rows):
            tot = probs[u].sum()
            if tot > 0:
                accept[u], alias[u] = _alias_row(probs[u] / tot)
        self._accept = accept.ravel()
        self._alias = alias.ravel()
        self.mult = mult
        self._mult_flat = np.ascontiguousarray(mult).ravel()

    def draw(self, u, r):
        """Row-``u`` categorical draws from uniforms ``r`` in [0, 1)."""
        x = r * self.cols
        k = np.minimum(x.astype(np.int64), self.cols - 1)
        cell = u * self.cols + k
        keep = (x - k) < self._accept.take(cell)
        return np.where(keep, k, self._alias.take(cell))

    def weight(self, u, j):
        return self._mult_flat.take(u * self.cols + j)


def _components(adj):
    ncomp, labels = connected_components(adj > 0, directed=False)
    return ncomp, labels


def _perron_by_component(sym, labels, ncomp):
    """Per-component (lambda, h) of a symmetric non-negative matrix."""
    n = sym.shape[0]
    h = np.zeros(n)
    lam = np.zeros(n)
    for c in range(ncomp):
        idx = np.flatnonzero(labels == c)
        sub = sym[np.ix_(idx, idx)]
        if not np.any(sub):
            continue
        vals, vecs = np.linalg.eigh(sub)
        v = vecs[:, -1]
        v = v if v.sum() >= 0 else -v
        v = np.maximum(v, 1e-300)
        h[idx] = v
        lam[idx] = max(vals[-1], 0.0)
    return lam, h


def _safe_div(num, den):
    out = np.zeros(np.broadcast(num, den).shape)
    np.divide(num, den, out=out, where=den > 0)
    return out


def variance_radius(a, beta):
    """``beta * rho(D A)``; the direct sampler has finite variance below 1."""
    a = np.asarray(a, dtype=np.float64)
    d = a.sum(axis=1)
    ev = np.linalg.eigvals(d[:, None] * a)
    return float(beta * np.max(np.abs(ev), initial=0.0))


# ---------------------------------------------------------------------------
# graph mode


def _graph_tables(a, beta, sampler):
    n = a.shape[0]
    d = a.sum(axis=1)
    if sampler == "direct":
        probs = _safe_div(a, d[:, None])
        mult = np.where(probs > 0, d[:, None], 0.0)
        q = np.full(n, beta)
    else:
        ncomp, labels = _components(a)
        lam, h = _perron_by_component(a, labels, ncomp)
        scaled = a * h[None, :]
        probs = _safe_div(scaled, scaled.sum(axis=1)[:, None])
        q = np.minimum(beta * lam, 1.0)
        # beta * A_uj / (q_u P_uj) = beta * lam * h_u / (q_u h_j)
        ratio = _safe_div(beta * lam, q)
        mult = np.where(probs > 0, ratio[:, None] * _safe_div(h[:, None], h[None, :]), 0.0)
    return d, _Table(probs, mult), q


def _walk_graph(i, walks, d, table, q, max_hops, rng):
    mom = _Moments(2)
    done = 0
    while done < walks:
        nb = min(BATCH, walks - done)
        total = np.zeros(nb)
        hops = np.zeros(nb)
        idx = np.arange(nb)
        pos = np.full(nb, i)
        w = np.ones(nb)
        for _ in range(max_hops):
            du = d.take(pos)
            total[idx] += w * du
            hops[idx] += du > 0
            # one uniform per step: r < q decides the relay, r / q (uniform
            # given survival) picks the receiver
            r = rng.random(idx.size)
            qp = q.take(pos)
            alive = (r < qp) & (du > 0)
            idx, pos, w = idx[alive], pos[alive], w[alive]
            if idx.size == 0:
                break
            nxt = table.draw(pos, r[alive] / qp[alive])
            w = w * table.weight(pos, nxt)
            pos = nxt
        mom.add(np.column_stack([total, hops]))
        done += nb
    return mom


def _run(starts, fn, seed, threads):
    streams = np.random.SeedSequence(seed).spawn(len(starts))
    jobs = [(i, np.random.Generator(np.random.PCG64(s))) for i, s in zip(starts, streams)]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(lambda job: fn(*job), jobs))
    return [fn(*job) for job in jobs]


def _as_matrix(a):
    if isinstance(a, Graph):
        return a.adjacency
    return np.asarray(a, dtype=np.float64)


def simulate_graph(a, config: PropagationConfig) -> PropagationStats:
    """Estimate the expected weighted communication count from every node.

    ``a`` is a non-negative adjacency matrix (or :class:`Graph`); the pass
    probability is ``config.pass_probability_node``.
    """
    a = _as_matrix(a)
    beta = config.pass_probability_node
    n = a.shape[0]
    d, table, q = _graph_tables(a, beta, config.sampler)

    def one(i, rng):
        return _walk_graph(i, config.walks_per_node, d, table, q, config.max_hops, rng)

    moms = _run(range(n), one, config.rng_seed, config.threads)
    mean = np.array([m.mean for m in moms])
    se = np.array([m.stderr() for m in moms])
    lam = float(np.max(np.abs(np.linalg.eigvalsh(a)), initial=0.0)) if n else 0.0
    r = beta * lam
    bound = r ** (config.max_hops + 1) / (1 - r) if r < 1 else float("inf")
    return PropagationStats(
        estimate=mean[:, 0], stderr=se[:, 0], mean_chain_length=mean[:, 1],
        truncation_bound=bound, walks=config.walks_per_node, sampler=config.sampler,
    )


# ---------------------------------------------------------------------------
# hypergraph mode


def _hyper_tables(w, b1, b2, sampler):
    n, m = w.shape
    dn = w.sum(axis=1)
    de = w.sum(axis=0)
    if sampler == "direct":
        p_ne = _safe_div(w, dn[:, None])
        p_en = _safe_div(w.T, de[:, None])
        mult_ne = np.where(p_ne > 0, dn[:, None], 0.0)
        mult_en = np.where(p_en > 0, de[:, None], 0.0)
        q1 = np.full(m, b1)
        q2 = np.full(n, b2)
        r1 = np.ones(m)
        r2 = np.ones(n)
    else:
        # bipartite components; Perron pair x (nodes), y (edges), W y = s x
        big = np.zeros((n + m, n + m))
        big[:n, n:] = w
        big[n:, :n] = w.T
        ncomp, labels = _components(big)
        lam_b, hb = _perron_by_component(big, labels, ncomp)
        x, y = hb[:n], hb[n:]
        s_n, s_e = lam_b[:n], lam_b[n:]  # singular value per component
        p_ne = _safe_div(w * y[None, :], (w * y[None, :]).sum(axis=1)[:, None])
        p_en = _safe_div(w.T * x[None, :], (w.T * x[None, :]).sum(axis=1)[:, None])
        # W_uj / P_uj = s x_u / y_j and W_lj / P_jl = s y_j / x_l
        mult_ne = np.where(p_ne > 0, (s_n * x)[:, None] * _safe_div(1.0, y)[None, :], 0.0)
        mult_en = np.where(p_en > 0, (s_e * y)[:, None] * _safe_div(1.0, x)[None, :], 0.0)
        if b1 > 0 and b2 > 0:
            g_e = np.sqrt(b1 * b2) * s_e
            g_n = np.sqrt(b1 * b2) * s_n
            q1 = np.minimum(g_e, 1.0)
            q2 = np.minimum(g_n, 1.0)
        else:
            q1 = np.minimum(b1 * s_e, 1.0) if b1 > 0 else np.zeros(m)
            q2 = np.minimum(b2 * s_n, 1.0) if b2 > 0 else np.zeros(n)
        r1 = _safe_div(np.full(m, b1), q1)
        r2 = _safe_div(np.full(n, b2), q2)
    t_ne = _Table(p_ne, mult_ne)
    t_en = _Table(p_en, mult_en)
    return dn, de, t_ne, t_en, q1, q2, r1, r2


def _walk_hyper(i, cfg, tabs, rng):
    dn, de, t_ne, t_en, q1, q2, r1, r2 = tabs
    mom = _Moments(4)
    walks = cfg.walks_per_node
    done = 0
    while done < walks:
        nb = min(BATCH, walks - done)
        e_cnt = np.zeros(nb)
        n_cnt = np.zeros(nb)
        hops = np.zeros(nb)
        idx = np.arange(nb)
        pos = np.full(nb, i)
        w = np.ones(nb)
        h = 0
        while idx.size and h < cfg.max_hops:
            # at nodes: communicate to all incident edges
            du = dn.take(pos)
            e_cnt[idx] += w * du
            hops[idx] += du > 0
            h += 1
            keep = du > 0
            idx, pos, w = idx[keep], pos[keep], w[keep]
            if idx.size == 0 or h >= cfg.max_hops:
                break
            edge = t_ne.draw(pos, rng.random(idx.size))
            w = w * t_ne.weight(pos, edge)
            # at the edge: relay to its members with chance beta1
            alive = rng.random(idx.size) < q1.take(edge)
            idx, edge, w = idx[alive], edge[alive], w[alive] * r1.take(edge[alive])
            if idx.size == 0:
                break
            n_cnt[idx] += w * de.take(edge)
            hops[idx] += 1
            h += 1
            if h >= cfg.max_hops:
                break
            node = t_en.draw(edge, rng.random(idx.size))
            w = w * t_en.weight(edge, node)
            # at the node: relay with chance beta2
            alive = rng.random(idx.size) < q2.take(node)
            idx, pos, w = idx[alive], node[alive], w[alive] * r2.take(node[alive])
        total = cfg.alpha1 * e_cnt + cfg.alpha2 * n_cnt
        mom.add(np.column_stack([total, e_cnt, n_cnt, hops]))
        done += nb
    return mom


def simulate_hyper(h: Hypergraph, config: PropagationConfig) -> PropagationStats:
    """Alternating node/edge message simulation on a hypergraph.

    ``edge_estimate`` and ``node_estimate`` are the two counts;
    ``estimate = alpha1 * edge + alpha2 * node`` per walk.
    """
    w = h.weights
    b1 = config.pass_probability_edge
    b2 = config.pass_probability_node
    tabs = _hyper_tables(w, b1, b2, config.sampler)
    moms = _run(range(w.shape[0]), lambda i, rng: _walk_hyper(i, config, tabs, rng),
                config.rng_seed, config.threads)
    mean = np.array([m.mean for m in moms]).reshape(-1, 4)
    se = np.array([m.stderr() for m in moms]).reshape(-1, 4)
    lam = float(np.linalg.eigvalsh(w @ w.T).max(initial=0.0)) if w.size else 0.0
    r = b1 * b2 * lam
    k = config.max_hops // 2
    bound = r ** (k + 1) / (1 - r) if r < 1 else float("inf")
    return PropagationStats(
        estimate=mean[:, 0], stderr=se[:, 0], mean_chain_length=mean[:, 3],
        edge_estimate=mean[:, 1], edge_stderr=se[:, 1],
        node_estimate=mean[:, 2], node_stderr=se[:, 2],
        truncation_bound=bound, walks=config.walks_per_node, sampler=config.sampler,
    )


# ---------------------------------------------------------------------------
# deterministic oracles


def truncated_series_graph(a, beta, max_hops):
    """``sum_{k=0}^{max_hops-1} beta^k A^(k+1) 1``."""
    a = _as_matrix(a)
    term = a @ np.ones(a.shape[0])
    acc = term.copy()
    for _ in range(1, max_hops):
        term = beta * (a @ term)
        acc = acc + term
    return acc


def truncated_series_hyper(w, beta1, beta2, max_hops):
    """(edge_count, node_count) series cut at ``max_hops`` total hops.

    Edge term ``k`` needs ``2k + 1`` hops, node term ``k`` needs ``2k + 2``.
    """
    w = np.asarray(w, dtype=np.float64)
    n, m = w.shape
    mm = w @ w.T
    b = beta1 * beta2
    edge = np.zeros(n)
    node = np.zeros(n)
    t_e = w @ np.ones(m)
    t_n = beta1 * (mm @ np.ones(n))
    k = 0
    while 2 * k + 1 <= max_hops:
        edge += t_e
        if 2 * k + 2 <= max_hops:
            node += t_n
        t_e = b * (mm @ t_e)
        t_n = b * (mm @ t_n)
        k += 1
    return edge, node


def enumerate_graph(a, beta, max_hops) -> np.ndarray:
    """Exact count by listing every walk of 1..max_hops hops.

    Each path of ``L`` hops contributes ``beta^(L-1)`` times the product of
    its hop weights. Paths are expanded level by level as explicit arrays
    (one row per path), so the cost grows like ``deg^max_hops``; meant for
    graphs with at most a handful of nodes.
    """
    a = _as_matrix(a)
    n = a.shape[0]
    src, dst = np.nonzero(a)
    out = np.zeros(n)
    start = src.copy()
    end = dst.copy()
    weight = a[src, dst].copy()
    nbrs = [np.flatnonzero(a[u]) for u in range(n)]
    for level in range(1, max_hops + 1):
        out += np.bincount(start, weights=weight * beta ** (level - 1), minlength=n)
        if level == max_hops or weight.size == 0:
            break
        counts = np.array([nbrs[u].size for u in end])
        rep = np.repeat(np.arange(end.size), counts)
        nxt = np.concatenate([nbrs[u] for u in end]) if rep.size else np.zeros(0, int)
        weight = weight[rep] * a[end[rep], nxt]
        start = start[rep]
        end = nxt
    return out


def enumerate_hyper(w, beta1, beta2, max_hops):
    """Exact (edge_count, node_count) by listing alternating paths."""
    w = np.asarray(w, dtype=np.float64)
    n, m = w.shape
    edges_of = [np.flatnonzero(w[u]) for u in range(n)]
    nodes_of = [np.flatnonzero(w[:, j]) for j in range(m)]
    e_out = np.zeros(n)
    n_out = np.zeros(n)
    # frontier at nodes: (start, node, weight incl. relay factors)
    start = np.arange(n)
    cur = np.arange(n)
    weight = np.ones(n)
    hops = 0
    while hops < max_hops and weight.size:
        counts = np.array([edges_of[u].size for u in cur])
        rep = np.repeat(np.arange(cur.size), counts)
        nxt = np.concatenate([edges_of[u] for u in cur]) if rep.size else np.zeros(0, int)
        weight = weight[rep] * w[cur[rep], nxt]
        start, cur = start[rep], nxt
        e_out += np.bincount(start, weights=weight, minlength=n)
        hops += 1
        if hops >= max_hops or weight.size == 0:
            break
        counts = np.array([nodes_of[j].size for j in cur])
        rep = np.repeat(np.arange(cur.size), counts)
        nxt = np.concatenate([nodes_of[j] for j in cur]) if rep.size else np.zeros(0, int)
        weight = beta1 * weight[rep] * w[nxt, cur[rep]]
        start, cur = start[rep], nxt
        n_out += np.bincount(start, weights=weight, minlength=n)
        hops += 1
        weight = beta2 * weight
    return e_out, n_out
