"""
Generalised preferential attachment and topology analysis.

Growth starts from a 3-node seed (a triangle, or three pairwise 2-node
hyperedges) and repeats: pick a starting node, then attach links to
targets drawn with probability proportional to a preference score.

Starting node modes
    ``new`` (a fresh node each step), ``random_existing``,
    ``preferential_by_degree``.
Preference modes
    ``degree``, ``centrality`` (general centrality c(1, beta)),
    ``local_centrality`` (row of the starting node in the communication
    matrix; needs an existing starting node), ``cluster_coefficient``.

Centrality scores are recomputed every step. Negative centralities (the
``beta > 1/lambda_max`` regime) enter the lottery as
``max(score, 0) + 1e-9``; degree and cluster scores are used raw, and an
all-zero score vector falls back to a uniform draw that is logged.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .centrality import general_centrality_hyper, resolvent_apply
from .errors import ConfigError, PoleError
from .hypercore import Graph, Hypergraph, project

__all__ = [
    "GenConfig",
    "GrowthResult",
    "PowerLawFit",
    "TopologyReport",
    "START_MODES",
    "PREFERENCE_MODES",
    "seed_network",
    "grow",
    "add_edges",
    "cluster_coefficient",
    "link_degrees",
    "powerlaw_fit",
    "analyze",
    "beta_sweep",
    "sample_preference",
]

log = logging.getLogger(__name__)

START_MODES = ("new", "random_existing", "preferential_by_degree")
PREFERENCE_MODES = ("degree", "centrality", "local_centrality", "cluster_coefficient")
EPS_UNIFORM = 1e-9


@dataclass(frozen=True)
class GenConfig:
    starting_node_mode: str = "new"
    preference_mode: str = "degree"
    iterations: int = 100
    links_per_step: int = 1
    edge_weight: float = 0.1
    beta: float = 0.5
    rng_seed: int = 0
    mode: str = "graph"
    p_join: float = 0.5
    beta1: float = 1.0

    def __post_init__(self):
        if self.starting_node_mode not in START_MODES:
            raise ConfigError(f"unknown starting node mode {self.starting_node_mode!r}")
        if self.preference_mode not in PREFERENCE_MODES:
            raise ConfigError(f"unknown preference mode {self.preference_mode!r}")
        if self.mode not in ("graph", "hypergraph"):
            raise ConfigError(f"unknown mode {self.mode!r}")
        if self.iterations < 0 or self.links_per_step < 1:
            raise ConfigError("iterations must be >= 0 and links_per_step >= 1")
        if not 0.0 < self.edge_weight <= 1.0:
            raise ConfigError(f"edge_weight must lie in (0, 1], got {self.edge_weight}")
        if not 0.0 <= self.p_join <= 1.0:
            raise ConfigError("p_join must lie in [0, 1]")
        if self.preference_mode == "local_centrality" and self.starting_node_mode == "new":
            raise ConfigError(
                "local_centrality needs an existing starting node: "
                "a new node cannot reach anyone yet"
            )


@dataclass
class PowerLawFit:
    slope: float
    intercept: float
    r2: float
    centers: np.ndarray
    density: np.ndarray


@dataclass
class TopologyReport:
    degree: np.ndarray
    histogram: dict
    centrality: Optional[np.ndarray]
    cluster: np.ndarray
    fit: Optional[PowerLawFit]
    lambda_max: float
    beta: float
    notes: list = field(default_factory=list)

    def rows(self):
        """``(node, degree, centrality, cluster_coeff)`` per node."""
        cen = self.centrality
        return [
            (i, int(self.degree[i]), None if cen is None else float(cen[i]),
             float(self.cluster[i]))
            for i in range(self.degree.size)
        ]


@dataclass
class GrowthResult:
    network: object
    events: list
    links_added: int
    links: list = field(default_factory=list)
    """``(step, source, target, kind)`` per added link; ``kind`` is
    ``"link"`` for graphs and ``"join"`` (target is an edge index) or
    ``"found"`` (target is the partner node) for hypergraphs."""


# ---------------------------------------------------------------------------
# basic measures


def _adjacency(network):
    if isinstance(network, Graph):
        return network.adjacency
    if isinstance(network, Hypergraph):
        return project(network).adjacency
    return np.asarray(network, dtype=np.float64)


def _binary(a):
    b = (np.asarray(a) > 0).astype(np.float64)
    np.fill_diagonal(b, 0.0)
    return b


def link_degrees(network) -> np.ndarray:
    """Unweighted degree: links for a graph, hyperedges for a hypergraph."""
    if isinstance(network, Hypergraph):
        return np.count_nonzero(network.weights, axis=1).astype(np.float64)
    return _binary(_adjacency(network)).sum(axis=1)


def cluster_coefficient(network) -> np.ndarray:
    """Local clustering coefficient on the binarised simple graph.

    Self-loops are ignored; nodes of degree < 2 get 0. Hypergraphs are
    projected to ``W W^T`` first.
    """
    b = _binary(_adjacency(network))
    d = b.sum(axis=1)
    closed = ((b @ b) * b).sum(axis=1)  # = 2 * triangles through i
    pairs = d * (d - 1)
    out = np.zeros_like(d)
    np.divide(closed, pairs, out=out, where=pairs > 0)
    return out


def powerlaw_fit(degrees, n_bins=None) -> Optional[PowerLawFit]:
    """Least-squares line through the log-binned degree distribution.

    Bins are geometric between the smallest and largest positive degree
    (at least 5 bins); each bin's density is its count divided by the
    number of integers it covers and by the node count. The fit is
    ``log10 density = slope * log10 k + intercept`` over nonempty bins.
    Returns None with fewer than two usable bins.
    """
    k = np.asarray(degrees, dtype=np.float64)
    k = k[k > 0]
    if k.size == 0:
        return None
    kmin, kmax = k.min(), k.max()
    if n_bins is None:
        n_bins = max(5, int(math.ceil(math.log2(kmax / kmin))) + 1)
    edges = np.geomspace(kmin, kmax + 1, n_bins + 1)
    centers, dens = [], []
    for lo, hi in zip(edges[:-1], edges[1:]):
        first, last = math.ceil(lo - 1e-9), math.ceil(hi - 1e-9) - 1
        width = last - first + 1
        if width <= 0:
            continue
        cnt = np.count_nonzero((k >= first) & (k <= last))
        if cnt == 0:
            continue
        centers.append(math.sqrt(first * last))
        dens.append(cnt / (width * k.size))
    if len(centers) < 2:
        return None
    x = np.log10(centers)
    y = np.log10(dens)
    slope, intercept = np.polyfit(x, y, 1)
    pred = slope * x + intercept
    ss_tot = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 - float(((y - pred) ** 2).sum()) / ss_tot if ss_tot > 0 else 1.0
    return PowerLawFit(float(slope), float(intercept), r2, np.asarray(centers), np.asarray(dens))


# ---------------------------------------------------------------------------
# sampling


def sample_preference(scores, rng, events=None, step=None, floor=False):
    """Draw an index with probability proportional to ``scores``.

    With ``floor`` the weights are ``max(score, 0) + 1e-9``. Otherwise
    negative scores count as 0 and an all-zero vector triggers a uniform
    draw, recorded in ``events``.
    """
    s = np.asarray(scores, dtype=np.float64)
    if floor:
        p = np.maximum(s, 0.0) + EPS_UNIFORM
    else:
        p = np.maximum(s, 0.0)
    total = p.sum()
    if not total > 0 or not np.isfinite(total):
        ev = {"step": step, "event": "uniform_fallback", "candidates": int(s.size)}
        log.info("preference degenerate at step %s: uniform fallback", step)
        if events is not None:
            events.append(ev)
        p = np.ones_like(s)
        total = float(s.size)
    return int(rng.choice(s.size, p=p / total))


# ---------------------------------------------------------------------------
# growth state


def seed_network(edge_weight=0.1, mode="graph"):
    """Three fully connected nodes, every weight ``edge_weight``."""
    if mode == "graph":
        a = np.full((3, 3), float(edge_weight))
        np.fill_diagonal(a, 0.0)
        return Graph(a)
    w = np.zeros((3, 3))
    for j, (u, v) in enumerate([(0, 1), (1, 2), (0, 2)]):
        w[u, j] = w[v, j] = edge_weight
    return Hypergraph(w)


class _GraphState:
    def __init__(self, a, capacity):
        n = a.shape[0]
        self.n = n
        self.a = np.zeros((capacity, capacity))
        self.a[:n, :n] = a
        self.links = []

    def grow_to(self, n):
        if n > self.a.shape[0]:
            cap = max(n, 2 * self.a.shape[0])
            big = np.zeros((cap, cap))
            big[: self.n, : self.n] = self.a[: self.n, : self.n]
            self.a = big
        self.n = n

    @property
    def view(self):
        return self.a[: self.n, : self.n]

    def link(self, s, t, w, step):
        self.a[s, t] = self.a[t, s] = w
        self.links.append((step, int(s), int(t), "link"))


class _HyperState:
    def __init__(self, w):
        self.w = np.array(w, dtype=np.float64)
        self.links = []

    @property
    def n(self):
        return self.w.shape[0]

    def add_node(self):
        self.w = np.vstack([self.w, np.zeros((1, self.w.shape[1]))])
        return self.n - 1

    def add_edge(self, members, weight):
        col = np.zeros((self.n, 1))
        col[list(members), 0] = weight
        self.w = np.hstack([self.w, col])


def _pick_start(mode, n, degrees, rng, events, step):
    if mode == "random_existing":
        return int(rng.integers(n))
    return sample_preference(degrees, rng, events, step)


def _poles_checked_centrality(a, beta, step):
    ev = np.linalg.eigvalsh(a) if a.size else np.zeros(0)
    try:
        d = a @ np.ones(a.shape[0])
        c, _ = resolvent_apply(a, beta, d, "solve", eigenvalues=ev)
    except PoleError as exc:
        raise PoleError(exc.beta, exc.lam, step=step) from None
    return c, ev


def _graph_scores(cfg, a, s, candidates, step):
    pref = cfg.preference_mode
    if pref == "degree":
        return _binary(a).sum(axis=1)[candidates], False
    if pref == "cluster_coefficient":
        return cluster_coefficient(a)[candidates], False
    if pref == "centrality":
        c, _ = _poles_checked_centrality(a, cfg.beta, step)
        return c[candidates], True
    # local centrality: row s of (I - beta A)^-1 A, symmetric for symmetric A
    try:
        row, _ = resolvent_apply(a, cfg.beta, a[:, s], "solve")
    except PoleError as exc:
        raise PoleError(exc.beta, exc.lam, step=step) from None
    return row[candidates], True


def _attach_graph(state, cfg, s, rng, events, step, cand_limit=None):
    """Link ``s`` to up to ``links_per_step`` new targets; return count."""
    added = 0
    for _ in range(cfg.links_per_step):
        n = state.n
        mask = np.ones(n, dtype=bool)
        mask[s] = False
        mask &= state.a[s, :n] == 0
        if cand_limit is not None:
            mask[cand_limit:] = False
        candidates = np.flatnonzero(mask)
        if candidates.size == 0:
            events.append({"step": step, "event": "no_candidates", "node": int(s)})
            break
        sub = state.view if cand_limit is None else state.a[:cand_limit, :cand_limit]
        node = s if cand_limit is None or s < cand_limit else None
        scores, floor = _graph_scores(cfg, sub, node, candidates, step)
        t = int(candidates[sample_preference(scores, rng, events, step, floor)])
        state.link(s, t, cfg.edge_weight, step)
        added += 1
    return added


def _grow_graph(cfg, rng, events, initial=None):
    seed = seed_network(cfg.edge_weight, "graph") if initial is None else initial
    new = cfg.starting_node_mode == "new"
    a0 = _adjacency(seed)
    st = _GraphState(a0, a0.shape[0] + (cfg.iterations if new else 0))
    added = 0
    for step in range(cfg.iterations):
        if new:
            old = st.n
            st.grow_to(old + 1)
            added += _attach_graph(st, cfg, old, rng, events, step, cand_limit=old)
        else:
            got = _add_links_graph(st, cfg, cfg.links_per_step, rng, events, step)
            added += got
            if got < cfg.links_per_step:
                events.append({"step": step, "event": "saturated", "added": got})
                break
    return Graph(st.view.copy()), added, st.links


def _add_links_graph(st, cfg, count, rng, events, step):
    """Add ``count`` links from existing starting nodes (no new nodes)."""
    added = 0
    one = replace(cfg, links_per_step=1)
    while added < count:
        a = st.view
        b = _binary(a)
        deg = b.sum(axis=1)
        open_nodes = deg < st.n - 1
        if not open_nodes.any():
            break
        s = _pick_start(cfg.starting_node_mode, st.n, deg, rng, events, step)
        if not open_nodes[s]:
            # saturated start: redraw among nodes that still have a free pair
            idx = np.flatnonzero(open_nodes)
            s = int(idx[_pick_start(cfg.starting_node_mode, idx.size, deg[idx], rng,
                                    events, step)])
        added += _attach_graph(st, one, s, rng, events, step)
    return added


# hypergraph growth --------------------------------------------------------


def _hyper_centrality(cfg, w, step):
    h = Hypergraph(w)
    try:
        return general_centrality_hyper(h, 1.0, 1.0, cfg.beta1, cfg.beta, "solve")
    except PoleError as exc:
        raise PoleError(exc.beta, exc.lam, step=step) from None


def _ww(w):
    m = w @ w.T
    return np.triu(m) + np.triu(m, 1).T


def _hyper_node_scores(cfg, w, s, candidates, step):
    pref = cfg.preference_mode
    if pref == "degree":
        return np.count_nonzero(w, axis=1)[candidates].astype(float), False
    if pref == "cluster_coefficient":
        return cluster_coefficient(_ww(w))[candidates], False
    if pref == "centrality":
        return _hyper_centrality(cfg, w, step).node_scores[candidates], True
    m = _ww(w)
    b = cfg.beta1 * cfg.beta
    try:
        row, _ = resolvent_apply(m, b, m[:, s], "solve")
    except PoleError as exc:
        raise PoleError(exc.beta, exc.lam, step=step) from None
    return cfg.beta1 * row[candidates], True


def _hyper_edge_scores(cfg, w, s, candidates, step):
    pref = cfg.preference_mode
    if pref == "degree":
        return np.count_nonzero(w, axis=0)[candidates].astype(float), False
    if pref == "cluster_coefficient":
        cc = cluster_coefficient(_ww(w))
        sizes = np.count_nonzero(w, axis=0)
        tot = (w > 0).T.astype(float) @ cc
        return (tot / np.maximum(sizes, 1))[candidates], False
    if pref == "centrality":
        return _hyper_centrality(cfg, w, step).edge_scores[candidates], True
    # local: node-to-edge communication chances of s, (I - b W W^T)^-1 W
    b = cfg.beta1 * cfg.beta
    m = _ww(w)
    e = np.zeros(w.shape[0])
    e[s] = 1.0
    try:
        g, _ = resolvent_apply(m, b, e, "solve")
    except PoleError as exc:
        raise PoleError(exc.beta, exc.lam, step=step) from None
    return (w.T @ g)[candidates], True


def _hyper_action(st, cfg, s, rng, events, step, limit):
    """Join ``s`` to an existing hyperedge or found a 2-node edge with a
    sampled partner. Returns True on success."""
    w = st.w
    n_scope = limit if limit is not None else st.n
    scope = w[:n_scope]
    free_edges = np.flatnonzero((w[s] == 0) & np.any(scope > 0, axis=0))
    partners = np.ones(n_scope, dtype=bool)
    if s < n_scope:
        partners[s] = False
    shared = (w[s] > 0) @ (scope > 0).T if w.shape[1] else np.zeros(n_scope, bool)
    partners &= ~np.asarray(shared, dtype=bool)
    partners = np.flatnonzero(partners)
    join = rng.random() < cfg.p_join
    node = s if s < n_scope else None
    if join and free_edges.size:
        scores, floor = _hyper_edge_scores(cfg, scope, node, free_edges, step)
        e = int(free_edges[sample_preference(scores, rng, events, step, floor)])
        st.w[s, e] = cfg.edge_weight
        st.links.append((step, int(s), e, "join"))
        return True
    if partners.size:
        scores, floor = _hyper_node_scores(cfg, scope, node, partners, step)
        t = int(partners[sample_preference(scores, rng, events, step, floor)])
        st.add_edge((s, t), cfg.edge_weight)
        st.links.append((step, int(s), t, "found"))
        return True
    events.append({"step": step, "event": "no_candidates", "node": int(s)})
    return False


def _grow_hyper(cfg, rng, events, initial=None):
    if initial is None:
        initial = seed_network(cfg.edge_weight, "hypergraph")
    st = _HyperState(initial.weights)
    new = cfg.starting_node_mode == "new"
    added = 0
    for step in range(cfg.iterations):
        if new:
            old = st.n
            s = st.add_node()
            limit = old
        else:
            deg = np.count_nonzero(st.w, axis=1).astype(float)
            s = _pick_start(cfg.starting_node_mode, st.n, deg, rng, events, step)
            limit = None
        for _ in range(cfg.links_per_step):
            if _hyper_action(st, cfg, s, rng, events, step, limit):
                added += 1
    return Hypergraph(st.w), added, st.links


def grow(config: GenConfig, initial=None) -> GrowthResult:
    """Run ``config.iterations`` growth steps from the 3-node seed (or from
    ``initial``, a Graph or Hypergraph matching ``config.mode``).

    An existing-node starting mode adds links only, so on the complete
    seed triangle it stops at once with a ``saturated`` event.

    Deterministic for a given config. With ``starting_node_mode="new"`` and
    the graph mode every step adds one node and ``links_per_step`` links.

    Raises
    ------
    PoleError
        A centrality-based preference hit ``beta = 1/lambda``; ``step``
        on the exception says when.
    """
    rng = np.random.Generator(np.random.PCG64(config.rng_seed))
    events = []
    if config.mode == "graph":
        if isinstance(initial, Hypergraph):
            raise ConfigError("graph mode needs a Graph as the initial network")
        net, added, links = _grow_graph(config, rng, events, initial)
    else:
        if initial is not None and not isinstance(initial, Hypergraph):
            raise ConfigError("hypergraph mode needs a Hypergraph as the initial network")
        net, added, links = _grow_hyper(config, rng, events, initial)
    return GrowthResult(network=net, events=events, links_added=added, links=links)


def add_edges(network, config: GenConfig, count):
    """Add ``count`` links between existing nodes.

    Starting nodes follow ``config.starting_node_mode`` (which must not be
    ``new``); targets follow the preference mode and exclude the start and
    its current neighbours. On a saturated network the result is partial.

    Returns a :class:`GrowthResult`; ``links_added`` is the count achieved.
    """
    if config.starting_node_mode == "new":
        raise ConfigError("add_edges needs an existing starting node mode")
    rng = np.random.Generator(np.random.PCG64(config.rng_seed))
    events = []
    if isinstance(network, Hypergraph):
        st = _HyperState(network.weights)
        achieved = 0
        one = replace(config, p_join=0.0)
        for k in range(count):
            m = _ww(st.w)
            b = _binary(m)
            open_nodes = np.flatnonzero(b.sum(axis=1) < st.n - 1)
            if open_nodes.size == 0:
                events.append({"step": k, "event": "saturated", "added": achieved})
                break
            deg = np.count_nonzero(st.w, axis=1).astype(float)
            s = int(open_nodes[_pick_start(config.starting_node_mode, open_nodes.size,
                                           deg[open_nodes], rng, events, k)])
            if _hyper_action(st, one, s, rng, events, k, None):
                achieved += 1
        return GrowthResult(Hypergraph(st.w, network.node_labels), events, achieved, st.links)
    a = _adjacency(network)
    st = _GraphState(a, a.shape[0])
    achieved = 0
    for k in range(count):
        if _add_links_graph(st, config, 1, rng, events, k) == 0:
            events.append({"step": k, "event": "saturated", "added": achieved})
            break
        achieved += 1
    labels = network.node_labels if isinstance(network, Graph) else None
    return GrowthResult(Graph(st.view.copy(), labels), events, achieved, st.links)


# ---------------------------------------------------------------------------
# analysis


def analyze(network, beta=0.5, beta1=1.0) -> TopologyReport:
    """Degree histogram, centrality and cluster coefficient per node, a
    power-law fit of the degree distribution, and lambda_max.

    Graph centrality is c(1, beta); hypergraph centrality is the node score
    with alpha1 = alpha2 = 1, beta1 and beta2 = beta. A pole leaves the
    centrality column empty and adds a note.
    """
    deg = link_degrees(network)
    cc = cluster_coefficient(network)
    notes = []
    if isinstance(network, Hypergraph):
        a = _ww(network.weights)
    else:
        a = _adjacency(network)
    ev = np.linalg.eigvalsh(a) if a.size else np.zeros(1)
    lam = float(ev[-1])
    cen = None
    try:
        if isinstance(network, Hypergraph):
            import warnings

            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                cen = general_centrality_hyper(network, 1.0, 1.0, beta1, beta).node_scores
        else:
            cen, _ = resolvent_apply(a, beta, a @ np.ones(a.shape[0]), "solve",
                                     eigenvalues=ev)
            if beta * lam >= 1:
                notes.append(f"non-communicative regime: beta*lambda_max={beta * lam:.6g}")
    except PoleError as exc:
        notes.append(f"centrality skipped: {exc}")
    values, counts = np.unique(deg.astype(int), return_counts=True)
    hist = {int(v): int(c) for v, c in zip(values, counts)}
    return TopologyReport(
        degree=deg, histogram=hist, centrality=cen, cluster=cc,
        fit=powerlaw_fit(deg), lambda_max=lam, beta=beta, notes=notes,
    )


def beta_sweep(network, betas=None):
    """Centrality against degree for a range of beta (default 0, 0.1, .., 1).

    Returns a list of ``(beta, degree, centrality_or_None, note)``.
    Exploratory output only; poles are reported, not raised.
    """
    if betas is None:
        betas = [round(0.1 * k, 10) for k in range(11)]
    a = _adjacency(network)
    ev = np.linalg.eigvalsh(a)
    deg = link_degrees(network)
    out = []
    for b in betas:
        try:
            c, _ = resolvent_apply(a, b, a @ np.ones(a.shape[0]), "solve", eigenvalues=ev)
            note = "" if b * ev[-1] < 1 else "non-communicative"
        except PoleError as exc:
            c, note = None, f"pole: {exc}"
        out.append((float(b), deg, c, note))
    return out
