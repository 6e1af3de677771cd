"""
Hypergraph data model, projections, degrees and file I/O.

A hypergraph on ``n`` nodes and ``m`` hyperedges is stored as a dense
``n x m`` weight matrix ``W`` with ``W[i, j]`` the weight of node ``i`` in
edge ``j`` (0 means "not a member"). Directed hypergraphs add a second
matrix ``Z`` holding edge-to-node weights.

Simple weighted graphs (the output of the graph-mode generator) are kept
as a symmetric adjacency matrix in :class:`Graph`.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .errors import HypergraphParseError

__all__ = [
    "Hypergraph",
    "DirectedHypergraph",
    "Graph",
    "ProjectedGraph",
    "BipartiteGraph",
    "ValidationReport",
    "validate",
    "project",
    "project_directed",
    "to_bipartite",
    "from_bipartite",
    "node_degrees",
    "edge_degrees",
    "load",
    "save",
    "loads",
    "dumps",
    "export_csv",
    "import_csv",
]


def _frozen(a, ndim=2):
    arr = np.array(a, dtype=np.float64)
    if arr.ndim != ndim:
        raise ValueError(f"expected a {ndim}-d array, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


def _labels(labels, count, prefix):
    if labels is None:
        return tuple(f"{prefix}{k + 1}" for k in range(count))
    labels = tuple(str(x) for x in labels)
    if len(labels) != count:
        raise ValueError(f"expected {count} labels, got {len(labels)}")
    if len(set(labels)) != count:
        raise ValueError("labels must be unique")
    return labels


@dataclass(frozen=True, eq=False)
class Hypergraph:
    """Undirected weighted hypergraph.

    Parameters
    ----------
    weights : array_like, shape (n_nodes, n_edges)
        Membership weights in [0, 1]. The array is copied and frozen.
    node_labels, edge_labels : sequence of str, optional
        Defaults are ``n1, n2, ...`` and ``e1, e2, ...``.
    """

    weights: np.ndarray
    node_labels: tuple = ()
    edge_labels: tuple = ()

    def __init__(self, weights, node_labels=None, edge_labels=None):
        w = _frozen(weights)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "node_labels", _labels(node_labels, w.shape[0], "n"))
        object.__setattr__(self, "edge_labels", _labels(edge_labels, w.shape[1], "e"))

    @property
    def node_count(self) -> int:
        return self.weights.shape[0]

    @property
    def edge_count(self) -> int:
        return self.weights.shape[1]

    @property
    def incidence(self) -> np.ndarray:
        """0/1 pattern R with R[i, j] = 1 iff W[i, j] > 0."""
        return (self.weights > 0).astype(np.int8)

    def with_weights(self, weights) -> "Hypergraph":
        return Hypergraph(weights, self.node_labels, self.edge_labels)

    def __eq__(self, other):
        if not isinstance(other, Hypergraph) or type(other) is not type(self):
            return NotImplemented
        return (
            self.weights.shape == other.weights.shape
            and np.array_equal(self.weights, other.weights)
            and self.node_labels == other.node_labels
            and self.edge_labels == other.edge_labels
        )

    __hash__ = None


@dataclass(frozen=True, eq=False)
class DirectedHypergraph:
    """Hypergraph with separate node->edge (``base.weights``) and
    edge->node (``z``) weights. Inputs of edge j are the rows where
    ``W[:, j] > 0``; outputs are the rows where ``Z[:, j] > 0``."""

    base: Hypergraph
    z: np.ndarray

    def __init__(self, base: Hypergraph, z):
        z = _frozen(z)
        if z.shape != base.weights.shape:
            raise ValueError(
                f"Z has shape {z.shape}, W has shape {base.weights.shape}"
            )
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "z", z)

    @property
    def weights(self):
        return self.base.weights

    @property
    def node_count(self):
        return self.base.node_count

    @property
    def edge_count(self):
        return self.base.edge_count

    @property
    def node_labels(self):
        return self.base.node_labels

    @property
    def edge_labels(self):
        return self.base.edge_labels

    def inputs(self, j):
        return np.flatnonzero(self.base.weights[:, j] > 0)

    def outputs(self, j):
        return np.flatnonzero(self.z[:, j] > 0)

    def __eq__(self, other):
        if not isinstance(other, DirectedHypergraph):
            return NotImplemented
        return self.base == other.base and np.array_equal(self.z, other.z)

    __hash__ = None


@dataclass(frozen=True, eq=False)
class Graph:
    """Weighted undirected graph given by a symmetric adjacency matrix."""

    adjacency: np.ndarray
    node_labels: tuple = ()

    def __init__(self, adjacency, node_labels=None):
        a = _frozen(adjacency)
        if a.shape[0] != a.shape[1]:
            raise ValueError(f"adjacency must be square, got {a.shape}")
        object.__setattr__(self, "adjacency", a)
        object.__setattr__(self, "node_labels", _labels(node_labels, a.shape[0], "n"))

    @property
    def node_count(self) -> int:
        return self.adjacency.shape[0]

    def links(self):
        """Upper-triangle (i, j, w) triples with w > 0 and i <= j (the
        diagonal holds self-loops, e.g. from a projection)."""
        iu, ju = np.nonzero(np.triu(self.adjacency))
        return [(int(i), int(j), float(self.adjacency[i, j])) for i, j in zip(iu, ju)]

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            np.array_equal(self.adjacency, other.adjacency)
            and self.node_labels == other.node_labels
        )

    __hash__ = None


@dataclass(frozen=True)
class ProjectedGraph:
    adjacency: np.ndarray
    origin: object = field(repr=False, compare=False)
    directed: bool = False


@dataclass(frozen=True)
class BipartiteGraph:
    biadjacency: np.ndarray
    left_labels: tuple
    right_labels: tuple

    @property
    def left_count(self):
        return self.biadjacency.shape[0]

    @property
    def right_count(self):
        return self.biadjacency.shape[1]

    def links(self):
        """1-based (node, edge) pairs with nonzero weight."""
        rows, cols = np.nonzero(self.biadjacency)
        return [(int(i) + 1, int(j) + 1) for i, j in zip(rows, cols)]


@dataclass
class ValidationReport:
    valid: bool
    errors: list = field(default_factory=list)
    warnings: list = field(default_factory=list)
    empty_edges: list = field(default_factory=list)
    isolated_nodes: list = field(default_factory=list)

    def __bool__(self):
        return self.valid


def validate(h) -> ValidationReport:
    """Report range violations, empty hyperedges and isolated nodes.

    Out-of-range or non-finite weights make the hypergraph invalid; empty
    edges and isolated nodes are legal and only produce warnings.
    """
    report = ValidationReport(valid=True)
    mats = [("W", h.weights)]
    if isinstance(h, DirectedHypergraph):
        mats.append(("Z", h.z))
    for name, m in mats:
        bad = ~np.isfinite(m)
        if bad.any():
            i, j = np.argwhere(bad)[0]
            report.errors.append(f"{name}[{i},{j}] is not finite")
        out = np.isfinite(m) & ((m < 0) | (m > 1))
        if out.any():
            i, j = np.argwhere(out)[0]
            report.errors.append(
                f"{name}[{i},{j}] = {m[i, j]!r}: weight out of [0,1]"
                f" ({int(out.sum())} entries)"
            )
    w = h.weights
    support = w != 0
    if isinstance(h, DirectedHypergraph):
        support = support | (h.z != 0)
    report.empty_edges = [int(j) for j in np.flatnonzero(~support.any(axis=0))]
    report.isolated_nodes = [int(i) for i in np.flatnonzero(~support.any(axis=1))]
    for j in report.empty_edges:
        report.warnings.append(f"empty edge {h.edge_labels[j]}")
    for i in report.isolated_nodes:
        report.warnings.append(f"isolated node {h.node_labels[i]}")
    report.valid = not report.errors
    return report


def project(h: Hypergraph) -> ProjectedGraph:
    """Node-node graph A = W W^T; the diagonal keeps sum_j W_ij^2."""
    w = h.weights
    a = w @ w.T
    # W W^T is symmetric in exact arithmetic; BLAS may differ in the last bit.
    a = np.triu(a) + np.triu(a, 1).T
    return ProjectedGraph(adjacency=a, origin=h, directed=False)


def project_directed(dh: DirectedHypergraph) -> ProjectedGraph:
    w, z = dh.base.weights, dh.z
    if w.shape != z.shape:
        raise ValueError(f"W {w.shape} and Z {z.shape} differ in shape")
    return ProjectedGraph(adjacency=w @ z.T, origin=dh, directed=True)


def to_bipartite(h: Hypergraph) -> BipartiteGraph:
    return BipartiteGraph(
        biadjacency=h.weights, left_labels=h.node_labels, right_labels=h.edge_labels
    )


def from_bipartite(b: BipartiteGraph) -> Hypergraph:
    return Hypergraph(b.biadjacency, b.left_labels, b.right_labels)


def node_degrees(h, weighted=False) -> np.ndarray:
    """Number of hyperedges containing each node, or row sums of W."""
    w = h.weights
    if weighted:
        return w @ np.ones(w.shape[1])
    return np.count_nonzero(w, axis=1).astype(np.float64)


def edge_degrees(h, weighted=False) -> np.ndarray:
    """Number of member nodes per hyperedge, or column sums of W."""
    w = h.weights
    if weighted:
        return w.T @ np.ones(w.shape[0])
    return np.count_nonzero(w, axis=0).astype(np.float64)


# ---------------------------------------------------------------------------
# JSON documents
#
#   hypergraph: {"nodes": [...], "edges": [{"id", "members": [{"node", "w"}],
#                "out_members": [{"node", "z"}]}]}
#   graph:      {"kind": "graph", "nodes": [...],
#                "links": [{"source", "target", "w"}]}


def _weight(value, where):
    if isinstance(value, bool) or value is None:
        raise HypergraphParseError(f"weight must be a number, got {value!r}", where)
    try:
        x = float(value)
    except (TypeError, ValueError):
        raise HypergraphParseError(f"weight must be a number, got {value!r}", where)
    if not math.isfinite(x):
        raise HypergraphParseError(f"weight {value!r} is not finite", where)
    if x < 0 or x > 1:
        raise HypergraphParseError(f"weight {value!r} out of [0,1]", where)
    return x


def _link_weight(value, where):
    # graph links may carry projected weights above 1
    if isinstance(value, bool) or value is None:
        raise HypergraphParseError(f"weight must be a number, got {value!r}", where)
    try:
        x = float(value)
    except (TypeError, ValueError):
        raise HypergraphParseError(f"weight must be a number, got {value!r}", where)
    if not math.isfinite(x) or x < 0:
        raise HypergraphParseError(f"weight {value!r} must be finite and >= 0", where)
    return x


def _node_index(doc):
    nodes = doc.get("nodes")
    if not isinstance(nodes, list):
        raise HypergraphParseError("missing list", "nodes")
    labels = [str(x) for x in nodes]
    index = {}
    for k, lab in enumerate(labels):
        if lab in index:
            raise HypergraphParseError(f"duplicate node {lab!r}", f"nodes[{k}]")
        index[lab] = k
    if not labels:
        raise HypergraphParseError("a hypergraph needs at least one node", "nodes")
    return labels, index


def _members(entries, index, key, where, out):
    if not isinstance(entries, list):
        raise HypergraphParseError("expected a list", where)
    seen = set()
    for k, m in enumerate(entries):
        loc = f"{where}[{k}]"
        if not isinstance(m, dict) or "node" not in m:
            raise HypergraphParseError("expected {'node': ..., " f"'{key}': ...}}", loc)
        node = str(m["node"])
        if node not in index:
            raise HypergraphParseError(f"unknown node {node!r}", loc + ".node")
        if node in seen:
            raise HypergraphParseError(f"node {node!r} listed twice", loc + ".node")
        seen.add(node)
        if key not in m:
            raise HypergraphParseError(f"missing '{key}'", loc)
        out[index[node]] = _weight(m[key], f"{loc}.{key}")


def from_document(doc):
    """Build a Hypergraph, DirectedHypergraph or Graph from a parsed document."""
    if not isinstance(doc, dict):
        raise HypergraphParseError("top level must be an object", "$")
    labels, index = _node_index(doc)
    n = len(labels)
    if doc.get("kind") == "graph":
        links = doc.get("links", [])
        if not isinstance(links, list):
            raise HypergraphParseError("expected a list", "links")
        a = np.zeros((n, n))
        for k, link in enumerate(links):
            loc = f"links[{k}]"
            if not isinstance(link, dict):
                raise HypergraphParseError("expected an object", loc)
            ends = []
            for end in ("source", "target"):
                lab = str(link.get(end))
                if lab not in index:
                    raise HypergraphParseError(f"unknown node {lab!r}", f"{loc}.{end}")
                ends.append(index[lab])
            i, j = ends
            w = _link_weight(link.get("w", 1.0), f"{loc}.w")
            a[i, j] = a[j, i] = w
        return Graph(a, labels)

    edges = doc.get("edges")
    if not isinstance(edges, list):
        raise HypergraphParseError("missing list", "edges")
    m = len(edges)
    w = np.zeros((n, m))
    z = np.zeros((n, m))
    directed = False
    edge_labels = []
    for j, e in enumerate(edges):
        loc = f"edges[{j}]"
        if not isinstance(e, dict):
            raise HypergraphParseError("expected an object", loc)
        edge_labels.append(str(e.get("id", f"e{j + 1}")))
        col = {}
        _members(e.get("members", []), index, "w", f"{loc}.members", col)
        for i, x in col.items():
            w[i, j] = x
        if "out_members" in e:
            directed = True
            col = {}
            _members(e["out_members"], index, "z", f"{loc}.out_members", col)
            for i, x in col.items():
                z[i, j] = x
    if len(set(edge_labels)) != m:
        raise HypergraphParseError("edge ids must be unique", "edges")
    base = Hypergraph(w, labels, edge_labels)
    return DirectedHypergraph(base, z) if directed else base


def to_document(h) -> dict:
    if isinstance(h, Graph):
        return {
            "kind": "graph",
            "nodes": list(h.node_labels),
            "links": [
                {"source": h.node_labels[i], "target": h.node_labels[j], "w": w}
                for i, j, w in h.links()
            ],
        }
    base = h.base if isinstance(h, DirectedHypergraph) else h
    w = base.weights
    edges = []
    for j, eid in enumerate(base.edge_labels):
        rows = np.flatnonzero(w[:, j])
        e = {
            "id": eid,
            "members": [
                {"node": base.node_labels[i], "w": float(w[i, j])} for i in rows
            ],
        }
        if isinstance(h, DirectedHypergraph):
            out = np.flatnonzero(h.z[:, j])
            e["out_members"] = [
                {"node": base.node_labels[i], "z": float(h.z[i, j])} for i in out
            ]
        edges.append(e)
    return {"nodes": list(base.node_labels), "edges": edges}


def loads(text: str):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise HypergraphParseError(exc.msg, f"line {exc.lineno} column {exc.colno}")
    return from_document(doc)


def dumps(h) -> str:
    return json.dumps(to_document(h), indent=1, ensure_ascii=False) + "\n"


def load(path):
    """Read a hypergraph (or graph) JSON document."""
    text = Path(path).read_text(encoding="utf-8")
    return loads(text)


def save(h, path) -> None:
    Path(path).write_text(dumps(h), encoding="utf-8")


def export_csv(h, path) -> None:
    """Write nonzero entries of W as ``node,edge,weight`` rows."""
    w = h.weights
    with open(path, "w", newline="", encoding="utf-8") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(["node", "edge", "weight"])
        for i, j in zip(*np.nonzero(w)):
            out.writerow([h.node_labels[i], h.edge_labels[j], f"{w[i, j]:.12g}"])


def import_csv(path, nodes: Optional[Sequence[str]] = None) -> Hypergraph:
    """Inverse of :func:`export_csv`. Node/edge order follows first appearance
    unless ``nodes`` fixes the node order (needed to keep isolated nodes)."""
    node_ix = {}
    edge_ix = {}
    if nodes is not None:
        for k, lab in enumerate(nodes):
            node_ix[str(lab)] = k
    entries = []
    with open(path, newline="", encoding="utf-8") as fh:
        rows = csv.reader(fh)
        header = next(rows, None)
        if header != ["node", "edge", "weight"]:
            raise HypergraphParseError(f"bad header {header!r}", "line 1")
        for lineno, row in enumerate(rows, start=2):
            if len(row) != 3:
                raise HypergraphParseError("expected 3 fields", f"line {lineno}")
            node, edge, raw = row
            w = _weight(raw, f"line {lineno} field weight")
            if node not in node_ix:
                if nodes is not None:
                    raise HypergraphParseError(f"unknown node {node!r}", f"line {lineno}")
                node_ix[node] = len(node_ix)
            edge_ix.setdefault(edge, len(edge_ix))
            entries.append((node_ix[node], edge_ix[edge], w))
    mat = np.zeros((len(node_ix), len(edge_ix)))
    for i, j, w in entries:
        mat[i, j] = w
    return Hypergraph(mat, list(node_ix), list(edge_ix))
