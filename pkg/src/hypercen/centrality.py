"""
Eigenvector and general (Bonacich-style) centrality for graphs and
hypergraphs.

Graph centrality with attenuation ``beta`` and scale ``alpha``::

    c = alpha * (I - beta*A)^-1 A 1

Hypergraph node scores ``x`` and edge scores ``y`` solve the coupled system
``x = a1 W 1 + b1 W y`` and ``y = a2 W^T 1 + b2 W^T x``; eliminating ``y``::

    x = (I - b1*b2 W W^T)^-1 W (a1 1 + b1*a2 W^T 1)
    y = (I - b1*b2 W^T W)^-1 W^T (a2 1 + b2*a1 W 1)

Both go through one kernel, :func:`resolvent_apply`, which either solves the
linear system directly or sums the Neumann series ``sum_k (b M)^k rhs``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from . import spectral
from .errors import PoleError, SeriesDivergence, ZeroSpectrumError
from .hypercore import DirectedHypergraph

__all__ = [
    "GraphCentralityParams",
    "HyperCentralityParams",
    "CentralityResult",
    "BalanceReport",
    "NonCommunicativeWarning",
    "resolvent_apply",
    "eigencentrality_graph",
    "eigencentrality_hyper",
    "general_centrality_graph",
    "general_centrality_hyper",
    "neumann_partial_sums",
    "neumann_identity_residuals",
    "rescale_to_average",
    "expected_communication_length",
    "balance_report",
]

SERIES_TOL = 1e-12
SERIES_MAX_TERMS = 100_000


class NonCommunicativeWarning(UserWarning):
    """beta * lambda_max >= 1: the communication-count reading does not hold."""


@dataclass(frozen=True)
class GraphCentralityParams:
    alpha: float = 1.0
    beta: float = 0.5


@dataclass(frozen=True)
class HyperCentralityParams:
    alpha1: float = 1.0
    alpha2: float = 1.0
    beta1: float = 1.0
    beta2: float = 0.5

    @property
    def attenuation(self) -> float:
        return self.beta1 * self.beta2


@dataclass
class CentralityResult:
    """Scores plus how they were obtained.

    ``meta`` keys: ``lambda_max``, ``terms`` (series only), ``residual``,
    ``regime`` (``"communicative"`` or ``"non-communicative"``),
    ``probabilistic`` (the count reading is valid: 0 <= beta <= 1 and
    beta*lambda_max < 1), ``alpha``/``beta`` or the four hypergraph
    parameters, and for hypergraphs the split ``edge_term``/``node_term``.
    """

    node_scores: np.ndarray
    edge_scores: Optional[np.ndarray] = None
    method: str = "direct_solve"
    meta: dict = field(default_factory=dict)


@dataclass
class BalanceReport:
    degree: np.ndarray
    pos_sum: np.ndarray
    neg_sum: np.ndarray
    residual: np.ndarray
    beta: float

    @property
    def max_residual(self) -> float:
        return float(np.max(np.abs(self.residual), initial=0.0))


def _check_square(a):
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    return a


def _guard(b, m, eigenvalues=None):
    """Raise PoleError when ``b`` is a pole of ``m``; return the spectral radius."""
    ev = spectral.spectrum(m) if eigenvalues is None else eigenvalues
    chk = spectral.is_pole(b, eigenvalues=ev)
    if chk.is_pole:
        lam = chk.nearest_lambda
        raise PoleError(b, lam.real if isinstance(lam, complex) else lam)
    if ev.size == 0:
        return 0.0
    if np.iscomplexobj(ev):
        return float(np.max(np.abs(ev)))
    return float(max(ev[-1], -ev[0]))


def resolvent_apply(m, b, rhs, method="solve", *, eigenvalues=None,
                    tol=SERIES_TOL, max_terms=SERIES_MAX_TERMS):
    """Compute ``(I - b*M)^-1 rhs``.

    Returns ``(solution, info)`` where ``info`` has ``lambda_max`` (spectral
    radius of ``M``), ``terms`` and ``residual``. ``rhs`` may be a vector or
    a matrix (columns are solved together).

    ``method="series"`` requires symmetric ``M`` and ``|b| * lambda_max < 1``
    and stops once the newest term has infinity norm below ``tol``.
    """
    m = _check_square(m)
    rhs = np.asarray(rhs, dtype=np.float64)
    n = m.shape[0]
    rho = _guard(b, m, eigenvalues)
    info = {"lambda_max": rho, "terms": None}
    if method in ("solve", "direct_solve"):
        if b == 0:
            sol = rhs.copy()
        else:
            sol = np.linalg.solve(np.eye(n) - b * m, rhs)
    elif method in ("series", "neumann_series"):
        if not spectral.is_symmetric(m, tol=1e-14):
            raise SeriesDivergence(
                b, rho, "series mode is only supported for symmetric matrices"
            )
        if abs(b) * rho >= 1.0:
            raise SeriesDivergence(b, rho)
        term = rhs.copy()
        sol = rhs.copy()
        k = 0
        while k < max_terms:
            if b == 0 or np.max(np.abs(term), initial=0.0) < tol:
                break
            term = b * (m @ term)
            sol += term
            k += 1
        info["terms"] = k + 1
    else:
        raise ValueError(f"unknown method {method!r}")
    r = sol - b * (m @ sol) - rhs
    info["residual"] = float(np.max(np.abs(r), initial=0.0))
    return sol, info


def _regime(b, rho, meta):
    comm = abs(b) * rho < 1.0
    meta["regime"] = "communicative" if comm else "non-communicative"
    meta["probabilistic"] = bool(comm and 0.0 <= b <= 1.0)
    if not comm:
        warnings.warn(
            f"non-communicative regime: |beta|*lambda_max = {abs(b) * rho:.6g} >= 1; "
            "scores are not communication counts and may be negative",
            NonCommunicativeWarning,
            stacklevel=3,
        )


def _method_name(method):
    return "neumann_series" if method in ("series", "neumann_series") else "direct_solve"


def eigencentrality_graph(a) -> CentralityResult:
    """Perron vector of the adjacency matrix."""
    a = _check_square(a)
    e = spectral.perron_vector(a)
    lam = spectral.lambda_max(a)
    return CentralityResult(
        node_scores=e, method="eigenvector",
        meta={"lambda_max": lam, "residual": float(np.linalg.norm(a @ e - lam * e))},
    )


def eigencentrality_hyper(h) -> CentralityResult:
    """Node and edge eigenvector centrality.

    ``x`` is the Perron vector of ``W W^T`` and ``y`` is ``W^T x``
    normalised, so that ``c1 x = W y`` and ``c2 y = W^T x`` hold with
    ``c1 * c2 = lambda_max``.
    """
    w = h.weights
    if not np.any(w):
        raise ZeroSpectrumError("zero spectrum: W has no nonzero entries")
    m = w @ w.T
    m = np.triu(m) + np.triu(m, 1).T
    x = spectral.perron_vector(m)
    wx = w.T @ x
    c2 = float(np.linalg.norm(wx))
    y = wx / c2
    c1 = float(np.linalg.norm(w @ y))
    return CentralityResult(
        node_scores=x, edge_scores=y, method="eigenvector",
        meta={"lambda_max": c1 * c2, "c1": c1, "c2": c2},
    )


def general_centrality_graph(a, alpha=1.0, beta=0.5, method="solve",
                             *, eigenvalues=None) -> CentralityResult:
    """Bonacich centrality ``alpha (I - beta A)^-1 A 1``.

    ``beta = 0`` returns ``alpha * A 1`` (weighted degree) exactly. In solve
    mode any non-pole ``beta`` is accepted, including negative values and
    ``beta > 1/lambda_max`` (flagged with :class:`NonCommunicativeWarning`).

    Raises
    ------
    PoleError
        ``beta`` within the pole tolerance of ``1/lambda``.
    SeriesDivergence
        ``method="series"`` with ``|beta| * lambda_max >= 1``.
    """
    if isinstance(alpha, GraphCentralityParams):
        alpha, beta = alpha.alpha, alpha.beta
    a = _check_square(a)
    d = a @ np.ones(a.shape[0])
    u, info = resolvent_apply(a, beta, d, method, eigenvalues=eigenvalues)
    c = alpha * u
    meta = {"alpha": alpha, "beta": beta, **info}
    _regime(beta, info["lambda_max"], meta)
    return CentralityResult(node_scores=c, method=_method_name(method), meta=meta)


def general_centrality_hyper(h, alpha1=1.0, alpha2=1.0, beta1=1.0, beta2=0.5,
                             method="solve") -> CentralityResult:
    """Node scores ``x`` and edge scores ``y`` of a hypergraph.

    The node scores are also returned split as
    ``meta["edge_term"] = a1 sum_k (b1 b2 W W^T)^k W 1`` (communications
    ending at edges) and
    ``meta["node_term"] = a2 b1 sum_k (b1 b2)^k (W W^T)^(k+1) 1``
    (communications ending at nodes); they add up to ``x``.

    For a :class:`DirectedHypergraph` the edge-to-node matrix ``Z`` replaces
    ``W^T`` and only ``method="solve"`` is available.
    """
    if isinstance(alpha1, HyperCentralityParams):
        p = alpha1
        alpha1, alpha2, beta1, beta2 = p.alpha1, p.alpha2, p.beta1, p.beta2
    directed = isinstance(h, DirectedHypergraph)
    w = h.weights
    zt = h.z.T if directed else w.T
    n, m = w.shape
    b = beta1 * beta2
    if directed:
        if method not in ("solve", "direct_solve"):
            raise SeriesDivergence(
                b, float("nan"), "series mode is not available for directed hypergraphs"
            )
        nn = w @ zt
        ee = zt @ w
    else:
        nn = w @ zt
        nn = np.triu(nn) + np.triu(nn, 1).T
        ee = zt @ w
        ee = np.triu(ee) + np.triu(ee, 1).T
    ev = spectral.spectrum(nn)
    deg_n = w @ np.ones(m)
    # edge_term and node_term share the resolvent: solve both columns at once
    rhs = np.column_stack([deg_n, nn @ np.ones(n)])
    cols, info = resolvent_apply(nn, b, rhs, method, eigenvalues=ev)
    edge_term = alpha1 * cols[:, 0]
    node_term = (alpha2 * beta1) * cols[:, 1]
    x = edge_term + node_term
    y, yinfo = resolvent_apply(
        ee, b, zt @ (alpha2 * np.ones(n) + (beta2 * alpha1) * (w @ np.ones(m))),
        method, eigenvalues=spectral.spectrum(ee),
    )
    meta = {
        "alpha1": alpha1, "alpha2": alpha2, "beta1": beta1, "beta2": beta2,
        **info,
        "residual": max(info["residual"], yinfo["residual"]),
        "edge_term": edge_term,
        "node_term": node_term,
    }
    _regime(b, info["lambda_max"], meta)
    return CentralityResult(node_scores=x, edge_scores=y,
                            method=_method_name(method), meta=meta)


def neumann_partial_sums(a, c, k_max, v=None) -> np.ndarray:
    """Rows ``S_n v`` for ``n = 0..k_max`` with ``S_n = sum_{k<=n} (cA)^k``.

    No convergence check is made; divergence shows up as growing rows.
    """
    a = _check_square(a)
    n = a.shape[0]
    v = np.ones(n) if v is None else np.asarray(v, dtype=np.float64)
    out = np.empty((k_max + 1, n))
    term = v.copy()
    acc = v.copy()
    out[0] = acc
    for k in range(1, k_max + 1):
        term = c * (a @ term)
        acc = acc + term
        out[k] = acc
    return out


def neumann_identity_residuals(a, c, k_max, v=None) -> np.ndarray:
    """``||(I - cA) S_n v - (v - (cA)^(n+1) v)||_inf`` for each ``n``.

    The telescoping identity holds for every ``c``, convergent or not.
    """
    a = _check_square(a)
    n = a.shape[0]
    v = np.ones(n) if v is None else np.asarray(v, dtype=np.float64)
    sums = neumann_partial_sums(a, c, k_max, v)
    res = np.empty(k_max + 1)
    power = v.copy()
    for k in range(k_max + 1):
        power = c * (a @ power)
        lhs = sums[k] - c * (a @ sums[k])
        rhs = v - power
        scale = max(1.0, np.max(np.abs(sums[k])), np.max(np.abs(power)))
        res[k] = np.max(np.abs(lhs - rhs)) / scale
    return res


def rescale_to_average(result: CentralityResult) -> CentralityResult:
    """Scale so that ``sum_i c_i^2 = |V|``; a score of 1 is then average.

    Edge scores, when present, get the same factor (it is the common
    alpha of a hypergraph with ``alpha1 = alpha2``).
    """
    c = np.asarray(result.node_scores, dtype=np.float64)
    ss = float(np.dot(c, c))
    if ss == 0.0:
        raise ZeroSpectrumError("cannot rescale an all-zero score vector")
    s = math.sqrt(c.size / ss)
    if abs(s - 1.0) <= 4 * np.finfo(float).eps:
        s = 1.0
    edge = None if result.edge_scores is None else s * result.edge_scores
    meta = dict(result.meta)
    meta["scale"] = meta.get("scale", 1.0) * s
    return replace(result, node_scores=s * c, edge_scores=edge, meta=meta)


def expected_communication_length(beta) -> float:
    """Mean chain length ``1 + beta + beta^2 + ... = 1/(1 - beta)``."""
    beta = float(beta)
    if not 0.0 <= beta < 1.0:
        raise ValueError(f"need 0 <= beta < 1, got {beta}")
    return 1.0 / (1.0 - beta)


def balance_report(a, beta, result: CentralityResult) -> BalanceReport:
    """Split each score into degree, positive- and negative-neighbour parts.

    ``c_i = alpha d_i + beta * (pos_i + neg_i)`` where ``pos_i`` sums
    ``A_ij c_j`` over neighbours with ``c_j > 0`` and ``neg_i`` over
    ``c_j < 0``. ``residual`` is what is left over after reconstruction.
    """
    a = _check_square(a)
    c = np.asarray(result.node_scores, dtype=np.float64)
    if c.shape != (a.shape[0],):
        raise ValueError(
            f"result has {c.shape} scores for a {a.shape[0]}-node matrix (stale result?)"
        )
    alpha = result.meta.get("alpha", 1.0)
    d = a @ np.ones(a.shape[0])
    pos = a @ np.where(c > 0, c, 0.0)
    neg = a @ np.where(c < 0, c, 0.0)
    residual = alpha * d + beta * (pos + neg) - c
    return BalanceReport(degree=d, pos_sum=pos, neg_sum=neg,
                         residual=residual, beta=beta)
