"""
Learning on a weighted hypergraph: delta-rule rewards, punishment,
hyperedge fitness and scores for growing hyperedges.

All functional updates return a new :class:`~hypercen.hypercore.Hypergraph`
and leave every other weight bit-identical. The ``*_inplace`` variants
act on a writable weight array and are what the functional forms call, so
both always agree.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from .centrality import resolvent_apply
from .errors import MembershipError
from .hypercore import Hypergraph

__all__ = [
    "LearningConfig",
    "FitnessEntry",
    "Proposal",
    "contraction",
    "relaxation",
    "delta_update",
    "delta_update_inplace",
    "punish",
    "punish_inplace",
    "edge_fitness",
    "fitness_report",
    "node_to_edge_scores",
    "node_to_node_scores",
    "ranking_scores",
    "propose_hyperedge",
    "learn_demo",
    "CHALLENGE_DIM",
]

CHALLENGE_DIM = 4
EPS_FITNESS = 1e-6


@dataclass(frozen=True)
class LearningConfig:
    rate: float = 0.1
    punishment: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.rate) and math.isfinite(self.punishment)):
            raise ValueError("rate and punishment must be finite")
        if self.rate < 0 or self.punishment < 0:
            raise ValueError("rate and punishment must be non-negative")


@dataclass(frozen=True)
class FitnessEntry:
    fitness: float
    mutation_rate: float
    samples: int


@dataclass(frozen=True)
class Proposal:
    members: list
    scores: list
    short_list: bool


def contraction(kappa=0.5) -> Callable[[np.ndarray], np.ndarray]:
    """Default processing function ``c -> kappa * c``."""

    def f(c):
        return kappa * np.asarray(c, dtype=np.float64)

    return f


_default_processor = contraction(0.5)


def relaxation(challenge, f_a=None) -> float:
    """``||c|| - ||f_a(c)||``: how much the processor relaxed the challenge."""
    c = np.asarray(challenge, dtype=np.float64)
    if not np.all(np.isfinite(c)):
        raise ValueError("challenge has non-finite entries")
    out = (f_a or _default_processor)(c)
    if np.shape(out) != c.shape:
        raise ValueError("processing function changed the challenge dimension")
    return float(np.linalg.norm(c) - np.linalg.norm(out))


def _require_member(w, i, j):
    if not w[i, j] > 0:
        raise MembershipError(f"node {i} is not a member of edge {j}")


def _clamp_set(w, i, j, value):
    clamped = value > 1.0 or value < 0.0
    w[i, j] = min(1.0, max(0.0, value))
    return clamped


def delta_update_inplace(w: np.ndarray, i, j, challenge, f_a=None,
                         config: LearningConfig = LearningConfig()) -> bool:
    """``W[i, j] += rate * (||c|| - ||f_a(c)||)`` clamped to [0, 1].

    Returns True when the clamp was hit.
    """
    _require_member(w, i, j)
    gain = relaxation(challenge, f_a)
    if config.rate == 0:
        return False
    return _clamp_set(w, i, j, w[i, j] + config.rate * gain)


def delta_update(h: Hypergraph, i, j, challenge, f_a=None,
                 config: LearningConfig = LearningConfig()):
    """Functional delta rule. Returns ``(new_hypergraph, clamped)``."""
    w = h.weights.copy()
    clamped = delta_update_inplace(w, i, j, challenge, f_a, config)
    return h.with_weights(w), clamped


def punish_inplace(w: np.ndarray, i, j, config: LearningConfig) -> bool:
    _require_member(w, i, j)
    if config.punishment == 0:
        return False
    return _clamp_set(w, i, j, w[i, j] - config.punishment)


def punish(h: Hypergraph, i, j, config: LearningConfig):
    """``W[i, j] -= p`` floored at 0; a zero weight drops the node from the
    edge. Returns ``(new_hypergraph, clamped)``."""
    w = h.weights.copy()
    clamped = punish_inplace(w, i, j, config)
    return h.with_weights(w), clamped


def edge_fitness(h: Hypergraph, j, processed: Iterable, constant=1.0) -> FitnessEntry:
    """Fitness of hyperedge ``j`` and its mutation rate.

    ``processed`` holds ``(challenge, relaxed_challenge)`` pairs. Fitness is
    the summed norm reduction divided by the number of members; the
    mutation rate is ``constant / max(fitness, 1e-6)`` capped at
    ``1e6 * constant``.
    """
    size = int(np.count_nonzero(h.weights[:, j]))
    if size == 0:
        raise MembershipError(f"edge {j} is empty")
    gains = [
        float(np.linalg.norm(np.asarray(c, float)) - np.linalg.norm(np.asarray(r, float)))
        for c, r in processed
    ]
    # fsum is exactly rounded, hence independent of list order
    fit = math.fsum(gains) / size
    cap = 1e6 * constant
    rate = min(cap, constant / max(fit, EPS_FITNESS))
    return FitnessEntry(fitness=fit, mutation_rate=rate, samples=len(gains))


def fitness_report(h: Hypergraph, processed_by_edge: dict, constant=1.0) -> dict:
    return {
        j: edge_fitness(h, j, processed_by_edge.get(j, ()), constant)
        for j in range(h.edge_count)
        if np.any(h.weights[:, j])
    }


def _ww(w):
    m = w @ w.T
    return np.triu(m) + np.triu(m, 1).T


def node_to_edge_scores(h: Hypergraph, beta1=1.0, beta2=0.5, *, method="solve",
                        one_step=False, exclude_members=False) -> np.ndarray:
    """Chance of communication from each node to each hyperedge.

    Full form ``(I - b1 b2 W W^T)^-1 W``; ``one_step`` gives
    ``b1 b2 W W^T W`` instead. ``exclude_members`` subtracts ``W`` so that
    current members do not score for their own edges (the result can be
    negative; see :func:`ranking_scores`).
    """
    w = h.weights
    b = beta1 * beta2
    if one_step:
        scores = b * (_ww(w) @ w)
    else:
        scores, _ = resolvent_apply(_ww(w), b, w, method)
    if exclude_members:
        scores = scores - w
    return scores


def node_to_node_scores(h: Hypergraph, beta1=1.0, beta2=0.5, *, method="solve",
                        closest_only=False, exclude_linked=False) -> np.ndarray:
    """Node-to-node communication chances
    ``b1 (I - b1 b2 W W^T)^-1 W W^T`` (or ``b1^2 b2 (W W^T)^2`` with
    ``closest_only``). ``exclude_linked`` subtracts ``b1 W W^T``."""
    w = h.weights
    m = _ww(w)
    b = beta1 * beta2
    if closest_only:
        scores = (beta1 * beta1 * beta2) * (m @ m)
    else:
        sol, _ = resolvent_apply(m, b, m, method)
        scores = beta1 * sol
    if exclude_linked:
        scores = scores - beta1 * m
    return scores


def ranking_scores(scores) -> np.ndarray:
    """Negative scores count as zero when ranking candidates."""
    return np.maximum(scores, 0.0)


def propose_hyperedge(h: Hypergraph, seed_node, size, beta1=1.0, beta2=0.5, *,
                      exclude_linked=False, method="solve") -> Proposal:
    """Best ``size`` partners for a new hyperedge around ``seed_node``.

    The seed is treated as a one-node hyperedge and candidates are ranked
    by its row of :func:`node_to_node_scores`. Only nodes with a positive
    score qualify; ties go to the lower index. ``short_list`` is set when
    fewer than ``size`` candidates qualify.
    """
    if not 0 <= seed_node < h.node_count:
        raise IndexError(f"no node {seed_node}")
    if size < 1:
        raise ValueError("size must be >= 1")
    row = node_to_node_scores(h, beta1, beta2, exclude_linked=exclude_linked,
                              method=method)[seed_node]
    rank = ranking_scores(row)
    rank[seed_node] = 0.0
    order = np.argsort(-rank, kind="stable")
    picked = [int(k) for k in order if rank[k] > 0][:size]
    return Proposal(
        members=picked,
        scores=[float(row[k]) for k in picked],
        short_list=len(picked) < size,
    )


def learn_demo(h: Hypergraph, steps, config: LearningConfig, seed=0,
               select_probability=0.5, dim=CHALLENGE_DIM, f_a=None, log_path=None):
    """Random-challenge learning loop.

    Each step draws a uniformly random incident (node, edge) pair and a
    standard-normal challenge; with probability ``select_probability`` the
    node selects it (delta update), otherwise it is punished. Returns the
    final hypergraph and the list of per-step rows
    ``(step, node, edge, action, old, new, clamped)``.
    """
    rng = np.random.Generator(np.random.PCG64(seed))
    w = np.array(h.weights, dtype=np.float64)
    rows = []
    for step in range(steps):
        pairs = np.argwhere(w > 0)
        if pairs.size == 0:
            break
        i, j = (int(x) for x in pairs[rng.integers(len(pairs))])
        challenge = rng.standard_normal(dim)
        old = float(w[i, j])
        if rng.random() < select_probability:
            action = "select"
            clamped = delta_update_inplace(w, i, j, challenge, f_a, config)
        else:
            action = "punish"
            clamped = punish_inplace(w, i, j, config)
        rows.append((step, i, j, action, old, float(w[i, j]), clamped))
    out = h.with_weights(w)
    if log_path is not None:
        with open(log_path, "w", newline="", encoding="utf-8") as fh:
            wr = csv.writer(fh, lineterminator="\n")
            wr.writerow(["step", "node", "edge", "action", "old_weight", "new_weight",
                         "clamped"])
            for step, i, j, action, old, new, clamped in rows:
                wr.writerow([step, h.node_labels[i], h.edge_labels[j], action,
                             repr(old), repr(new), int(clamped)])
    return out, rows
