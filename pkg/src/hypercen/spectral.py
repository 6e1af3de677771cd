"""
Eigenvalue machinery for dense symmetric non-negative matrices.

The largest eigenvalue decides everything downstream: the resolvent
``(I - beta*A)^-1`` has poles at ``beta = 1/lambda`` and the Neumann series
converges only for ``|beta| < 1/lambda_max``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ZeroSpectrumError

__all__ = [
    "SpectralInfo",
    "PoleCheck",
    "EPS_POLE",
    "spectrum",
    "lambda_max",
    "perron_vector",
    "spectral_info",
    "is_pole",
    "is_symmetric",
]

log = logging.getLogger(__name__)

EPS_POLE = 1e-8
POWER_TOL = 1e-12
POWER_MAXITER = 10_000


@dataclass(frozen=True)
class SpectralInfo:
    lambda_max: float
    perron_vector: np.ndarray
    spectrum: Optional[np.ndarray] = None


@dataclass(frozen=True)
class PoleCheck:
    """Outcome of :func:`is_pole`.

    ``distance`` is ``min |beta - 1/lambda|`` over nonzero eigenvalues
    (``inf`` for a zero spectrum); ``nearest_lambda`` is the eigenvalue
    attaining it.
    """

    is_pole: bool
    distance: float
    nearest_lambda: float

    def __bool__(self):
        return self.is_pole


def is_symmetric(a, tol=0.0) -> bool:
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        return False
    if tol == 0.0:
        return bool(np.array_equal(a, a.T))
    return bool(np.allclose(a, a.T, rtol=0.0, atol=tol * max(1.0, np.abs(a).max(initial=0.0))))


def spectrum(a) -> np.ndarray:
    """All eigenvalues, ascending. Real for symmetric input, complex otherwise."""
    a = np.asarray(a, dtype=np.float64)
    if a.size == 0:
        return np.zeros(0)
    if is_symmetric(a, tol=1e-14):
        return np.linalg.eigvalsh(a)
    ev = np.linalg.eigvals(a)
    if np.all(ev.imag == 0):
        return np.sort(ev.real)
    return ev[np.lexsort((ev.imag, ev.real))]


def _power_iteration(a):
    """Shifted power iteration on A + sigma*I, start vector all ones.

    The shift sigma = ||A||_inf / 2 breaks the tie between +lambda_max and
    -lambda_max that bipartite supports produce. Returns (value, vector) or
    None when the iteration did not settle.
    """
    n = a.shape[0]
    sigma = 0.5 * np.abs(a).sum(axis=1).max()
    if sigma == 0.0:
        return None
    v = np.ones(n) / np.sqrt(n)
    for _ in range(POWER_MAXITER):
        w = a @ v + sigma * v
        nw = np.linalg.norm(w)
        if nw == 0.0:
            return None
        w /= nw
        # angle between successive iterates
        if np.linalg.norm(w - v) < POWER_TOL:
            v = w
            lam = float(v @ (a @ v))
            return lam, v
        v = w
    return None


def _sign_normalize(v):
    k = int(np.argmax(np.abs(v)))
    if v[k] < 0:
        v = -v
    return v


def _eigh_top(a):
    vals, vecs = np.linalg.eigh(a)
    return float(vals[-1]), vecs[:, -1].copy()


def _top_pair(a, method):
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    if a.shape[0] == 0:
        raise ZeroSpectrumError("empty matrix")
    if method == "eigh" or (a < 0).any():
        return _eigh_top(a)
    if method != "power":
        raise ValueError(f"unknown method {method!r}")
    res = _power_iteration(a)
    if res is not None:
        lam, v = res
        scale = max(np.abs(a).sum(axis=1).max(), 1e-300)
        if np.linalg.norm(a @ v - lam * v) <= 1e-10 * scale:
            return lam, v
    log.debug("power iteration did not settle; using full eigendecomposition")
    return _eigh_top(a)


def lambda_max(a, method="power") -> float:
    """Largest eigenvalue of a symmetric matrix.

    Power iteration is tried first (deterministic: all-ones start, 1e-12
    tolerance, 10 000 iterations) and checked against its own residual;
    anything that fails the check is recomputed by ``numpy.linalg.eigh``.
    """
    lam, _ = _top_pair(a, method)
    return lam


def perron_vector(a, method="power") -> np.ndarray:
    """Unit eigenvector of ``lambda_max``; the largest-magnitude entry is
    made positive, which for non-negative input gives a non-negative vector.

    Raises
    ------
    ZeroSpectrumError
        If every eigenvalue is zero (e.g. the zero matrix).
    """
    a = np.asarray(a, dtype=np.float64)
    if a.size and not np.any(a):
        raise ZeroSpectrumError("zero spectrum: matrix has no nonzero entries")
    lam, v = _top_pair(a, method)
    if lam <= 0 and np.max(np.abs(np.linalg.eigvalsh(a))) == 0:
        raise ZeroSpectrumError("zero spectrum")
    v = _sign_normalize(v / np.linalg.norm(v))
    if not (a < 0).any():
        # Perron vector of a non-negative matrix: clear round-off negatives
        v = np.where(np.abs(v) < 1e-15, 0.0, v)
    return v


def spectral_info(a, full=True) -> SpectralInfo:
    lam, _ = _top_pair(a, "power")
    return SpectralInfo(
        lambda_max=lam,
        perron_vector=perron_vector(a),
        spectrum=spectrum(a) if full else None,
    )


def is_pole(beta, a=None, *, eigenvalues=None, eps=EPS_POLE) -> PoleCheck:
    """Is ``I - beta*A`` singular?

    ``beta`` is a pole when ``|beta - 1/lambda| <= eps * (|beta| + 1/rho)``
    for some nonzero eigenvalue ``lambda``, where ``rho`` is the spectral
    radius. ``beta = 0`` is never a pole. Pass precomputed ``eigenvalues``
    to avoid a second decomposition.
    """
    beta = float(beta)
    ev = spectrum(a) if eigenvalues is None else np.asarray(eigenvalues)
    rho = float(np.max(np.abs(ev))) if ev.size else 0.0
    if rho == 0.0:
        return PoleCheck(False, float("inf"), 0.0)
    nz = ev[np.abs(ev) > rho * 1e-14]
    gaps = np.abs(beta - 1.0 / nz)
    k = int(np.argmin(gaps))
    dist = float(gaps[k])
    lam = nz[k]
    lam = float(lam.real) if np.iscomplexobj(nz) and lam.imag == 0 else lam
    hit = dist <= eps * (abs(beta) + 1.0 / rho)
    return PoleCheck(bool(hit), dist, lam if isinstance(lam, complex) else float(lam))
