"""Weighted measurement graphs, their Laplacians and spectral gaps."""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .linalg import as_hermitian, second_smallest_eigenvalue

__all__ = [
    "DegenerateGraphError",
    "DisconnectedGraphError",
    "GraphError",
    "LaplacianBundle",
    "WeightedGraph",
    "banded_graph",
    "banded_mask",
    "data_laplacian",
    "laplacians",
]

CONNECTIVITY_RTOL = 1e-10
UNIMODULAR_TOL = 1e-12


class GraphError(ValueError):
    pass


class DegenerateGraphError(GraphError):
    """A vertex has zero degree."""


class DisconnectedGraphError(GraphError):
    """The spectral gap vanishes, so every bound is vacuous."""


@dataclass(frozen=True, eq=False)
class WeightedGraph:
    """Undirected graph on ``d`` vertices given by its weight matrix.

    The edge set is the support of ``weights``. Vertices are 0-based.
    """

    weights: np.ndarray

    def __post_init__(self):
        w = np.array(self.weights, dtype=float)
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise GraphError(f"weight matrix must be square, got {w.shape}")
        if np.any(w < 0) or not np.all(np.isfinite(w)):
            raise GraphError("weights must be finite and nonnegative")
        if np.any(w != w.T):
            raise GraphError("weight matrix must be symmetric")
        if np.any(np.diag(w) != 0):
            raise GraphError("weight matrix must have a zero diagonal")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @property
    def d(self) -> int:
        return self.weights.shape[0]

    @cached_property
    def adjacency(self) -> np.ndarray:
        a = (self.weights > 0).astype(float)
        a.setflags(write=False)
        return a

    @cached_property
    def degrees(self) -> np.ndarray:
        deg = self.weights.sum(axis=1)
        deg.setflags(write=False)
        return deg

    @cached_property
    def edges(self) -> tuple[np.ndarray, np.ndarray]:
        """Row and column indices of the unordered edges, ``row > col``."""
        rows, cols = np.nonzero(np.tril(self.adjacency, -1))
        rows.setflags(write=False)
        cols.setflags(write=False)
        return rows, cols

    @property
    def n_edges(self) -> int:
        return int(np.count_nonzero(self.adjacency)) // 2

    @property
    def is_unweighted(self) -> bool:
        return bool(np.all(self.weights == self.adjacency))

    def with_weights(self, weights) -> "WeightedGraph":
        """Same vertex set, new weights masked to this graph's edges."""
        return WeightedGraph(np.asarray(weights, dtype=float) * self.adjacency)


def banded_mask(d: int, delta: int) -> np.ndarray:
    """Indicator of the cyclic band ``0 < |l-j| < delta or |l-j| > d-delta``."""
    idx = np.arange(d)
    gap = np.abs(idx[:, None] - idx[None, :])
    return ((gap < delta) | (gap > d - delta)) & (gap > 0)


def banded_graph(d: int, delta: int, weights=None) -> WeightedGraph:
    """Graph whose edges are the ``2*delta - 1`` central cyclic diagonals.

    ``weights``, when given, are masked to the band; otherwise every edge
    has weight one.
    """
    if d < 1:
        raise GraphError("need at least one vertex")
    if not 1 <= delta <= (d + 1) // 2:
        raise GraphError(f"delta={delta} outside [1, {(d + 1) // 2}] for d={d}")
    mask = banded_mask(d, delta)
    if weights is None:
        return WeightedGraph(mask.astype(float))
    weights = np.asarray(weights, dtype=float)
    if weights.shape != (d, d):
        raise GraphError(f"weights must have shape {(d, d)}")
    return WeightedGraph(np.where(mask, weights, 0.0))


@dataclass(frozen=True, eq=False)
class LaplacianBundle:
    """Combinatorial and normalized Laplacians with their spectral gaps."""

    L_G: np.ndarray
    L_N: np.ndarray
    degrees: np.ndarray
    tau_G: float
    tau_N: float

    @property
    def min_degree(self) -> float:
        return float(self.degrees.min())

    @property
    def max_degree(self) -> float:
        return float(self.degrees.max())


def laplacians(g: WeightedGraph, *, seed: int = 0) -> LaplacianBundle:
    """Build ``L_G = D - W`` and ``L_N = D^-1/2 L_G D^-1/2`` and their gaps.

    Raises :class:`DegenerateGraphError` for isolated vertices and
    :class:`DisconnectedGraphError` when either gap falls below
    ``1e-10 * max degree``.
    """
    deg = g.degrees
    if g.d < 2 or np.any(deg <= 0):
        raise DegenerateGraphError("graph has an isolated vertex")
    lg = as_hermitian(np.diag(deg) - g.weights, check=False).real.copy()
    inv_sqrt = 1.0 / np.sqrt(deg)
    ln = inv_sqrt[:, None] * lg * inv_sqrt[None, :]
    ln = 0.5 * (ln + ln.T)
    for m in (lg, ln):
        m.setflags(write=False)

    threshold = CONNECTIVITY_RTOL * float(deg.max())
    tau_g = second_smallest_eigenvalue(lg, np.ones(g.d), seed=seed)
    if tau_g <= threshold:
        raise DisconnectedGraphError(f"spectral gap {tau_g:.3e} vanishes; graph is disconnected")
    tau_n = second_smallest_eigenvalue(ln, np.sqrt(deg), seed=seed)
    if tau_n <= CONNECTIVITY_RTOL:
        raise DisconnectedGraphError(f"normalized gap {tau_n:.3e} vanishes")
    return LaplacianBundle(lg, ln, deg, float(tau_g), float(tau_n))


def data_laplacian(g: WeightedGraph, phases) -> np.ndarray:
    """``D - W o phases`` for a Hermitian phase matrix unimodular on the edges.

    Only edge entries are read. The lower triangle defines the result and
    the upper triangle is its conjugate, so the output is exactly Hermitian.
    """
    phases = np.asarray(phases)
    if phases.shape != g.weights.shape:
        raise GraphError("phase matrix shape does not match the graph")
    rows, cols = g.edges
    lower = phases[rows, cols].astype(complex)
    upper = phases[cols, rows].astype(complex)
    if np.any(np.abs(np.abs(np.concatenate([lower, upper])) - 1.0) > UNIMODULAR_TOL):
        raise GraphError("phases must have unit modulus on the edge set")
    if np.any(np.abs(lower - upper.conj()) > UNIMODULAR_TOL):
        raise GraphError("phase matrix must be Hermitian on the edge set")
    off = g.weights[rows, cols] * lower
    lap = np.zeros(g.weights.shape, dtype=complex)
    lap[rows, cols] = -off
    lap[cols, rows] = -off.conj()
    lap[np.diag_indices(g.d)] = g.degrees
    lap.setflags(write=False)
    return lap
