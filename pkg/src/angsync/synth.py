"""Synthetic ground truth, angular-noise measurements and weight schemes."""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .graph import DisconnectedGraphError, WeightedGraph, laplacians
from .linalg import entrywise_sgn

__all__ = [
    "GroundTruth",
    "MeasurementSet",
    "WeightScheme",
    "apply_angular_noise",
    "build_weights",
    "random_signal",
    "sqrt_weights",
]


class WeightScheme(str, enum.Enum):
    UNIT = "unit"
    AMPLITUDE = "amplitude"
    SQUARED_AMPLITUDE = "squared"

    @classmethod
    def parse(cls, value) -> "WeightScheme":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower()
        aliases = {"unweighted": "unit", "amp": "amplitude", "squared_amplitude": "squared"}
        return cls(aliases.get(key, key))


@dataclass(frozen=True, eq=False)
class GroundTruth:
    y: np.ndarray
    x: np.ndarray

    @property
    def d(self) -> int:
        return self.y.shape[0]

    @property
    def phases(self) -> np.ndarray:
        return np.angle(self.x)


def random_signal(d: int, seed: int) -> GroundTruth:
    """Complex Gaussian signal ``y = a + ib`` with ``a, b`` i.i.d. N(0, 1)."""
    if d < 2:
        raise ValueError("signal dimension must be at least 2")
    rng = np.random.default_rng(seed)
    y = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    while np.any(y == 0):
        zero = y == 0
        y[zero] = rng.standard_normal(zero.sum()) + 1j * rng.standard_normal(zero.sum())
    x = entrywise_sgn(y)
    for arr in (y, x):
        arr.setflags(write=False)
    return GroundTruth(y, x)


@dataclass(frozen=True, eq=False)
class MeasurementSet:
    """Clean and noisy pairwise data on one edge set.

    ``X`` and ``Xhat`` vanish off the edges and on the diagonal. ``Y`` keeps
    the diagonal ``|y_l|^2`` while ``Yhat = M o Xhat`` does not, so
    comparisons of the two use the off-diagonal part only.
    """

    truth: GroundTruth
    graph: WeightedGraph
    X: np.ndarray
    Xhat: np.ndarray
    Y: np.ndarray
    Yhat: np.ndarray
    M: np.ndarray
    alpha: float

    @property
    def d(self) -> int:
        return self.X.shape[0]

    @property
    def noise(self) -> np.ndarray:
        """Unimodular ``N`` with ``Xhat = X o N`` on the edges, 0 elsewhere."""
        return self.Xhat * self.X.conj()


def apply_angular_noise(
    gt: GroundTruth,
    edges: WeightedGraph,
    alpha_deg: float,
    seed: int,
    *,
    magnitude_eps: float = 0.0,
) -> MeasurementSet:
    """Perturb every measured phase difference by ``eta ~ U[-alpha, alpha]``.

    One draw per unordered edge, mirrored conjugately. Magnitudes are exact
    unless ``magnitude_eps > 0``, in which case each off-diagonal ``M`` entry
    is scaled by an independent ``U[1 - eps, 1 + eps]`` factor.
    """
    if alpha_deg < 0:
        raise ValueError("noise level must be nonnegative")
    if not 0 <= magnitude_eps < 1:
        raise ValueError("magnitude_eps must lie in [0, 1)")
    d = gt.d
    if edges.d != d:
        raise ValueError("graph and signal dimensions differ")
    alpha = float(np.deg2rad(alpha_deg))
    rng = np.random.default_rng(seed)
    rows, cols = edges.edges

    eta = rng.uniform(-alpha, alpha, size=rows.size) if alpha > 0 else np.zeros(rows.size)
    x, y = gt.x, gt.y

    def mirrored(lower, diag=None):
        # fill one triangle and mirror it so the result is exactly Hermitian
        out = np.zeros((d, d), dtype=lower.dtype)
        out[rows, cols] = lower
        out[cols, rows] = lower.conj()
        if diag is not None:
            out[np.diag_indices(d)] = diag
        return out

    x_low = x[rows] * x[cols].conj()
    X = mirrored(x_low)
    Xhat = mirrored(x_low * np.exp(1j * eta))
    y_low = y[rows] * y[cols].conj()
    Y = mirrored(y_low, np.abs(y) ** 2)
    m_low = np.abs(y_low)
    if magnitude_eps > 0:
        m_low = m_low * rng.uniform(1 - magnitude_eps, 1 + magnitude_eps, size=rows.size)
    M = mirrored(m_low, np.abs(y) ** 2)
    Yhat = M * Xhat
    for arr in (X, Xhat, Y, Yhat, M):
        arr.setflags(write=False)
    return MeasurementSet(gt, edges, X, Xhat, Y, Yhat, M, alpha)


def build_weights(ms: MeasurementSet, scheme) -> WeightedGraph:
    """Weights on the measured edges according to ``scheme``.

    Edges whose measured magnitude is zero are dropped under the amplitude
    schemes; dropping them must not disconnect the graph.
    """
    scheme = WeightScheme.parse(scheme)
    adj = ms.graph.adjacency
    if scheme is WeightScheme.UNIT:
        return WeightedGraph(adj.copy())
    mag = np.abs(ms.Yhat) * adj
    np.fill_diagonal(mag, 0.0)
    w = mag if scheme is WeightScheme.AMPLITUDE else mag**2
    w = 0.5 * (w + w.T)
    g = WeightedGraph(w)
    if g.n_edges < ms.graph.n_edges:
        try:
            laplacians(g)
        except DisconnectedGraphError:
            raise
        except ValueError as exc:
            raise DisconnectedGraphError(str(exc)) from exc
    return g


def sqrt_weights(g: WeightedGraph) -> np.ndarray:
    """Entrywise square root ``R`` of the weight matrix."""
    return np.sqrt(g.weights)
