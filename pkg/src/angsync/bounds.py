"""Gauge-invariant error metric, a-priori error bounds and the
intermediate inequalities behind them, evaluated on concrete instances.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields
from typing import Mapping, NamedTuple

import numpy as np

from .graph import WeightedGraph, laplacians
from .linalg import DimensionError, entrywise_sgn, spectral_norm
from .solvers import SdpResult, SolverResult, tightness_certificate
from .synth import MeasurementSet, WeightScheme, sqrt_weights

__all__ = [
    "BOUND_APPLICABILITY",
    "BoundReport",
    "InequalityCheck",
    "NoiseNorms",
    "check_proof_inequalities",
    "dominance_pairs",
    "eval_bounds",
    "noise_norms",
    "phase_distance",
]

# Relative and absolute slack for comparing evaluated inequalities; both
# sides are floating point sums of up to d^2 terms.
REL_SLACK = 1e-9
ABS_SLACK = 1e-12

_ALL = frozenset(WeightScheme)
BOUND_APPLICABILITY: dict[str, frozenset] = {
    "thm21": frozenset({WeightScheme.UNIT}),
    "thm22": frozenset({WeightScheme.UNIT}),
    "thm23A": _ALL,
    "thm23B": _ALL,
    "thm31_lsp": _ALL,
    "thm31_er": _ALL,
    "cor32": frozenset({WeightScheme.UNIT}),
    "cor33_lsp": frozenset({WeightScheme.AMPLITUDE}),
    "cor33_er": frozenset({WeightScheme.AMPLITUDE}),
    "cor34_lsp": frozenset({WeightScheme.SQUARED_AMPLITUDE}),
    "cor34_er": frozenset({WeightScheme.SQUARED_AMPLITUDE}),
    "naive": _ALL,
    "remark_rhs": _ALL,
}

# bound name -> distance field it guarantees
_GUARANTEES = {
    "thm21": "dist_er_normalized",
    "thm22": "dist_lsp",
    "thm23A": "dist_lsp",
    "thm23B": "dist_lsp",
    "thm31_lsp": "dist_lsp",
    "thm31_er": "dist_er",
    "cor32": "dist_er",
    "cor33_lsp": "dist_lsp",
    "cor33_er": "dist_er",
    "cor34_lsp": "dist_lsp",
    "cor34_er": "dist_er",
}


def phase_distance(a, b) -> float:
    """``min_theta ||a - e^{i theta} b||_2`` in closed form."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        raise DimensionError(f"vectors of shapes {a.shape} and {b.shape}")
    # the minimizer is theta = arg(b^* a); evaluating the residual there
    # avoids the cancellation in ||a||^2 + ||b||^2 - 2|b^* a|
    inner = np.vdot(b, a)
    rot = inner / abs(inner) if inner != 0 else 1.0
    return float(np.linalg.norm(a - rot * b))


class NoiseNorms(NamedTuple):
    fro_X: float
    fro_WX: float
    spec_WX: float
    fro_RX: float
    fro_Y: float


def noise_norms(g: WeightedGraph, ms: MeasurementSet) -> NoiseNorms:
    """Norms of the measurement error. Frobenius norms run over the full
    matrix, so each edge contributes in both orientations."""
    delta = ms.Xhat - ms.X
    w_delta = g.weights * delta
    y_delta = ms.Yhat - ms.Y
    np.fill_diagonal(y_delta, 0.0)
    return NoiseNorms(
        float(np.linalg.norm(delta)),
        float(np.linalg.norm(w_delta)),
        spectral_norm(0.5 * (w_delta + w_delta.conj().T)),
        float(np.linalg.norm(sqrt_weights(g) * delta)),
        float(np.linalg.norm(y_delta)),
    )


@dataclass
class BoundReport:
    """Errors, bound values and certificates for one instance.

    Bounds that do not apply to the weight scheme are ``None``.
    """

    scheme: WeightScheme
    d: int
    tau_G: float
    tau_N: float
    c_z: float
    sup_norm_z: float
    noise: NoiseNorms
    dist_er: float | None = None
    dist_er_normalized: float | None = None
    dist_lsp: float | None = None
    dist_sdp: float | None = None
    sdp_rank: int | None = None
    thm21: float | None = None
    thm22: float | None = None
    thm23A: float | None = None
    thm23B: float | None = None
    thm31_lsp: float | None = None
    thm31_er: float | None = None
    cor32: float | None = None
    cor33_lsp: float | None = None
    cor33_er: float | None = None
    cor34_lsp: float | None = None
    cor34_er: float | None = None
    naive: float | None = None
    remark_rhs: float | None = None
    tight_sdp: bool | None = None
    tight_margin: float | None = None

    def applicable_bounds(self) -> list[str]:
        return [name for name, ok in BOUND_APPLICABILITY.items() if self.scheme in ok]

    def as_dict(self) -> dict:
        out = asdict(self)
        out["scheme"] = self.scheme.value
        out["noise"] = self.noise._asdict()
        return out


def eval_bounds(
    g: WeightedGraph,
    scheme,
    ms: MeasurementSet,
    results: Mapping[str, SolverResult | SdpResult],
    *,
    lap=None,
) -> BoundReport:
    """Fill a :class:`BoundReport` for one instance.

    ``results`` may hold ``"er"``, ``"er_normalized"``, ``"lsp"`` and
    ``"sdp"``. ``c_z`` is taken from the ``"er"`` result, which is required.
    """
    scheme = WeightScheme.parse(scheme)
    lap = lap or laplacians(g)
    er = results["er"]
    x = ms.truth.x
    nn = noise_norms(g, ms)
    tau, d = lap.tau_G, g.d
    rt = math.sqrt(tau)
    cz = er.c_z

    rep = BoundReport(scheme, d, tau, lap.tau_N, cz, er.sup_norm_z, nn)
    rep.dist_er = phase_distance(er.x_round, x)
    if "er_normalized" in results:
        rep.dist_er_normalized = phase_distance(results["er_normalized"].x_round, x)
    if "lsp" in results:
        rep.dist_lsp = phase_distance(results["lsp"].x_round, x)
    if "sdp" in results:
        rep.dist_sdp = phase_distance(results["sdp"].x_round, x)
        rep.sdp_rank = results["sdp"].numerical_rank

    values = {
        "thm21": 19.0 * nn.fro_X / (lap.tau_N * math.sqrt(lap.min_degree)),
        "thm22": 2.0 * nn.fro_X / rt,
        "thm23A": 2.0 * math.sqrt(d * nn.spec_WX / tau),
        "thm23B": 4.0 * math.sqrt(d) * nn.spec_WX / tau,
        "thm31_lsp": 2.0 * nn.fro_RX / rt,
        "thm31_er": 2.0 * cz * nn.fro_RX / rt,
        "cor32": 2.0 * cz * nn.fro_X / rt,
        "cor33_lsp": 2.0 * math.sqrt(2.0) * math.sqrt(nn.fro_Y * nn.fro_X) / rt,
        "cor33_er": 2.0 * math.sqrt(2.0) * cz * math.sqrt(nn.fro_Y * nn.fro_X) / rt,
        "cor34_lsp": 4.0 * nn.fro_Y / rt,
        "cor34_er": 4.0 * cz * nn.fro_Y / rt,
        "naive": 2.0 * math.sqrt(d),
        "remark_rhs": math.sqrt(nn.fro_WX * nn.fro_X),
    }
    for name in rep.applicable_bounds():
        setattr(rep, name, values[name])

    if "lsp" in results:
        cert = tightness_certificate(g, ms.Xhat, results["lsp"].x_round, tau_G=tau)
        rep.tight_sdp = cert.holds
        rep.tight_margin = cert.margin
    return rep


def dominance_pairs(rep: BoundReport) -> list[tuple[str, float, float]]:
    """``(bound, distance, bound value)`` for every guarantee that applies
    and whose estimator was evaluated."""
    out = []
    for bound, dist_field in _GUARANTEES.items():
        value = getattr(rep, bound)
        dist = getattr(rep, dist_field)
        if value is not None and dist is not None:
            out.append((bound, dist, value))
    return out


class InequalityCheck(NamedTuple):
    name: str
    lhs: float
    rhs: float
    holds: bool


def _holds(lhs: float, rhs: float) -> bool:
    return lhs <= rhs * (1.0 + REL_SLACK) + ABS_SLACK


def _edge_energy(w: np.ndarray, v: np.ndarray) -> float:
    """``sum_{l,j} w_lj |v_l - v_j|^2`` over ordered pairs."""
    diff = v[:, None] - v[None, :]
    return float(np.sum(w * (diff.real**2 + diff.imag**2)))


def check_proof_inequalities(
    g: WeightedGraph,
    ms: MeasurementSet,
    results: Mapping[str, SolverResult],
    *,
    lap=None,
) -> list[InequalityCheck]:
    """Evaluate the intermediate inequalities of the ER/LSP error bounds.

    ``in1`` and ``in2`` bound the LSP and ER errors by weighted edge
    energies of the gauge-fixed estimates; ``in3`` and ``in4`` bound those
    energies by the noise; ``sgn`` is the rounding step and ``remark`` the
    Cauchy-Schwarz estimate of the ``R``-weighted noise.
    """
    lap = lap or laplacians(g)
    tau = lap.tau_G
    w = g.weights
    x = ms.truth.x
    delta = ms.Xhat - ms.X
    fro_r2 = float(np.linalg.norm(sqrt_weights(g) * delta)) ** 2
    checks: list[InequalityCheck] = []

    def add(name, lhs, rhs):
        checks.append(InequalityCheck(name, float(lhs), float(rhs), _holds(lhs, rhs)))

    if "lsp" in results:
        xt = results["lsp"].x_round
        gl = x.conj() * xt
        energy = _edge_energy(w, gl)
        add("in1_lsp", phase_distance(xt, x) ** 2, energy / tau)
        add("in4_lsp", energy, 4.0 * fro_r2)
    if "er" in results:
        er = results["er"]
        z = er.z
        h = x.conj() * z
        energy = _edge_energy(w, h)
        add("in2_er", phase_distance(entrywise_sgn(z), x) ** 2, 4.0 * energy / tau)
        add("in3_er", energy, er.c_z**2 * fro_r2)
        # optimal gauge for z: e^{i theta} = sgn(x^* z)
        rot = entrywise_sgn(np.vdot(x, z))
        aligned = rot * x
        add(
            "sgn",
            float(np.sum(np.abs(entrywise_sgn(z) - aligned) ** 2)),
            4.0 * float(np.sum(np.abs(z - aligned) ** 2)),
        )
    fro_w = float(np.linalg.norm(w * delta))
    fro_x = float(np.linalg.norm(delta))
    add("remark", math.sqrt(fro_r2), math.sqrt(fro_w * fro_x))
    return checks


def report_fields() -> list[str]:
    return [f.name for f in fields(BoundReport)]
