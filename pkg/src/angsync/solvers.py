"""Estimators for the phase vector: eigenvector relaxation, torus
least squares by the generalized power method, and the semidefinite
relaxation solved in Burer-Monteiro form.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
import scipy.sparse as sp

from . import _backend
from .graph import WeightedGraph, data_laplacian, laplacians
from .linalg import entrywise_sgn, smallest_eigenpair, spectral_norm, sup_norm

__all__ = [
    "Certificate",
    "SdpResult",
    "SolverResult",
    "bm_rank",
    "canonicalize",
    "solve_er",
    "solve_er_normalized",
    "solve_lsp",
    "solve_sdp",
    "tightness_certificate",
]

RANK_RTOL = 1e-6


def canonicalize(v: np.ndarray, reference: np.ndarray | None = None) -> np.ndarray:
    """Rotate so that the first nonzero entry of ``reference`` (default
    ``v``) becomes positive real."""
    ref = v if reference is None else reference
    nz = np.flatnonzero(np.abs(ref) > 0)
    if nz.size == 0:
        return v.copy()
    k = nz[0]
    return v * (abs(ref[k]) / ref[k])


def _c_z(sup: float) -> float:
    return math.sqrt(2.0 + 2.0 * sup * sup)


@dataclass(frozen=True, eq=False)
class SolverResult:
    z: np.ndarray
    x_round: np.ndarray
    objective: float
    iterations: int
    converged: bool
    sup_norm_z: float
    c_z: float
    history: np.ndarray | None = None


@dataclass(frozen=True, eq=False)
class SdpResult:
    Z: np.ndarray
    x_round: np.ndarray
    objective: float
    numerical_rank: int
    eigenvalues: np.ndarray
    converged: bool
    solver_stats: dict = field(default_factory=dict)


def _finish_vector(z: np.ndarray, lap: np.ndarray, iterations: int, converged: bool, history=None):
    x_round = entrywise_sgn(z)
    z = canonicalize(z, x_round)
    x_round = canonicalize(x_round)
    sup = sup_norm(z)
    objective = float(np.vdot(z, lap @ z).real)
    return SolverResult(z, x_round, objective, iterations, converged, sup, _c_z(sup), history)


def solve_er(g: WeightedGraph, xhat, *, seed: int = 0) -> SolverResult:
    """Minimize ``z^* Lhat z`` over the sphere ``||z||^2 = d``."""
    lap = data_laplacian(g, xhat)
    pair = smallest_eigenpair(lap, 2.0 * g.degrees.max(), seed=seed)
    z = math.sqrt(g.d) * pair.vector
    return _finish_vector(z, lap, pair.iterations, True)


def solve_er_normalized(g: WeightedGraph, xhat, *, seed: int = 0) -> SolverResult:
    """Smallest eigenvector of ``D^-1/2 Lhat D^-1/2`` scaled to ``||z||^2 = d``.

    The reported objective is the quadratic form of the normalized matrix.
    """
    lap = data_laplacian(g, xhat)
    s = 1.0 / np.sqrt(g.degrees)
    normalized = s[:, None] * lap * s[None, :]
    normalized = 0.5 * (normalized + normalized.conj().T)
    pair = smallest_eigenpair(normalized, 2.0, seed=seed)
    z = math.sqrt(g.d) * pair.vector
    return _finish_vector(z, normalized, pair.iterations, True)


def solve_lsp(
    g: WeightedGraph,
    xhat,
    init=None,
    *,
    max_iter: int = 10_000,
    rtol: float = 1e-12,
    tol: float = 1e-9,
    max_tr_iter: int = 500,
    seed: int = 0,
) -> SolverResult:
    """Generalized power method for ``min z^* Lhat z`` over the torus.

    Iterates ``u <- sgn((mu I - Lhat) u)`` with the Gershgorin shift
    ``mu = 2 * max degree``, which makes the objective nonincreasing. The
    default start is the rounded eigenvector relaxation.

    GPM contracts at a rate near ``1 - tau / mu``, which is slow on poorly
    connected weighted graphs. If its fixed point still has a Riemannian
    gradient above ``tol * ||Lhat||_F``, a trust-region method on the torus
    finishes the descent; ``history`` records both phases.
    """
    lap = data_laplacian(g, xhat)
    d = g.d
    if init is None:
        init = solve_er(g, xhat, seed=seed).x_round
    u0 = entrywise_sgn(np.asarray(init, dtype=complex))
    u0[u0 == 0] = 1.0
    shift = 2.0 * float(g.degrees.max())
    S = np.ascontiguousarray(shift * np.eye(d) - lap)
    atol = 1e-15 * shift * d
    u, history, converged = _backend.kernels().gpm(S, shift, u0, max_iter, rtol, atol)
    history = list(np.asarray(history))
    iterations = len(history) - 1
    u = np.asarray(u)[:, None]
    threshold = tol * max(1.0, float(np.linalg.norm(lap)))
    grad, _ = _riemannian_grad(lap, u)
    if np.linalg.norm(grad) > threshold:
        u, n = _trust_region(lap, u, threshold, max_tr_iter)
        iterations += n
        history.append(float(np.vdot(u[:, 0], lap @ u[:, 0]).real))
        grad, _ = _riemannian_grad(lap, u)
    converged = bool(np.linalg.norm(grad) <= threshold)
    x = canonicalize(entrywise_sgn(u[:, 0]))
    objective = float(np.vdot(x, lap @ x).real)
    return SolverResult(x, x, objective, iterations, converged, 1.0, 2.0, np.asarray(history))


def bm_rank(d: int) -> int:
    """Burer-Monteiro factor width ``ceil(sqrt(2d)) + 1``, capped at ``d``."""
    return min(d, math.ceil(math.sqrt(2 * d)) + 1)


def _riemannian_grad(lap, V):
    """Tangent part of ``L V`` (half the Riemannian gradient of
    ``tr(V^* L V)``) and the row multipliers ``mu_i = Re <v_i, (L V)_i>``."""
    G = lap @ V
    mu = np.einsum("ij,ij->i", V.conj(), G).real
    return G - mu[:, None] * V, mu


def _inner(a, b) -> float:
    return float(np.einsum("ij,ij->", a.conj(), b).real)


def _tangent(V, U):
    return U - np.einsum("ij,ij->i", V.conj(), U).real[:, None] * V


def _normalize_rows(V):
    return np.ascontiguousarray(V / np.linalg.norm(V, axis=1, keepdims=True))


def _horizontal_projector(V):
    """Projector removing the gauge directions ``V @ Omega`` (``Omega``
    skew-Hermitian) from tangent vectors at ``V``.

    ``f`` is constant along ``V -> V U`` for unitary ``U``, so the Hessian
    vanishes there at a critical point; left in, roundoff components along
    these directions send truncated CG to the trust-region boundary.
    """
    w, Q = np.linalg.eigh(V.conj().T @ V)
    denom = w[:, None] + w[None, :]
    keep = denom > 1e-10 * max(float(w[-1]), 1e-300)
    inv = np.where(keep, 1.0 / np.where(keep, denom, 1.0), 0.0)
    VQ = V @ Q

    def project(U):
        # least squares for Omega: G Omega + Omega G = V^* U - U^* V, G = V^* V
        B = VQ.conj().T @ (U @ Q)
        return U - VQ @ ((B - B.conj().T) * inv) @ Q.conj().T

    return project


def _trust_region(lap, V, threshold, max_iter, max_inner=200):
    """Riemannian trust-region polish on the product of unit spheres.

    Minimizes ``f(V) = tr(V^* L V)``; inner problems are solved by truncated
    conjugate gradients with the exact Riemannian Hessian. Returns the new
    ``V`` and the number of outer iterations.
    """
    d = V.shape[0]
    radius_max = math.pi * math.sqrt(d)
    radius = radius_max / 8
    LV = lap @ V
    f = _inner(V, LV)
    # roundoff level of f(cand) - f(V) computed from the step
    f_noise = 100 * np.finfo(float).eps * math.sqrt(d * _inner(LV, LV))
    for it in range(1, max_iter + 1):
        mu = np.einsum("ij,ij->i", V.conj(), LV).real
        grad = 2.0 * (LV - mu[:, None] * V)
        gnorm = math.sqrt(_inner(grad, grad))
        if gnorm <= 2.0 * threshold:
            return V, it - 1

        horizontal = _horizontal_projector(V)

        def hess(U):
            # projecting the whole expression keeps CG iterates tangent
            return horizontal(_tangent(V, 2.0 * (lap @ U) - 2.0 * mu[:, None] * U))

        # Steihaug-Toint truncated CG on the horizontal space
        eta = np.zeros_like(V)
        r = horizontal(grad)
        delta = -r
        rr = _inner(r, r)
        kappa, theta = 0.1, 1.0
        stop = gnorm * min(gnorm**theta, kappa)
        for _ in range(max_inner):
            Hd = hess(delta)
            dHd = _inner(delta, Hd)
            alpha = rr / dHd if dHd > 0 else np.inf
            eta_next = eta + alpha * delta if np.isfinite(alpha) else None
            if dHd <= 0 or math.sqrt(_inner(eta_next, eta_next)) >= radius:
                # step to the boundary along delta
                ed, dd, ee = _inner(eta, delta), _inner(delta, delta), _inner(eta, eta)
                tau = (-ed + math.sqrt(max(ed * ed + dd * (radius**2 - ee), 0.0))) / dd
                eta = eta + tau * delta
                break
            eta = eta_next
            r = r + alpha * Hd
            rr_next = _inner(r, r)
            if math.sqrt(rr_next) <= stop:
                break
            delta = -r + (rr_next / rr) * delta
            rr = rr_next

        model = _inner(grad, eta) + 0.5 * _inner(eta, hess(eta))
        cand = _normalize_rows(V + eta)
        L_cand = lap @ cand
        # f(cand) - f(V) from the step itself; differencing two values of f
        # loses everything once the decrease nears eps * |f|
        D = cand - V
        decrease = -(2.0 * _inner(D, LV) + _inner(D, lap @ D))
        f_cand = f - decrease
        rho = decrease / -model if model < 0 else -np.inf
        if 0 < -model <= f_noise:
            # the predicted decrease is below what f resolves; judge the
            # step by the gradient it leaves instead
            mu_c = np.einsum("ij,ij->i", cand.conj(), L_cand).real
            grad_c = 2.0 * (L_cand - mu_c[:, None] * cand)
            rho = 1.0 if _inner(grad_c, grad_c) < gnorm**2 else -np.inf
        step = math.sqrt(_inner(eta, eta))
        if rho < 0.25:
            radius *= 0.25
        elif rho > 0.75 and step >= 0.99 * radius:
            radius = min(2.0 * radius, radius_max)
        if rho > 0.1 or (f_cand <= f and model < 0 and rho > -np.inf):
            V, LV, f = cand, L_cand, f_cand
        if radius < 1e-14:
            return V, it
    return V, max_iter


def solve_sdp(
    g: WeightedGraph,
    xhat,
    *,
    rank: int | None = None,
    seed: int = 0,
    tol: float = 1e-9,
    max_sweeps: int = 20_000,
    mixing_sweeps: int = 200,
    max_tr_iter: int = 500,
    check_every: int = 5,
    certify: bool = True,
    max_escapes: int = 3,
) -> SdpResult:
    """``min tr(Lhat Z)`` over unit-diagonal PSD ``Z``, with ``Z = V V^*``.

    ``V`` has unit-norm rows and ``rank`` columns. It is optimized by exact
    block-coordinate minimization over one row at a time, each row update
    being the unit vector along ``sum_j W_lj Xhat_lj v_j``. If that has not
    reached the gradient tolerance ``tol * ||Lhat||_F`` after
    ``mixing_sweeps`` sweeps, a Riemannian trust-region method finishes.

    With ``certify`` the dual slack ``S = Lhat - diag(mu)`` is checked for
    positive semidefiniteness; a negative direction is used to leave a
    saddle point, at most ``max_escapes`` times. ``lambda_min(S)`` gives the
    lower bound ``sum(mu) + d * min(0, lambda_min(S))`` on the optimum.
    """
    lap = data_laplacian(g, xhat)
    d = g.d
    p = rank or bm_rank(d)
    coupling = sp.csr_matrix(np.where(g.adjacency > 0, g.weights * np.asarray(xhat), 0))
    indptr = coupling.indptr.astype(np.int64)
    indices = coupling.indices.astype(np.int64)
    data = coupling.data.astype(np.complex128)

    rng = np.random.default_rng(seed)
    V = rng.standard_normal((d, p)) + 1j * rng.standard_normal((d, p))
    V /= np.linalg.norm(V, axis=1, keepdims=True)
    V = np.ascontiguousarray(V)

    kern = _backend.kernels()
    threshold = tol * max(1.0, float(np.linalg.norm(lap)))
    sweeps = 0
    escapes = 0
    converged = False
    lam_min = float("nan")
    tr_iters = 0
    while True:
        # cheap first-order phase, then second-order polish if it stalls
        budget = min(max_sweeps, sweeps + mixing_sweeps)
        while sweeps < budget:
            kern.mixing_sweeps(indptr, indices, data, V, check_every)
            sweeps += check_every
            grad, mu = _riemannian_grad(lap, V)
            if np.linalg.norm(grad) <= threshold:
                converged = True
                break
        if not converged:
            V, n = _trust_region(lap, V, threshold, max_tr_iter)
            tr_iters += n
        grad, mu = _riemannian_grad(lap, V)
        converged = bool(np.linalg.norm(grad) <= threshold)
        if not (certify and converged):
            break
        slack = lap - np.diag(mu)
        pair = smallest_eigenpair(slack, seed=seed)
        lam_min = pair.value
        if lam_min >= -threshold or escapes >= max_escapes:
            break
        # leave the saddle along the negative curvature direction in an
        # unused column of V
        _, _, vh = np.linalg.svd(V, full_matrices=False)
        V = V + 0.1 * np.outer(pair.vector, vh[-1])
        V /= np.linalg.norm(V, axis=1, keepdims=True)
        V = np.ascontiguousarray(V)
        escapes += 1
        converged = False

    u, sigma, _ = np.linalg.svd(V, full_matrices=False)
    eig = sigma**2
    numerical_rank = int(np.count_nonzero(eig > RANK_RTOL * eig[0]))
    x_round = canonicalize(entrywise_sgn(u[:, 0]))
    Z = V @ V.conj().T
    objective = float(np.einsum("ij,ij->", V.conj(), lap @ V).real)
    stats = {
        "sweeps": sweeps,
        "trust_region_iters": tr_iters,
        "grad_norm": float(np.linalg.norm(grad)),
        "grad_tol": threshold,
        "rank_bound": p,
        "escapes": escapes,
        "dual_lambda_min": lam_min,
        "dual_lower_bound": float(mu.sum() + d * min(0.0, lam_min)) if certify else float("nan"),
    }
    return SdpResult(Z, x_round, objective, numerical_rank, eig, converged, stats)


class Certificate(NamedTuple):
    holds: bool
    margin: float
    spectral: float
    threshold: float


def tightness_certificate(g: WeightedGraph, xhat, x_cand, *, tau_G: float | None = None) -> Certificate:
    """Sufficient condition for ``x x^*`` to solve the SDP:
    ``||W o (Xhat - x x^*)||_2 < tau_G / (1 + sqrt(d))``."""
    x = np.asarray(x_cand, dtype=complex)
    if tau_G is None:
        tau_G = laplacians(g).tau_G
    gap = g.weights * (np.asarray(xhat) - np.outer(x, x.conj()))
    gap = 0.5 * (gap + gap.conj().T)
    s = spectral_norm(gap)
    t = tau_G / (1.0 + math.sqrt(g.d))
    return Certificate(s < t, t - s, s, t)
