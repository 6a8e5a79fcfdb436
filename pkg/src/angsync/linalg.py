"""Dense complex Hermitian linear algebra and iterative eigensolvers.

Matrices are plain ``numpy`` arrays. Hermitian inputs are validated once at
the boundary (:func:`as_hermitian`) and then treated as read-only.

The eigensolvers are restarted Lanczos with full reorthogonalization. A
shifted power iteration is kept as an alternative backend behind the same
contract (``method="power"``); it needs an upper bound on the spectrum.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

__all__ = [
    "ConvergenceError",
    "DimensionError",
    "EigenPair",
    "as_hermitian",
    "entrywise_sgn",
    "hadamard",
    "leading_eigenpair",
    "rayleigh",
    "second_smallest_eigenvalue",
    "smallest_eigenpair",
    "spectral_norm",
    "sup_norm",
]

RESIDUAL_TOL = 1e-10
HERMITIAN_TOL = 1e-12
# Krylov solvers switch to a CSR matvec below this fill ratio
SPARSE_FILL = 0.25


class DimensionError(ValueError):
    """Operand shapes are incompatible."""


class ConvergenceError(RuntimeError):
    """An iterative solver ran out of iterations."""

    def __init__(self, message: str, residual: float, iterations: int):
        super().__init__(f"{message} (residual={residual:.3e}, iterations={iterations})")
        self.residual = residual
        self.iterations = iterations


@dataclass(frozen=True)
class EigenPair:
    """An eigenvalue with a unit 2-norm eigenvector."""

    value: float
    vector: np.ndarray
    residual: float = 0.0
    iterations: int = 0


def hadamard(a, b) -> np.ndarray:
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise DimensionError(f"hadamard product of shapes {a.shape} and {b.shape}")
    if not (np.iscomplexobj(a) or np.iscomplexobj(b)):
        return a * b
    # the fused complex multiply is not bitwise commutative; separately
    # rounded real products are
    ar, ai, br, bi = a.real, a.imag, b.real, b.imag
    out = np.empty(np.broadcast_shapes(a.shape, b.shape), dtype=complex)
    out.real = ar * br - ai * bi
    out.imag = ar * bi + ai * br
    return out


def entrywise_sgn(a) -> np.ndarray:
    """Map each entry to ``a / |a|``, and zeros to zero."""
    a = np.asarray(a, dtype=complex)
    out = np.zeros_like(a)
    # rescale by the larger component first so tiny and huge entries
    # neither underflow nor overflow in |a|
    big = np.maximum(np.abs(a.real), np.abs(a.imag))
    nz = big > 0
    re = a.real[nz] / big[nz]
    im = a.imag[nz] / big[nz]
    mag = np.hypot(re, im)
    out[nz] = re / mag + 1j * (im / mag)
    return out


def sup_norm(v) -> float:
    return float(np.max(np.abs(v)))


def as_hermitian(a, *, check: bool = True) -> np.ndarray:
    """Return a read-only complex copy of ``a`` that is exactly Hermitian.

    With ``check`` the input must already be Hermitian to within
    ``HERMITIAN_TOL`` relative to its largest entry; the copy is then
    symmetrized so ``A == A.conj().T`` holds bitwise.
    """
    a = np.array(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {a.shape}")
    if check:
        scale = max(1.0, float(np.max(np.abs(a)))) if a.size else 1.0
        if np.max(np.abs(a - a.conj().T), initial=0.0) > HERMITIAN_TOL * scale:
            raise ValueError("matrix is not Hermitian")
    a = 0.5 * (a + a.conj().T)
    a[np.diag_indices_from(a)] = a.diagonal().real
    a.setflags(write=False)
    return a


def rayleigh(a: np.ndarray, u: np.ndarray) -> float:
    u = np.asarray(u, dtype=complex)
    return float(np.vdot(u, a @ u).real / np.vdot(u, u).real)


def _row_sum_bound(a) -> float:
    # Gershgorin: bounds the spectral radius from above
    return float(abs(a).sum(axis=1).max())


def _operator(a: np.ndarray):
    """``a`` itself, or a CSR copy when it is large and mostly zero; only
    used for matrix-vector products, storage stays dense."""
    if a.shape[0] >= 64 and np.count_nonzero(a) <= SPARSE_FILL * a.size:
        return sp.csr_matrix(a)
    return a


def _start_vector(d: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return v / np.linalg.norm(v)


def _project_out(w: np.ndarray, basis: np.ndarray | None) -> np.ndarray:
    if basis is None:
        return w
    return w - basis.T @ (basis.conj() @ w)


def _lanczos_min(
    a: np.ndarray,
    *,
    seed: int,
    tol: float,
    max_iters: int,
    deflate: np.ndarray | None = None,
    krylov_dim: int = 80,
    check_every: int = 8,
) -> EigenPair:
    """Smallest eigenpair of ``a`` restricted to the complement of ``deflate``.

    ``deflate`` holds orthonormal rows spanning an invariant subspace to
    exclude. Explicit restarts from the current Ritz vector.
    """
    d = a.shape[0]
    free = d - (0 if deflate is None else deflate.shape[0])
    m = max(1, min(free, krylov_dim))
    scale = max(1.0, _row_sum_bound(a))
    v = _project_out(_start_vector(d, seed), deflate)
    v /= np.linalg.norm(v)

    used = 0
    residual = np.inf
    while True:
        basis = np.empty((m, d), dtype=complex)
        images = np.empty((m, d), dtype=complex)
        basis[0] = v
        k = m
        for j in range(m):
            w = a @ basis[j]
            images[j] = w
            used += 1
            q = basis[: j + 1]
            # two passes of classical Gram-Schmidt, deflated directions
            # included, keep the basis orthonormal
            for _ in range(2):
                w = _project_out(w, deflate)
                w = w - q.T @ (q @ w.conj()).conj()
            b = np.linalg.norm(w)
            if j + 1 == m:
                break
            if b <= 1e-10 * scale:
                k = j + 1
                break
            if (j + 1) % check_every == 0:
                # Ritz residual estimate |b| |s_last|; the true residual
                # is checked below before returning
                h = q.conj() @ images[: j + 1].T
                _, s = np.linalg.eigh(0.5 * (h + h.conj().T))
                if b * abs(s[-1, 0]) <= 0.5 * tol * scale:
                    k = j + 1
                    break
            basis[j + 1] = w / b

        # Rayleigh-Ritz on the stored basis; robust to loss of the
        # three-term structure after near-breakdown
        q = basis[:k]
        h = q.conj() @ images[:k].T
        h = 0.5 * (h + h.conj().T)
        _, s = np.linalg.eigh(h)
        v = s[:, 0] @ q
        v = _project_out(v, deflate)
        v /= np.linalg.norm(v)
        av = a @ v
        lam = float(np.vdot(v, av).real)
        residual = float(np.linalg.norm(av - lam * v))
        if residual <= tol * scale:
            return EigenPair(lam, v, residual, used)
        if used >= max_iters:
            raise ConvergenceError("Lanczos did not converge", residual, used)


def _power_min(
    a: np.ndarray,
    known_upper: float,
    *,
    seed: int,
    tol: float,
    max_iters: int,
    deflate: np.ndarray | None = None,
) -> EigenPair:
    """Power iteration on ``known_upper * I - a``."""
    d = a.shape[0]
    scale = max(1.0, _row_sum_bound(a))
    v = _project_out(_start_vector(d, seed), deflate)
    v /= np.linalg.norm(v)
    residual = np.inf
    for it in range(1, max_iters + 1):
        av = a @ v
        if it % 10 == 0:
            lam = float(np.vdot(v, av).real)
            residual = float(np.linalg.norm(av - lam * v))
            if residual <= tol * scale:
                return EigenPair(lam, v, residual, it)
        v = _project_out(known_upper * v - av, deflate)
        v /= np.linalg.norm(v)
    raise ConvergenceError("power iteration did not converge", residual, max_iters)


def smallest_eigenpair(
    a,
    known_upper: float | None = None,
    *,
    seed: int = 0,
    tol: float = RESIDUAL_TOL,
    max_iters: int | None = None,
    method: str = "lanczos",
) -> EigenPair:
    """Minimal eigenvalue of a Hermitian matrix and a unit eigenvector.

    ``known_upper`` must bound the largest eigenvalue from above; it is only
    required by ``method="power"`` and defaults to the Gershgorin bound.
    The returned pair satisfies ``||A v - lam v|| <= tol * max(1, rowsum(A))``.
    """
    a = np.asarray(a, dtype=complex)
    d = a.shape[0]
    max_iters = max_iters or 100 * d
    if method == "lanczos":
        return _lanczos_min(_operator(a), seed=seed, tol=tol, max_iters=max_iters)
    if method == "power":
        upper = _row_sum_bound(a) if known_upper is None else float(known_upper)
        return _power_min(a, upper, seed=seed, tol=tol, max_iters=max_iters)
    raise ValueError(f"unknown eigensolver method {method!r}")


def leading_eigenpair(
    a,
    *,
    seed: int = 0,
    tol: float = RESIDUAL_TOL,
    max_iters: int | None = None,
) -> EigenPair:
    a = np.asarray(a, dtype=complex)
    pair = smallest_eigenpair(-a, seed=seed, tol=tol, max_iters=max_iters)
    return EigenPair(-pair.value, pair.vector, pair.residual, pair.iterations)


def second_smallest_eigenvalue(
    a,
    null_vector,
    *,
    seed: int = 0,
    tol: float = RESIDUAL_TOL,
    null_tol: float = 1e-8,
    max_iters: int | None = None,
) -> float:
    """Second eigenvalue of a PSD matrix whose null vector is known.

    Iterates are kept orthogonal to ``null_vector``; the vector has to be
    annihilated by ``a`` to within ``null_tol`` (relative to the row-sum
    bound), otherwise the deflation would be meaningless.
    """
    a = np.asarray(a, dtype=complex)
    n = np.asarray(null_vector, dtype=complex)
    if n.shape != (a.shape[0],):
        raise DimensionError("null vector length does not match matrix")
    norm = np.linalg.norm(n)
    if norm == 0:
        raise ValueError("null vector must be nonzero")
    n = n / norm
    scale = max(1.0, _row_sum_bound(a))
    if np.linalg.norm(a @ n) > null_tol * scale:
        raise ValueError("supplied vector is not in the null space")
    if a.shape[0] == 1:
        raise DimensionError("a 1x1 matrix has no second eigenvalue")
    max_iters = max_iters or 100 * a.shape[0]
    pair = _lanczos_min(_operator(a), seed=seed, tol=tol, max_iters=max_iters, deflate=n[None, :])
    return pair.value


def spectral_norm(a, *, seed: int = 0) -> float:
    """``max(|lam_max|, |lam_min|)`` of a Hermitian matrix."""
    a = np.asarray(a, dtype=complex)
    if not np.any(a):
        return 0.0
    hi = leading_eigenpair(a, seed=seed).value
    lo = smallest_eigenpair(a, seed=seed).value
    return max(abs(hi), abs(lo))
