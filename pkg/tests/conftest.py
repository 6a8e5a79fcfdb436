"""Shared oracles and instance builders for the test suite.

The oracles here are deliberately independent of the package: a cyclic
Jacobi eigensolver for Hermitian matrices and brute-force grid searches.
"""
from __future__ import annotations

import itertools
import sys

import numpy as np
import pytest

from angsync import (
    WeightScheme,
    apply_angular_noise,
    banded_graph,
    build_weights,
    random_signal,
)


def jacobi_eigh(a: np.ndarray, tol: float = 1e-14, max_sweeps: int = 100):
    """Eigenvalues (ascending) and eigenvectors of a Hermitian matrix by
    cyclic complex Jacobi rotations."""
    a = np.array(a, dtype=complex)
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    for _ in range(max_sweeps):
        off = np.linalg.norm(a - np.diag(np.diag(a)))
        if off <= tol * max(1.0, np.linalg.norm(a)):
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) < 1e-300:
                    continue
                # remove the phase of a_pq, then a real symmetric rotation
                phase = apq / abs(apq)
                app, aqq = a[p, p].real, a[q, q].real
                theta = 0.5 * np.arctan2(2 * abs(apq), aqq - app)
                c, s = np.cos(theta), np.sin(theta)
                j = np.eye(n, dtype=complex)
                j[p, p] = c
                j[q, q] = c
                j[p, q] = s * phase
                j[q, p] = -s * np.conj(phase)
                a = j.conj().T @ a @ j
                v = v @ j
    vals = np.real(np.diag(a))
    order = np.argsort(vals)
    return vals[order], v[:, order]


def grid_phase_distance(a, b, step_deg: float) -> float:
    thetas = np.deg2rad(np.arange(0.0, 360.0, step_deg))
    rots = np.exp(1j * thetas)
    return float(np.min(np.linalg.norm(a[None, :] - rots[:, None] * b[None, :], axis=1)))


def grid_lsp_min(lap: np.ndarray, step_deg: float = 2.0) -> float:
    """Exhaustive torus minimum of ``u^* L u`` for d <= 4 with u_0 = 1."""
    d = lap.shape[0]
    angles = np.exp(1j * np.deg2rad(np.arange(0.0, 360.0, step_deg)))
    best = np.inf
    for combo in itertools.product(range(len(angles)), repeat=d - 2):
        head = np.concatenate(([1.0 + 0j], angles[list(combo)]))
        # vectorize over the last free phase
        u = np.tile(np.append(head, 0j), (len(angles), 1))
        u[:, -1] = angles
        vals = np.einsum("ki,ij,kj->k", u.conj(), lap, u).real
        best = min(best, float(vals.min()))
    return best


def random_hermitian(rng, d: int, psd: bool = False) -> np.ndarray:
    b = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return b @ b.conj().T if psd else 0.5 * (b + b.conj().T)


def make_instance(d, delta, scheme, alpha_deg, seed=0, magnitude_eps=0.0):
    gt = random_signal(d, seed)
    ms = apply_angular_noise(gt, banded_graph(d, delta), alpha_deg, seed + 1, magnitude_eps=magnitude_eps)
    g = build_weights(ms, WeightScheme.parse(scheme))
    return g, ms


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        passed, detail = results[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if passed else 'FAIL'}  {detail}")
