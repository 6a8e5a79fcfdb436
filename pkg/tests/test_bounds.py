import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from angsync.bounds import (
    BOUND_APPLICABILITY,
    check_proof_inequalities,
    dominance_pairs,
    eval_bounds,
    noise_norms,
    phase_distance,
)
from angsync.graph import banded_graph, laplacians
from angsync.linalg import entrywise_sgn
from angsync.solvers import solve_er, solve_er_normalized, solve_lsp, solve_sdp
from angsync.synth import WeightScheme, apply_angular_noise, build_weights, random_signal

from conftest import grid_phase_distance, jacobi_eigh, make_instance

seeds = st.integers(0, 2**32 - 1)


def _solve_all(g, ms, scheme):
    er = solve_er(g, ms.Xhat)
    res = {"er": er, "lsp": solve_lsp(g, ms.Xhat, er.x_round), "sdp": solve_sdp(g, ms.Xhat)}
    if WeightScheme.parse(scheme) is WeightScheme.UNIT:
        res["er_normalized"] = solve_er_normalized(g, ms.Xhat)
    return res


@st.composite
def instances(draw, max_d=16):
    d = draw(st.integers(4, max_d))
    delta = draw(st.integers(2, (d + 1) // 2))
    alpha = draw(st.sampled_from([1.0, 10.0, 90.0]))
    scheme = draw(st.sampled_from(list(WeightScheme)))
    eps = draw(st.sampled_from([0.0, 0.1]))
    g, ms = make_instance(d, delta, scheme, alpha, seed=draw(st.integers(0, 10**6)), magnitude_eps=eps)
    return g, ms, scheme


def test_phase_distance_examples():
    x = np.exp(1j * np.array([0.3, 1.0, -2.0]))
    assert phase_distance(x, 1j * x) == pytest.approx(0.0, abs=1e-15)
    a, b = np.array([1, 1]), np.array([1, -1])
    assert phase_distance(a, b) == pytest.approx(2.0, abs=1e-12)
    assert grid_phase_distance(a.astype(complex), b.astype(complex), 1.0) == pytest.approx(2.0, abs=1e-3)


@pytest.mark.parametrize("seed", range(10))
def test_phase_distance_vs_grid(seed):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal(8) + 1j * rng.standard_normal(8)
    b = rng.standard_normal(8) + 1j * rng.standard_normal(8)
    assert phase_distance(a, b) == pytest.approx(grid_phase_distance(a, b, 0.01), abs=1e-4)


@given(seeds)
def test_phase_distance_pseudometric(seed):
    rng = np.random.default_rng(seed)
    a, b, c = (rng.standard_normal(6) + 1j * rng.standard_normal(6) for _ in range(3))
    assert phase_distance(a, b) == pytest.approx(phase_distance(b, a), abs=1e-12)
    assert phase_distance(a, c) <= phase_distance(a, b) + phase_distance(b, c) + 1e-9
    assert phase_distance(a, a * np.exp(1j * rng.uniform(0, 7))) <= 1e-12
    assert phase_distance(a, b) > 0


def test_zero_noise_all_zero():
    for scheme in WeightScheme:
        g, ms = make_instance(12, 3, scheme, 0.0, seed=2)
        rep = eval_bounds(g, scheme, ms, _solve_all(g, ms, scheme))
        for name in rep.applicable_bounds():
            if name != "naive":
                # |y_l y_j| x_l conj(x_j) reproduces y_l conj(y_j) only to roundoff
                assert getattr(rep, name) <= 1e-12 * max(1.0, np.abs(ms.Y).max())
        for dist in (rep.dist_er, rep.dist_lsp, rep.dist_sdp):
            assert dist <= 1e-7
        for chk in check_proof_inequalities(g, ms, _solve_all(g, ms, scheme)):
            assert chk.holds
            assert chk.lhs == pytest.approx(0.0, abs=1e-12)


def test_naive_bound_d64():
    g, ms = make_instance(64, 16, "unit", 1.0)
    rep = eval_bounds(g, "unit", ms, {"er": solve_er(g, ms.Xhat)})
    assert rep.naive == 16.0


def test_unit_theorem_reductions():
    g, ms = make_instance(8, 2, "unit", 15.0, seed=4)
    rep = eval_bounds(g, "unit", ms, _solve_all(g, ms, "unit"))
    assert rep.thm31_lsp == rep.thm22
    assert rep.cor32 == pytest.approx(rep.thm31_er, rel=1e-15)


def test_remark_equality_unweighted():
    g, ms = make_instance(10, 3, "unit", 25.0, seed=1)
    chk = {c.name: c for c in check_proof_inequalities(g, ms, {})}["remark"]
    assert chk.lhs == pytest.approx(chk.rhs, rel=1e-14)


def test_not_applicable_fields_are_none():
    for scheme in WeightScheme:
        g, ms = make_instance(8, 3, scheme, 5.0)
        rep = eval_bounds(g, scheme, ms, _solve_all(g, ms, scheme))
        for name, ok in BOUND_APPLICABILITY.items():
            assert (getattr(rep, name) is None) == (scheme not in ok)
        assert (rep.dist_er_normalized is None) == (scheme is not WeightScheme.UNIT)


def test_noise_norms_against_definitions():
    g, ms = make_instance(9, 3, "amplitude", 30.0, seed=6, magnitude_eps=0.1)
    nn = noise_norms(g, ms)
    delta = ms.Xhat - ms.X
    pairs = [(l, j) for l in range(9) for j in range(9) if g.adjacency[l, j]]
    assert nn.fro_X == pytest.approx(math.sqrt(sum(abs(delta[p]) ** 2 for p in pairs)))
    assert nn.fro_RX == pytest.approx(math.sqrt(sum(g.weights[p] * abs(delta[p]) ** 2 for p in pairs)))
    off = [(l, j) for l in range(9) for j in range(9) if l != j]
    assert nn.fro_Y == pytest.approx(math.sqrt(sum(abs(ms.Yhat[p] - ms.Y[p]) ** 2 for p in off)))
    vals, _ = jacobi_eigh(g.weights * delta)
    assert nn.spec_WX == pytest.approx(np.max(np.abs(vals)), rel=1e-9)


@settings(max_examples=60, deadline=None)
@given(instances())
def test_dominance_and_proof_inequalities(inst):
    g, ms, scheme = inst
    results = _solve_all(g, ms, scheme)
    rep = eval_bounds(g, scheme, ms, results)
    for name, dist, bound in dominance_pairs(rep):
        assert dist <= bound * (1 + 1e-9) + 1e-12, name
    for chk in check_proof_inequalities(g, ms, results):
        assert chk.holds, chk
    assert rep.thm31_lsp <= 2 * rep.remark_rhs / math.sqrt(rep.tau_G) * (1 + 1e-12)
    if rep.tight_sdp:
        assert rep.sdp_rank == 1
        assert phase_distance(results["sdp"].x_round, results["lsp"].x_round) <= 1e-5
    for name in rep.applicable_bounds():
        assert getattr(rep, name) >= 0


@settings(max_examples=15, deadline=None)
@given(st.integers(4, 12), st.floats(0, 2 * np.pi), st.sampled_from(list(WeightScheme)), seeds)
def test_bounds_gauge_invariant(d, theta, scheme, seed):
    gt = random_signal(d, seed)
    rot = np.exp(1j * theta)
    reps = []
    for truth in (gt, type(gt)(gt.y * rot, entrywise_sgn(gt.y * rot))):
        ms = apply_angular_noise(truth, banded_graph(d, 2), 15.0, seed)
        g = build_weights(ms, scheme)
        reps.append(eval_bounds(g, scheme, ms, {"er": solve_er(g, ms.Xhat)}))
    for name in reps[0].applicable_bounds():
        assert getattr(reps[0], name) == pytest.approx(getattr(reps[1], name), rel=1e-9, abs=1e-12)


def test_report_as_dict():
    g, ms = make_instance(8, 2, "squared", 3.0)
    rep = eval_bounds(g, "squared", ms, {"er": solve_er(g, ms.Xhat)}, lap=laplacians(g))
    out = rep.as_dict()
    assert out["scheme"] == "squared"
    assert set(out["noise"]) == {"fro_X", "fro_WX", "spec_WX", "fro_RX", "fro_Y"}
    assert out["dist_lsp"] is None
