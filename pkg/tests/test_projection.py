import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sisfit import FiberVector, GridConfig, SamplingKernel, build_filter, data_residual, reconstruct
from sisfit.grid import field_norm_sq, metric_weights, sequence_norm_sq, wdot, wnorm_sq
from sisfit.oracle import mgs
from sisfit.projection import gs_basis, gs_order, gs_recursion, measurement_field, project_A

from conftest import crandn, random_kernel, single_fiber_kernel


def ridge_oracle(g_fiber, target, lam):
    """argmin_a |x0 - <a, g>|^2 + lam |x1 - a|^2 through the normal equations."""
    h = np.conj(g_fiber)[None, :]
    A = np.conj(h).T @ h + lam * np.eye(g_fiber.size)
    a = np.linalg.solve(A, np.conj(h).T[:, 0] * target[0] + lam * target[1:])
    return np.concatenate([[np.sum(a * np.conj(g_fiber))], a])


def test_gs_order():
    assert list(gs_order(2)) == [0, 1, -1, 2, -2]


def test_gs_zero_kernel():
    row = gs_recursion(np.zeros(3), gs_order(1), 1, 0.5)
    assert np.allclose(row.norm_sq, 0.5)
    assert np.all(row.v[:, 0] == 0)
    assert np.array_equal(np.abs(row.v[:, 1:]).sum(axis=0), np.ones(3))
    assert row.v[1, 3] == 1 and row.v[2, 1] == 1


def test_gs_hand_example():
    a1 = 0.7 - 0.2j
    row = gs_recursion(np.array([2.0, a1]), np.array([0, 1]), 1, 1.0)
    assert np.allclose(row.v[0], [2, 0, 1, 0])
    assert row.norm_sq[0] == pytest.approx(5)
    assert row.v[1, 0] == pytest.approx(a1 / 5)
    assert row.norm_sq[1] == pytest.approx((abs(a1) ** 2 + 4 + 1) / 5)
    assert row.cumulative[0] == 1.0


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), lam=st.floats(1e-3, 1e2))
def test_gs_matches_modified_gram_schmidt(seed, lam):
    rng = np.random.default_rng(seed)
    L = 2
    a = crandn(rng, 5)
    idx = gs_order(L)
    row = gs_recursion(a, idx, L, lam)
    w = metric_weights(lam, 2 * L + 1)
    raw = np.zeros((5, 2 * L + 2), complex)
    raw[:, 0] = a
    raw[np.arange(5), idx + L + 1] = 1
    ref, ref_norms = mgs(raw, w)
    assert np.max(np.abs(row.v - ref)) <= 1e-9
    assert np.allclose(row.norm_sq, ref_norms, rtol=1e-12)
    gram = (row.v * w) @ np.conj(row.v).T
    off = gram - np.diag(np.diag(gram))
    assert np.max(np.abs(off)) <= 1e-10


def test_gs_basis_order_bounds(cfg, rng):
    g = random_kernel(cfg, rng)
    assert gs_basis(g, 0, order=3).v.shape == (3, cfg.dim)
    with pytest.raises(ValueError):
        gs_basis(g, 0, order=cfg.width + 1)


def test_project_A_examples(cfg, rng):
    g = single_fiber_kernel(cfg, 2.0)
    p = project_A(g, 3, FiberVector(1, np.zeros(cfg.width)))
    assert p.scalar == pytest.approx(0.8)
    expected = np.zeros(cfg.width)
    expected[cfg.L] = 0.4
    assert np.allclose(p.fiber, expected)

    g = random_kernel(cfg, rng)
    a = crandn(rng, cfg.width)
    inside = np.concatenate([[np.sum(a * np.conj(g.fibers[5]))], a])
    assert np.max(np.abs(project_A(g, 5, inside) - inside)) <= 1e-10

    x = crandn(rng, cfg.dim)
    perp = x - project_A(g, 5, x)
    assert np.max(np.abs(project_A(g, 5, perp))) <= 1e-10


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), lam=st.floats(1e-2, 1e2))
def test_project_A_conjugation_matches_ridge_oracle(seed, lam):
    rng = np.random.default_rng(seed)
    cfg = GridConfig(n0=2, G=4, L=2, K=1, lam=lam)
    g = random_kernel(cfg, rng)
    t = int(rng.integers(cfg.T))
    x = crandn(rng, cfg.dim)
    assert np.max(np.abs(project_A(g, t, x) - ridge_oracle(g.fibers[t], x, lam))) <= 1e-8


def test_project_A_optimal_against_members(cfg, rng):
    g = random_kernel(cfg, rng)
    w = metric_weights(cfg.lam, cfg.width)
    for t in range(cfg.T):
        x = crandn(rng, cfg.dim)
        best = np.sqrt(wnorm_sq(x - project_A(g, t, x), w))
        for _ in range(10):
            a = crandn(rng, cfg.width)
            cand = np.concatenate([[np.sum(a * np.conj(g.fibers[t]))], a])
            assert best <= np.sqrt(wnorm_sq(x - cand, w)) + 1e-12


def test_filter_zero_kernel(cfg):
    filt = build_filter(SamplingKernel(cfg, np.zeros((cfg.T, cfg.width))))
    assert np.all(filt.d == 0) and np.all(filt.lifted.points == 0)


def test_filter_single_fiber(cfg):
    filt = build_filter(single_fiber_kernel(cfg, 2.0))
    assert np.allclose(filt.d[:, cfg.L], 0.4)
    assert np.allclose(np.delete(filt.d, cfg.L, axis=1), 0)


def test_filter_in_A_and_matches_projection(cfg, rng):
    g = random_kernel(cfg, rng)
    filt = build_filter(g, lam=0.3)
    scalar = np.sum(filt.d * np.conj(g.fibers), axis=1)
    assert np.max(np.abs(filt.lifted.scalar - scalar)) <= 1e-10
    e = np.zeros(cfg.dim)
    e[0] = 1
    for t in range(cfg.T):
        assert np.allclose(filt.lifted.points[t], ridge_oracle(g.fibers[t], e, 0.3), atol=1e-10)


def test_filter_large_lambda_shrinks(cfg, rng):
    fib = crandn(rng, cfg.T, cfg.width)
    fib /= np.sqrt(np.max(np.sum(np.abs(fib) ** 2, axis=1)))
    g = SamplingKernel(cfg, fib)
    filt = build_filter(g, lam=1e6)
    assert np.max(np.linalg.norm(filt.d, axis=1)) <= 1e-5


def test_reconstruct_examples(cfg, rng):
    filt = build_filter(random_kernel(cfg, rng))
    assert np.all(reconstruct(np.zeros(2 * cfg.K + 1), filt).points == 0)
    delta = np.zeros(2 * cfg.K + 1)
    delta[cfg.K] = 1
    assert np.allclose(reconstruct(delta, filt).points, filt.lifted.points, atol=1e-14)


def test_reconstruct_is_pointwise_projection(cfg, rng):
    g = random_kernel(cfg, rng)
    filt = build_filter(g)
    y = crandn(rng, 2 * cfg.K + 1)
    r = reconstruct(y, filt)
    Y = measurement_field(y, cfg)
    w = metric_weights(cfg.lam, cfg.width)
    for t in range(cfg.T):
        best = np.sqrt(wnorm_sq(Y.points[t] - r.points[t], w))
        for _ in range(100):
            a = crandn(rng, cfg.width)
            cand = np.concatenate([[np.sum(a * np.conj(g.fibers[t]))], a])
            assert best <= np.sqrt(wnorm_sq(Y.points[t] - cand, w)) + 1e-12
        # rank-one structure: a multiple of the filter point
        p = filt.lifted.points[t]
        coef = wdot(r.points[t], p, w) / wnorm_sq(p, w)
        assert np.allclose(r.points[t], coef * p, atol=1e-13)


def test_data_residual_examples(cfg, rng):
    filt = build_filter(random_kernel(cfg, rng))
    assert data_residual(np.zeros(2 * cfg.K + 1), filt) == 0
    y = crandn(rng, 2 * cfg.K + 1)
    zero = build_filter(SamplingKernel(cfg, np.zeros((cfg.T, cfg.width))))
    assert data_residual(y, zero) == pytest.approx(sequence_norm_sq(y, cfg.n0), rel=1e-12)


def test_data_residual_direct_quadrature(cfg, rng):
    g = random_kernel(cfg, rng)
    filt = build_filter(g)
    w = metric_weights(cfg.lam, cfg.width)
    for _ in range(5):
        y = crandn(rng, 2 * cfg.K + 1)
        Y = measurement_field(y, cfg)
        direct = sum(wnorm_sq(Y.points[t] - project_A(g, t, Y.points[t]), w) for t in range(cfg.T)) / cfg.G
        assert data_residual(y, filt) == pytest.approx(direct, rel=1e-9)
        assert data_residual(y, filt) == pytest.approx(
            field_norm_sq(Y) - field_norm_sq(reconstruct(y, filt)), rel=1e-9
        )


def test_shrinkage_monotone(cfg, rng):
    g = random_kernel(cfg, rng)
    y = crandn(rng, 2 * cfg.K + 1)
    norms = []
    for lam in (1e-2, 1e-1, 1, 10, 100):
        r = reconstruct(y, build_filter(g, lam))
        norms.append(np.sum(np.abs(r.fiber) ** 2) / cfg.G)
    assert all(b <= a + 1e-12 for a, b in zip(norms, norms[1:]))
