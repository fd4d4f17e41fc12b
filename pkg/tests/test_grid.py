import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sisfit import (
    ConfigMismatchError,
    FiberField,
    FiberVector,
    FiberizedSignal,
    GridConfig,
    InconsistentFieldError,
    field_norm_sq,
    fiber_map,
    inverse_fiber_map,
    lift,
    translate,
    weighted_inner_product,
)
from sisfit.bands import band_project
from sisfit.grid import sequence_norm_sq

from conftest import crandn, random_kernel, random_signal, single_fiber_kernel


def test_config_rejects_coarse_grid():
    with pytest.raises(ValueError, match="too coarse"):
        GridConfig(n0=1, G=4, L=1, K=2)
    with pytest.raises(ValueError):
        GridConfig(n0=2, G=8, L=1, K=1, lam=0.0)


def test_config_round_trip(cfg):
    assert GridConfig.from_dict(cfg.to_dict()) == cfg
    assert cfg.T == 16 and cfg.width == 5 and cfg.dim == 6
    assert np.allclose(cfg.xi[:2], [1 / 16, 3 / 16])


def test_fiber_map_zero(cfg):
    fld = fiber_map(np.zeros(2 * cfg.K + 1), FiberizedSignal.zeros(cfg))
    assert np.all(fld.points == 0)


def test_fiber_map_delta(cfg):
    c = np.zeros(2 * cfg.K + 1)
    c[cfg.K] = 1
    fld = fiber_map(c, FiberizedSignal.zeros(cfg))
    assert np.allclose(fld.scalar, 1, atol=1e-15)
    assert np.all(fld.fiber == 0)


def test_fiber_map_parseval(rng):
    # Frozen: on the midpoint grid the exponential system has norm^2 n0 per
    # coefficient, so the measurement part of the field norm is n0 * sum |c|^2.
    cfg = GridConfig(n0=2, G=8, L=1, K=3)
    c = crandn(rng, 7)
    fld = fiber_map(c, FiberizedSignal.zeros(cfg))
    expected = 2 * np.sum(np.abs(c) ** 2)
    assert abs(field_norm_sq(fld) - expected) <= 1e-10 * expected
    assert abs(sequence_norm_sq(c, 2) - expected) <= 1e-12 * expected


@settings(max_examples=40, deadline=None)
@given(
    n0=st.integers(1, 3),
    G=st.sampled_from([8, 16]),
    L=st.integers(0, 3),
    lam=st.floats(1e-3, 1e3),
    seed=st.integers(0, 2**32 - 1),
)
def test_isometry_and_round_trip(n0, G, L, lam, seed):
    K = min(8, (n0 * G - 1) // 2)
    cfg = GridConfig(n0, G, L, K, lam)
    rng = np.random.default_rng(seed)
    c = crandn(rng, 2 * K + 1)
    f = random_signal(cfg, rng)
    fld = fiber_map(c, f)
    expected = sequence_norm_sq(c, n0) + lam * f.norm_sq()
    assert abs(field_norm_sq(fld) - expected) <= 1e-10 * (1 + expected)
    c2, f2 = inverse_fiber_map(fld)
    assert np.max(np.abs(c2 - c)) <= 1e-10
    assert np.max(np.abs(f2.fibers - f.fibers)) <= 1e-10


def test_inverse_rejects_high_degree(cfg):
    scalar = np.exp(-2j * np.pi * (cfg.K + 1) * cfg.xi / cfg.n0)
    fld = FiberField.from_parts(cfg, scalar, np.zeros((cfg.T, cfg.width)))
    with pytest.raises(InconsistentFieldError):
        inverse_fiber_map(fld)


def test_inverse_zero(cfg):
    c, f = inverse_fiber_map(FiberField.zeros(cfg))
    assert np.all(c == 0) and np.all(f.fibers == 0)


def test_lift_examples(cfg, rng):
    g = single_fiber_kernel(cfg)
    f = random_signal(cfg, rng)
    assert np.allclose(lift(f, g).scalar, f.fibers[:, cfg.L])
    assert np.all(lift(FiberizedSignal.zeros(cfg), g).points == 0)

    gk = random_kernel(cfg, rng)
    auto = lift(gk.as_signal(), gk).scalar
    direct = np.array([sum(abs(v) ** 2 for v in row) for row in gk.fibers])
    assert np.max(np.abs(auto.imag)) <= 1e-12
    assert np.allclose(auto.real, direct, rtol=1e-12)


def test_lift_config_mismatch(cfg, rng):
    other = GridConfig(cfg.n0, cfg.G, cfg.L + 1, cfg.K)
    with pytest.raises(ConfigMismatchError):
        lift(random_signal(cfg, rng), random_kernel(other, rng))


def test_weighted_inner_product_examples():
    e0 = np.array([1.0])
    assert weighted_inner_product(FiberVector(1, [0]), FiberVector(1, [0]), 1.0) == 1
    assert weighted_inner_product(FiberVector(0, e0), FiberVector(0, e0), 2.0) == 2
    u, v = FiberVector(1, e0), FiberVector(1j, e0)
    assert weighted_inner_product(u, v, 1.0) == pytest.approx(1 - 1j)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), lam=st.floats(1e-2, 1e2))
def test_inner_product_hermitian_and_positive(seed, lam):
    rng = np.random.default_rng(seed)
    u = FiberVector(complex(*rng.normal(size=2)), crandn(rng, 5))
    v = FiberVector(complex(*rng.normal(size=2)), crandn(rng, 5))
    assert weighted_inner_product(u, v, lam) == pytest.approx(np.conj(weighted_inner_product(v, u, lam)))
    assert u.norm_sq(lam) > 0


def test_field_norm_quadrature():
    cfg = GridConfig(n0=1, G=4, L=0, K=0)
    fld = FiberField.zeros(cfg)
    pts = fld.points.copy()
    pts[2, 0] = 1
    assert field_norm_sq(FiberField(cfg, pts)) == 0.25
    assert field_norm_sq(FiberField.zeros(cfg)) == 0


def test_translation_covariance(cfg, rng):
    f = random_signal(cfg, rng)
    g = random_kernel(cfg, rng)
    for k in (-2, 1, 3):
        lhs = lift(translate(f, k), g).points
        rhs = np.exp(-2j * np.pi * k * cfg.xi)[:, None] * lift(f, g).points
        assert np.max(np.abs(lhs - rhs)) <= 1e-10


def test_band_mask_covariance(cfg, rng):
    f = random_signal(cfg, rng)
    g = random_kernel(cfg, rng)
    for i in range(cfg.n0):
        lhs = lift(band_project(f, i), g)
        rhs = band_project(lift(f, g), i)
        assert np.array_equal(lhs.points, rhs.points)
