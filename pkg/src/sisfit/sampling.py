"""
Sampling kernels, the sampling operator and synthetic measurement data.

Measurements of f are the coefficients y_k, |k| <= K, of the scalar track of
the lifted f, so that sum_k y_k exp(-2 pi i k xi / n0) = sum_l fhat ghat^*
holds exactly on the grid.  This keeps ``fiber_map(sample(f, g), f)`` equal to
``lift(f, g)``.
"""

from dataclasses import dataclass

import numpy as np

from .grid import (
    FiberizedSignal,
    check_grid,
    lift,
    trig_coefficients,
    translate,
)


class UnderResolvedError(ValueError):
    """The measurement series needs more than 2K+1 coefficients."""

    def __init__(self, residual, K):
        super().__init__(
            f"measurements not representable with K={K}: out-of-band energy {residual:.3e}"
        )
        self.residual = residual
        self.K = K


@dataclass(frozen=True, eq=False)
class SamplingKernel:
    """Fiberized kernel ghat(xi_t + l n0) with its bound M = max_t sum_l |ghat|^2."""

    config: object
    fibers: np.ndarray
    bound_M: float = None

    def __post_init__(self):
        fib = np.asarray(self.fibers, dtype=complex)
        if fib.shape != (self.config.T, self.config.width):
            raise ValueError(
                f"kernel fibers must have shape {(self.config.T, self.config.width)}"
            )
        if not np.isfinite(fib).all():
            raise ValueError("kernel has non-finite fiber entries")
        object.__setattr__(self, "fibers", fib)
        object.__setattr__(self, "bound_M", _bound(fib))

    def as_signal(self):
        return FiberizedSignal(self.config, self.fibers)

    def fiber_norm_sq(self):
        """sum_l |ghat(xi_t + l n0)|^2 per grid point."""
        return np.sum(np.abs(self.fibers) ** 2, axis=1)


def _bound(fibers):
    return float(np.max(np.sum(np.abs(fibers) ** 2, axis=1), initial=0.0))


def verify_kernel_bound(g):
    """Return M = max_t sum_l |ghat(xi_t + l n0)|^2 (finite by construction)."""
    if not np.isfinite(g.fibers).all():
        raise ValueError("kernel has non-finite fiber entries")
    return _bound(g.fibers)


@dataclass(frozen=True, eq=False)
class MeasurementSet:
    """m complex sequences on [-K, K]; ``sequences`` has shape (m, 2K+1)."""

    config: object
    sequences: np.ndarray

    def __post_init__(self):
        seq = np.atleast_2d(np.asarray(self.sequences, dtype=complex))
        if seq.ndim != 2 or seq.shape[1] != 2 * self.config.K + 1:
            raise ValueError(f"sequences must have shape (m, {2 * self.config.K + 1})")
        if seq.shape[0] < 1:
            raise ValueError("need at least one measurement sequence")
        if not np.isfinite(seq).all():
            raise ValueError("non-finite measurements")
        object.__setattr__(self, "sequences", seq)

    @property
    def m(self):
        return self.sequences.shape[0]

    def __iter__(self):
        return iter(self.sequences)

    def __getitem__(self, j):
        return self.sequences[j]


def sample(f, g, tol=1e-8):
    """Measurements y_k, |k| <= K, of f taken with kernel g.

    Raises
    ------
    UnderResolvedError
        If the scalar track of ``lift(f, g)`` has more than ``tol`` (relative)
        energy outside degree K.
    """
    check_grid(f.config, g.config)
    scalar = lift(f, g).scalar
    y, resid = trig_coefficients(scalar, f.config)
    total = float(np.sum(np.abs(scalar) ** 2) / f.config.G)
    if resid > tol * max(1.0, total):
        raise UnderResolvedError(resid, f.config.K)
    return y


def random_smooth_fibers(config, degree, rng, decay=0.6):
    """Fibers whose every column is a trigonometric polynomial in xi of given degree.

    Products of two such fiber sets have scalar tracks of degree <= 2*degree, so
    they can be sampled exactly once K >= 2*degree.  ``decay`` damps the outer
    fiber indices so the kernel looks like a low-pass filter.
    """
    q = np.arange(-degree, degree + 1)
    coef = rng.normal(size=(config.width, q.size)) + 1j * rng.normal(size=(config.width, q.size))
    coef *= (decay ** np.abs(config.fiber_indices))[:, None] / np.sqrt(2 * q.size)
    E = np.exp(-2j * np.pi * np.outer(config.xi, q) / config.n0)
    return E @ coef.T


def smooth_kernel(config, degree=1, seed=0):
    return SamplingKernel(config, random_smooth_fibers(config, degree, np.random.default_rng(seed)))


def synthesize(model, coefficients, g, noise=None, seed=0):
    """Build signals from integer translates of the model's generators and sample them.

    Parameters
    ----------
    model : SisModel
        Must carry its source generators (``model.sources``).
    coefficients : array_like, shape (m, r, 2P+1) or (r, 2P+1)
        Weight of T_k phi_i for k = -P..P; one block per synthesized signal.
    g : SamplingKernel
    noise : None, float or array_like (m, 2K+1)
        Explicit additive noise sequences, or a standard deviation for seeded
        complex Gaussian noise.
    seed : int

    Returns
    -------
    (tuple of FiberizedSignal, MeasurementSet)
    """
    config = g.config
    check_grid(model.config, config)
    if model.sources is None:
        raise ValueError("model has no source generators to synthesize from")
    coef = np.asarray(coefficients, dtype=complex)
    if coef.ndim == 2:
        coef = coef[None]
    if coef.ndim != 3 or coef.shape[1] != len(model.sources) or coef.shape[2] % 2 != 1:
        raise ValueError("coefficients must have shape (m, r, 2P+1) with r generators")
    P = coef.shape[2] // 2
    if P * config.n0 > config.K:
        raise ValueError(
            f"translates up to {P} shift measurements by {P * config.n0} > K={config.K}"
        )

    rng = np.random.default_rng(seed)
    signals, seqs = [], []
    for block in coef:
        f = FiberizedSignal.zeros(config)
        for i, phi in enumerate(model.sources):
            for k in range(-P, P + 1):
                if block[i, k + P] != 0:
                    f = f + block[i, k + P] * translate(phi, k)
        signals.append(f)
        seqs.append(sample(f, g))
    y = np.array(seqs)

    if noise is not None:
        if np.isscalar(noise):
            shape = y.shape
            y = y + float(noise) * (rng.normal(size=shape) + 1j * rng.normal(size=shape)) / np.sqrt(2)
        else:
            y = y + np.asarray(noise, dtype=complex).reshape(y.shape)
    return tuple(signals), MeasurementSet(config, y)
