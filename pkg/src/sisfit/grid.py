"""
Discretized fiber-domain representation.

Frequencies in [0, n0) are replaced by the midpoint grid xi_t = (t + 1/2) / G,
t = 0, ..., n0*G - 1.  At every grid point a lifted object is a pair

    (scalar, fiber) in C x_lam l2,   fiber indices l = -L, ..., L,

with inner product <(a, u), (b, v)> = a conj(b) + lam * <u, v>.  A point is
stored as a length 2L+2 complex vector ``[scalar, fiber[-L], ..., fiber[L]]``;
``metric_weights`` gives the diagonal of the metric in that layout.

Measurement sequences live on [-K, K] and enter the fiber domain through the
trigonometric series sum_k c_k exp(-2 pi i k xi / n0).  On the midpoint grid
(1/G) sum_t |series|^2 = n0 * sum_k |c_k|^2, so the measurement part of the
lifted norm carries the factor n0 (``sequence_norm_sq``); with that weight the
fiber map is an exact isometry.
"""

from dataclasses import dataclass

import numpy as np


class ConfigMismatchError(ValueError):
    """Two objects were built on different grids."""


class InconsistentFieldError(ValueError):
    """A scalar track is not a trigonometric polynomial of degree <= K."""


@dataclass(frozen=True)
class GridConfig:
    n0: int
    G: int
    L: int
    K: int
    lam: float = 1.0

    def __post_init__(self):
        if self.n0 < 1 or self.G < 1:
            raise ValueError("n0 and G must be positive")
        if self.L < 0 or self.K < 0:
            raise ValueError("L and K must be nonnegative")
        if not self.lam > 0:
            raise ValueError("lam must be positive")
        if self.n0 * self.G < 2 * self.K + 1:
            raise ValueError(
                f"grid too coarse: n0*G = {self.n0 * self.G} < 2K+1 = {2 * self.K + 1}"
            )

    @property
    def T(self):
        """Number of grid points on [0, n0)."""
        return self.n0 * self.G

    @property
    def width(self):
        """Number of stored fiber coefficients."""
        return 2 * self.L + 1

    @property
    def dim(self):
        """Length of a lifted point vector (scalar + fiber)."""
        return 2 * self.L + 2

    @property
    def xi(self):
        return (np.arange(self.T) + 0.5) / self.G

    @property
    def fiber_indices(self):
        return np.arange(-self.L, self.L + 1)

    @property
    def seq_indices(self):
        return np.arange(-self.K, self.K + 1)

    def band_of(self, t):
        """Band index k with xi_t in [k, k+1)."""
        return np.asarray(t) // self.G

    def point(self, t_base, k):
        """Grid index of xi_{t_base} + k."""
        return t_base + k * self.G

    def with_lam(self, lam):
        return GridConfig(self.n0, self.G, self.L, self.K, float(lam))

    def to_dict(self):
        return {"n0": self.n0, "G": self.G, "L": self.L, "K": self.K, "lambda": self.lam}

    @classmethod
    def from_dict(cls, d):
        return cls(int(d["n0"]), int(d["G"]), int(d["L"]), int(d["K"]), float(d["lambda"]))


def same_grid(a, b):
    """Grids agree up to the regularization weight."""
    return (a.n0, a.G, a.L, a.K) == (b.n0, b.G, b.L, b.K)


def check_grid(*configs):
    first = configs[0]
    for c in configs[1:]:
        if not same_grid(first, c):
            raise ConfigMismatchError(f"grid mismatch: {first} vs {c}")


def metric_weights(lam, width):
    w = np.full(width + 1, float(lam))
    w[0] = 1.0
    return w


@dataclass(frozen=True, eq=False)
class FiberVector:
    """One element of C x_lam l2 (truncated to indices -L..L)."""

    scalar: complex
    fiber: np.ndarray

    def __post_init__(self):
        fib = np.asarray(self.fiber, dtype=complex)
        if fib.ndim != 1:
            raise ValueError("fiber must be one-dimensional")
        if not (np.isfinite(fib).all() and np.isfinite(self.scalar)):
            raise ValueError("non-finite entries")
        object.__setattr__(self, "fiber", fib)
        object.__setattr__(self, "scalar", complex(self.scalar))

    def as_array(self):
        return np.concatenate([[self.scalar], self.fiber])

    @classmethod
    def from_array(cls, v):
        v = np.asarray(v, dtype=complex)
        return cls(v[0], v[1:])

    def norm_sq(self, lam):
        return weighted_inner_product(self, self, lam).real


def weighted_inner_product(u, v, lam):
    """<u, v> = u.scalar conj(v.scalar) + lam * sum_l u_l conj(v_l)."""
    if u.fiber.shape != v.fiber.shape:
        raise ValueError("fiber lengths differ")
    return u.scalar * np.conj(v.scalar) + lam * np.vdot(v.fiber, u.fiber)


def wdot(x, y, w):
    """Weighted inner product over the last axis, conjugate-linear in ``y``."""
    return np.sum(w * x * np.conj(y), axis=-1)


def wnorm_sq(x, w):
    return np.sum(w * np.abs(x) ** 2, axis=-1)


@dataclass(frozen=True, eq=False)
class FiberizedSignal:
    """Fourier samples fhat(xi_t + l*n0) of a band-limited f, shape (T, 2L+1)."""

    config: GridConfig
    fibers: np.ndarray

    def __post_init__(self):
        fib = np.asarray(self.fibers, dtype=complex)
        if fib.shape != (self.config.T, self.config.width):
            raise ValueError(
                f"fibers must have shape {(self.config.T, self.config.width)}, got {fib.shape}"
            )
        if not np.isfinite(fib).all():
            raise ValueError("non-finite fiber entries")
        object.__setattr__(self, "fibers", fib)

    @classmethod
    def zeros(cls, config):
        return cls(config, np.zeros((config.T, config.width), complex))

    def norm_sq(self):
        return float(np.sum(np.abs(self.fibers) ** 2) / self.config.G)

    def __add__(self, other):
        check_grid(self.config, other.config)
        return FiberizedSignal(self.config, self.fibers + other.fibers)

    def __mul__(self, alpha):
        return FiberizedSignal(self.config, alpha * self.fibers)

    __rmul__ = __mul__


@dataclass(frozen=True, eq=False)
class FiberField:
    """Grid-indexed family of lifted points; ``points`` has shape (T, 2L+2)."""

    config: GridConfig
    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=complex)
        if pts.shape != (self.config.T, self.config.dim):
            raise ValueError(
                f"points must have shape {(self.config.T, self.config.dim)}, got {pts.shape}"
            )
        if not np.isfinite(pts).all():
            raise ValueError("non-finite field entries")
        object.__setattr__(self, "points", pts)

    @classmethod
    def zeros(cls, config):
        return cls(config, np.zeros((config.T, config.dim), complex))

    @classmethod
    def from_parts(cls, config, scalar, fiber):
        pts = np.empty((config.T, config.dim), complex)
        pts[:, 0] = scalar
        pts[:, 1:] = fiber
        return cls(config, pts)

    @property
    def scalar(self):
        return self.points[:, 0]

    @property
    def fiber(self):
        return self.points[:, 1:]

    @property
    def weights(self):
        return metric_weights(self.config.lam, self.config.width)

    def __getitem__(self, t):
        return FiberVector.from_array(self.points[t])

    def __len__(self):
        return self.config.T

    def pointwise_norm_sq(self):
        return wnorm_sq(self.points, self.weights)

    def __add__(self, other):
        check_grid(self.config, other.config)
        return FiberField(self.config, self.points + other.points)

    def __sub__(self, other):
        check_grid(self.config, other.config)
        return FiberField(self.config, self.points - other.points)

    def __mul__(self, alpha):
        alpha = np.asarray(alpha)
        if alpha.ndim == 1:
            alpha = alpha[:, None]
        return FiberField(self.config, alpha * self.points)

    __rmul__ = __mul__


def _exponentials(config):
    # E[t, k] = exp(-2 pi i k xi_t / n0), k = -K..K
    return np.exp(-2j * np.pi * np.outer(config.xi, config.seq_indices) / config.n0)


def trig_series(c, config):
    """Evaluate sum_k c_k exp(-2 pi i k xi_t / n0) on the grid.

    ``c`` may be a single sequence of length 2K+1 or a stack (m, 2K+1).
    """
    c = np.asarray(c, dtype=complex)
    if c.shape[-1] != 2 * config.K + 1:
        raise ValueError(f"sequence length {c.shape[-1]} != 2K+1 = {2 * config.K + 1}")
    return c @ _exponentials(config).T


def trig_coefficients(values, config):
    """Coefficients c_k, |k| <= K, of a scalar track, plus the out-of-degree energy.

    The residual energy is (1/G) sum_t |values - series(c)|^2, i.e. the part of
    the track the degree-K series cannot represent.
    """
    values = np.asarray(values, dtype=complex)
    E = _exponentials(config)
    c = values @ np.conj(E) / config.T
    resid = values - c @ E.T
    return c, float(np.sum(np.abs(resid) ** 2, axis=-1).max(initial=0.0) / config.G)


def sequence_norm_sq(c, n0):
    """Measurement-side norm that makes the fiber map isometric: n0 * sum |c_k|^2."""
    return float(n0 * np.sum(np.abs(np.asarray(c)) ** 2))


def fiber_map(c, f):
    """Lift a pair (c, f) to the fiber domain."""
    config = f.config
    return FiberField.from_parts(config, trig_series(c, config), f.fibers)


def inverse_fiber_map(field, tol=1e-8):
    """Recover (c, f) from a field whose scalar track has degree <= K."""
    config = field.config
    c, resid = trig_coefficients(field.scalar, config)
    total = float(np.sum(np.abs(field.scalar) ** 2) / config.G)
    if resid > tol * max(1.0, total):
        raise InconsistentFieldError(
            f"scalar track has energy {resid:.3e} above degree K={config.K}"
        )
    return c, FiberizedSignal(config, field.fiber.copy())


def lift(f, g):
    """Fiber image of the lifted function: (sum_l fhat conj(ghat), fhat) per point."""
    check_grid(f.config, g.config)
    scalar = np.sum(f.fibers * np.conj(g.fibers), axis=1)
    return FiberField.from_parts(f.config, scalar, f.fibers)


def field_norm_sq(field):
    return float(np.sum(field.pointwise_norm_sq()) / field.config.G)


def field_inner(a, b):
    check_grid(a.config, b.config)
    return complex(np.sum(wdot(a.points, b.points, a.weights)) / a.config.G)


def translate(f, k):
    """Integer translate T_k f: fibers times exp(-2 pi i k (xi_t + l n0))."""
    config = f.config
    freq = config.xi[:, None] + config.n0 * config.fiber_indices[None, :]
    return FiberizedSignal(config, f.fibers * np.exp(-2j * np.pi * k * freq))
