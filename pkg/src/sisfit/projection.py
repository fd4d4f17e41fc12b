"""
Projection onto the kernel-consistent subspace A_xi and regularized lifts.

At a grid point xi, A_xi = {(<a, g_xi>, a)} collects the lifted points whose
scalar part is the measurement the kernel would produce from the fiber ``a``.
It has the Riesz basis (conj(ghat(xi + l n0)), e_l); ordering it as
e_0, e_1, e_-1, e_2, e_-2, ... and orthogonalizing gives the closed form

    v_n = (lam a_n / S_{n-1},  e~_n - sum_{i<n} a_n conj(a_i) / S_{n-1} e~_i),
    |v_n|^2 = lam S_n / S_{n-1},   S_n = |a_0|^2 + ... + |a_n|^2 + lam,

with a_n = <e~_n, g_xi> = conj(ghat(xi + idx(n) n0)).  Projection coefficients
of (x, 0) onto v_n are x conj(a_n) / S_n; the conjugate matters for complex
kernels.
"""

from dataclasses import dataclass

import numpy as np

from .grid import FiberField, FiberVector, metric_weights, trig_series, wdot


def gs_order(L):
    """Fiber indices in Gram-Schmidt order 0, 1, -1, 2, -2, ..., L, -L."""
    out = [0]
    for j in range(1, L + 1):
        out += [j, -j]
    return np.array(out)


@dataclass(frozen=True, eq=False)
class GsRow:
    """Closed-form orthogonal basis of A_xi (or of a sub-span) at one grid point.

    ``v`` holds lifted vectors (scalar first) in the fiber-index layout.
    ``cumulative[n]`` = lam + |a_0|^2 + ... + |a_{n-1}|^2, length order+1.
    """

    indices: np.ndarray
    a: np.ndarray
    v: np.ndarray
    norm_sq: np.ndarray
    cumulative: np.ndarray
    lam: float


def gs_recursion(a, indices, L, lam):
    """Orthogonalize {(a_n, e_{indices[n]})} in the lam-weighted metric."""
    a = np.asarray(a, dtype=complex)
    indices = np.asarray(indices, dtype=int)
    n_terms = a.size
    cumulative = lam + np.concatenate([[0.0], np.cumsum(np.abs(a) ** 2)])
    pos = indices + L + 1  # column in the lifted layout
    v = np.zeros((n_terms, 2 * L + 2), complex)
    for n in range(n_terms):
        v[n, 0] = lam * a[n] / cumulative[n]
        v[n, pos[n]] = 1.0
        v[n, pos[:n]] -= a[n] * np.conj(a[:n]) / cumulative[n]
    norm_sq = lam * cumulative[1:] / cumulative[:-1]
    return GsRow(indices, a, v, norm_sq, cumulative, float(lam))


def gs_basis(g, t, order=None, lam=None):
    """Closed-form Gram-Schmidt basis of A_{xi_t} truncated to ``order`` terms."""
    config = g.config
    lam = config.lam if lam is None else lam
    order = config.width if order is None else order
    if not 1 <= order <= config.width:
        raise ValueError(f"order must lie in [1, {config.width}]")
    idx = gs_order(config.L)[:order]
    a = np.conj(g.fibers[t, idx + config.L])
    return gs_recursion(a, idx, config.L, lam)


def _project_rows(rows_v, rows_norm, target, w):
    coef = wdot(target[None, :], rows_v, w) / rows_norm
    return coef @ rows_v


def project_A(g, t, target, lam=None):
    """Orthogonal projection of a lifted point onto A_{xi_t}."""
    lam = g.config.lam if lam is None else lam
    row = gs_basis(g, t, lam=lam)
    x = target.as_array() if isinstance(target, FiberVector) else np.asarray(target, complex)
    w = metric_weights(lam, g.config.width)
    out = _project_rows(row.v, row.norm_sq, x, w)
    return FiberVector.from_array(out) if isinstance(target, FiberVector) else out


@dataclass(frozen=True, eq=False)
class DenoisingFilter:
    """Per-point projection of (1, 0) onto A_xi; independent of the data.

    ``d`` holds the fiber part d^xi (shape (T, 2L+1)); ``lifted`` the full
    point (<d^xi, g_xi>, d^xi).
    """

    config: object
    kernel: object
    d: np.ndarray
    lifted: FiberField

    @property
    def lam(self):
        return self.config.lam

    def energy(self):
        """w(xi_t) = |lifted point|^2 per grid point."""
        return self.lifted.pointwise_norm_sq()

    def scale(self):
        return float(np.sqrt(np.max(self.energy(), initial=0.0)))


def build_filter(g, lam=None):
    """Project (1, 0) onto every A_{xi_t} with the closed-form recursion.

    P(1, 0) = sum_n conj(a_n) / S_n * v_n; the series stops at 2L+1 terms
    because the kernel is stored only on indices -L..L.
    """
    config = g.config if lam is None else g.config.with_lam(lam)
    lam = config.lam
    idx = gs_order(config.L)
    points = np.zeros((config.T, config.dim), complex)
    for t in range(config.T):
        row = gs_recursion(np.conj(g.fibers[t, idx + config.L]), idx, config.L, lam)
        points[t] = (np.conj(row.a) / row.cumulative[1:]) @ row.v
    lifted = FiberField(config, points)
    return DenoisingFilter(config, g, lifted.fiber.copy(), lifted)


def measurement_series(y, config):
    """a(xi_t) = sum_k y_k exp(-2 pi i k xi_t / n0) for one or many sequences."""
    return trig_series(y, config)


def reconstruct(y, filt):
    """Fiber image of the regularized least-squares lift of one measurement sequence."""
    a = measurement_series(y, filt.config)
    return FiberField(filt.config, a[:, None] * filt.lifted.points)


def measurement_field(y, config):
    """Fiber image of Y = (y, 0)."""
    pts = np.zeros((config.T, config.dim), complex)
    pts[:, 0] = measurement_series(y, config)
    return FiberField(config, pts)


def data_residual(y, filt, tol=1e-9):
    """|Y - P Y|^2 for the projection onto all lifted functions.

    By Pythagoras this is |Y|^2 - |reconstruct(y)|^2.
    """
    config = filt.config
    a = measurement_series(y, config)
    total = float(np.sum(np.abs(a) ** 2) / config.G)
    kept = float(np.sum(np.abs(a) ** 2 * filt.energy()) / config.G)
    r = total - kept
    if r < -tol * max(1.0, total):
        raise ArithmeticError(f"negative data residual {r:.3e}")
    return max(r, 0.0)
