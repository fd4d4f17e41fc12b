"""
Bands, discrete range functions and shift-invariant models.

Band k is B_k = [k, k+1) + n0 Z.  On the grid it is the block of points
t = k*G, ..., (k+1)*G - 1, and the base point t_b in [0, G) is paired with
t_b + k*G in every band.

A ``SisModel`` stores its range function extensionally: for every grid point
an orthonormal (lam-weighted) set of lifted vectors spanning J(xi_t).  Since
each grid point lies in exactly one band, the per-band decomposition
V = V_0 + ... + V_{n0-1} is implicit in the storage.
"""

from dataclasses import dataclass, field

import numpy as np

from .grid import (
    ConfigMismatchError,
    FiberField,
    FiberizedSignal,
    check_grid,
    lift,
    metric_weights,
    wdot,
)

CLASS_TAGS = ("extra-invariant", "paley-wiener", "generic")
RANK_RTOL = 1e-8
RANK_ATOL = 1e-14


def orthonormalize(vectors, w, rtol=RANK_RTOL, atol=RANK_ATOL):
    """Orthonormal basis (rows) of span(vectors) in the metric diag(w).

    Directions with singular value below ``rtol * s_max`` (or ``atol``) are
    dropped.
    """
    vectors = np.asarray(vectors, dtype=complex)
    if vectors.size == 0:
        return np.zeros((0, w.size), complex)
    sw = np.sqrt(w)
    _, s, vh = np.linalg.svd(vectors * sw, full_matrices=False)
    if s.size == 0 or s[0] <= atol:
        return np.zeros((0, w.size), complex)
    keep = s > max(rtol * s[0], atol)
    return vh[keep] / sw


def band_mask(config, k):
    if not 0 <= k < config.n0:
        raise ValueError(f"band index {k} outside [0, {config.n0})")
    return config.band_of(np.arange(config.T)) == k


def band_project(x, k):
    """Zero every grid point outside band k (works on signals and fields)."""
    mask = band_mask(x.config, k)
    if isinstance(x, FiberizedSignal):
        return FiberizedSignal(x.config, x.fibers * mask[:, None])
    if isinstance(x, FiberField):
        return FiberField(x.config, x.points * mask[:, None])
    raise TypeError(f"cannot band-project {type(x).__name__}")


@dataclass(frozen=True, eq=False)
class SisModel:
    """A shift-invariant model given by its discrete range function.

    Parameters
    ----------
    config : GridConfig
        Grid; ``config.lam`` fixes the metric used for orthonormality.
    bases : tuple of ndarray
        ``bases[t]`` has shape (r_t, 2L+2): orthonormal lifted vectors spanning
        J(xi_t).  r_t may be zero.
    class_tag : str
    sources : tuple of FiberizedSignal, optional
        Generators the model was built from, if known (used for synthesis).
    """

    config: object
    bases: tuple
    class_tag: str = "extra-invariant"
    sources: tuple = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.class_tag not in CLASS_TAGS:
            raise ValueError(f"unknown class tag {self.class_tag!r}")
        if len(self.bases) != self.config.T:
            raise ValueError("need one basis per grid point")
        bases = []
        for b in self.bases:
            b = np.asarray(b, dtype=complex).reshape(-1, self.config.dim)
            if not np.isfinite(b).all():
                raise ValueError("non-finite basis entries")
            bases.append(b)
        object.__setattr__(self, "bases", tuple(bases))

    @classmethod
    def from_spanning_sets(cls, config, sets, class_tag="extra-invariant", sources=None, meta=None):
        """Orthonormalize arbitrary per-point spanning sets."""
        w = metric_weights(config.lam, config.width)
        bases = tuple(orthonormalize(np.reshape(s, (-1, config.dim)), w) for s in sets)
        return cls(config, bases, class_tag, sources, dict(meta or {}))

    @classmethod
    def from_generators(cls, g, generators, class_tag="generic"):
        """Model V(phi_1, ..., phi_r) with J(xi) = span of the lifted generators."""
        config = g.config
        lifted = [lift(phi, g) for phi in generators]
        for f in lifted:
            check_grid(config, f.config)
        sets = [np.array([f.points[t] for f in lifted]) for t in range(config.T)]
        return cls.from_spanning_sets(config, sets, class_tag, tuple(generators))

    @classmethod
    def empty(cls, config, class_tag="extra-invariant"):
        return cls(config, tuple(np.zeros((0, config.dim), complex) for _ in range(config.T)), class_tag)

    @property
    def weights(self):
        return metric_weights(self.config.lam, self.config.width)

    def dims(self):
        return np.array([b.shape[0] for b in self.bases])

    @property
    def band_masks(self):
        """Boolean (n0, T): band k carries a nontrivial fiber space at t."""
        c = self.config
        bands = c.band_of(np.arange(c.T))
        return (bands[None, :] == np.arange(c.n0)[:, None]) & (self.dims() > 0)[None, :]

    def orthonormality_error(self):
        w = self.weights
        err = 0.0
        for b in self.bases:
            if b.shape[0]:
                gram = (b * w) @ np.conj(b).T
                err = max(err, float(np.max(np.abs(gram - np.eye(b.shape[0])))))
        return err


def project_point(basis, x, w):
    """Orthogonal projection of ``x`` onto the span of orthonormal rows ``basis``."""
    if basis.shape[0] == 0:
        return np.zeros_like(x)
    return wdot(x[None, :], basis, w) @ basis


def range_project(model, fld):
    """Project a field pointwise onto the model's range function."""
    check_grid(model.config, fld.config)
    if not np.isclose(model.config.lam, fld.config.lam, rtol=1e-12, atol=0):
        raise ConfigMismatchError(
            f"model metric lam={model.config.lam} differs from field lam={fld.config.lam}"
        )
    w = metric_weights(fld.config.lam, fld.config.width)
    out = np.array([project_point(b, x, w) for b, x in zip(model.bases, fld.points)])
    return FiberField(fld.config, out.reshape(fld.points.shape))


def model_length(model):
    """max over base points of sum_k dim J(xi_t + k)."""
    c = model.config
    return int(model.dims().reshape(c.n0, c.G).sum(axis=0).max(initial=0))


def active_bands(model, t_base):
    """Bands k with J(xi_{t_base} + k) nontrivial, increasing."""
    c = model.config
    if not 0 <= t_base < c.G:
        raise ValueError(f"base index {t_base} outside [0, {c.G})")
    dims = model.dims()
    return tuple(k for k in range(c.n0) if dims[c.point(t_base, k)] > 0)


def kernel_consistency_error(model, g):
    """Largest |scalar - <fiber, g_xi>| over all stored vectors.

    Zero means every J(xi_t) lies inside A_xi_t, i.e. the model really is the
    lift of a function space for this kernel.
    """
    err = 0.0
    for t, b in enumerate(model.bases):
        if b.shape[0]:
            pred = b[:, 1:] @ np.conj(g.fibers[t])
            err = max(err, float(np.max(np.abs(b[:, 0] - pred))))
    return err


def extra_invariance_error(model, generators, g):
    """Largest residual of a band-masked generator lift outside the model.

    A space is Z/n0-extra-invariant iff every band component f^k of every
    member stays in it; checking the generators' band components against the
    stored range function is the fiber form of that criterion.
    """
    err = 0.0
    for phi in generators:
        fld = lift(phi, g)
        fld = FiberField(model.config, fld.points)
        for k in range(model.config.n0):
            part = band_project(fld, k)
            r = part - range_project(model, part)
            err = max(err, float(np.sqrt(np.max(r.pointwise_norm_sq(), initial=0.0))))
    return err
