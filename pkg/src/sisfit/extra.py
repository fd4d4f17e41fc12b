"""
Optimal Z/n0-extra-invariant models of length at most l.

Every regularized lift is a pointwise multiple of the denoising filter,

    Gamma f_{Y,j}(xi) = a_j(xi) * (<d^xi, g_xi>, d^xi),

so the band Gramian at (k, xi) is w * c c^H with c_j = a_j(xi + k) and
w = |filter point|^2.  It has rank one: lambda_1 = w |c|^2, all others zero,
and the optimal one-dimensional fiber space in band k is the filter direction
wherever lambda_1 != 0.  The per-band optimum U keeps that direction in every
band; when n0 > l, W keeps at each base point only the l bands carrying the
largest captured energy.
"""

from dataclasses import dataclass

import numpy as np

from .bands import SisModel, model_length, range_project
from .grid import field_norm_sq, metric_weights, wnorm_sq
from .projection import measurement_field, measurement_series, reconstruct

ZERO_RTOL = 1e-12


def band_coefficients(Y, filt):
    """c[k, t_base, j] = a_j(xi_{t_base} + k)."""
    c = filt.config
    a = measurement_series(Y.sequences, c)  # (m, T)
    return a.reshape(Y.m, c.n0, c.G).transpose(1, 2, 0)


def band_energy_weights(filt):
    """w[k, t_base] = |filter point at xi_{t_base} + k|^2."""
    c = filt.config
    return filt.energy().reshape(c.n0, c.G)


def band_gramian(Y, filt, k, t_base):
    """Gramian <F_i, F_j> of the band-k lifts at xi_{t_base} + k."""
    c = band_coefficients(Y, filt)[k, t_base]
    w = band_energy_weights(filt)[k, t_base]
    return w * np.outer(c, np.conj(c))


@dataclass(frozen=True, eq=False)
class BandSpectrum:
    """Band Gramians and their (analytic) eigen-data, indexed [k, t_base]."""

    gramians: np.ndarray
    eigenvalues: np.ndarray
    top_vector: np.ndarray
    coefficients: np.ndarray
    weights: np.ndarray


def band_spectrum(Y, filt):
    c = band_coefficients(Y, filt)
    w = band_energy_weights(filt)
    gram = w[..., None, None] * c[..., :, None] * np.conj(c[..., None, :])
    csq = np.sum(np.abs(c) ** 2, axis=-1)
    eig = np.zeros(c.shape)
    eig[..., 0] = w * csq
    norm = np.sqrt(csq)
    top = np.zeros_like(c)
    nz = norm > 0
    top[nz] = c[nz] / norm[nz][:, None]
    return BandSpectrum(gram, eig, top, c, w)


def zero_threshold(filt):
    return ZERO_RTOL * filt.scale() ** 2


@dataclass(frozen=True, eq=False)
class BandGenerator:
    """Optimal single generator for band k.

    ``mask[t_base]`` marks membership of xi_{t_base} + k in C_k, ``energies``
    the captured energy sum_j |P (Gamma f^k_{Y,j})|^2 there, and ``vectors``
    the unit lifted fiber (zero off the mask), shape (G, 2L+2).
    """

    k: int
    mask: np.ndarray
    energies: np.ndarray
    vectors: np.ndarray


def per_band_generator(Y, filt, k, spectrum=None):
    spec = band_spectrum(Y, filt) if spectrum is None else spectrum
    cfg = filt.config
    tau = zero_threshold(filt)
    w = spec.weights[k]
    csq = np.sum(np.abs(spec.coefficients[k]) ** 2, axis=-1)
    mask = (w > tau) & (csq > tau)
    pts = filt.lifted.points[k * cfg.G:(k + 1) * cfg.G]
    vectors = np.zeros_like(pts)
    vectors[mask] = pts[mask] / np.sqrt(w[mask])[:, None]
    energies = np.where(mask, spec.eigenvalues[k, :, 0], 0.0)
    return BandGenerator(k, mask, energies, vectors)


def select_bands(energies, l):
    """Per base point, the min(l, n0) bands of largest energy; ties to smaller index.

    ``energies`` has shape (G, n0); returns a tuple of increasing index tuples.
    """
    energies = np.atleast_2d(np.asarray(energies, dtype=float))
    n0 = energies.shape[1]
    size = min(l, n0)
    out = []
    for row in energies:
        order = np.argsort(-row, kind="stable")
        out.append(tuple(sorted(int(i) for i in order[:size])))
    return tuple(out)


def _model_from_generators(cfg, gens, keep):
    """keep[k][t_base] -> store gens[k].vectors[t_base] at point t_base + k G."""
    bases = []
    for t in range(cfg.T):
        k, tb = divmod(t, cfg.G)
        gen = gens[k]
        if keep[k][tb] and gen.mask[tb]:
            bases.append(gen.vectors[tb][None, :])
        else:
            bases.append(np.zeros((0, cfg.dim), complex))
    return SisModel(cfg, tuple(bases), "extra-invariant")


@dataclass(frozen=True, eq=False)
class ExtraInvariantResult:
    U: SisModel
    W: SisModel
    D: tuple
    objective_U: float
    objective_W: float
    C_masks: np.ndarray
    energies: np.ndarray
    degenerate: bool = False


def assemble_optimal(Y, filt, l):
    """Optimal extra-invariant model of length <= l for the measurements Y.

    Returns U (one generator per band) and W (U masked to the selected bands
    D_xi).  W = U when n0 <= l.
    """
    if l < 1:
        raise ValueError("l must be positive")
    cfg = filt.config
    spec = band_spectrum(Y, filt)
    gens = [per_band_generator(Y, filt, k, spec) for k in range(cfg.n0)]
    C = np.array([g.mask for g in gens])
    energies = np.array([g.energies for g in gens]).T  # (G, n0)

    degenerate = bool(np.all(filt.energy() <= zero_threshold(filt)))
    if degenerate:
        W = SisModel.empty(cfg)
        obj = sum(field_norm_sq(reconstruct(y, filt)) for y in Y)
        D = tuple(tuple(range(min(l, cfg.n0))) for _ in range(cfg.G))
        return ExtraInvariantResult(W, W, D, obj, obj, C, energies, True)

    everything = np.ones((cfg.n0, cfg.G), bool)
    U = _model_from_generators(cfg, gens, everything)
    if cfg.n0 <= l:
        D = tuple(tuple(range(cfg.n0)) for _ in range(cfg.G))
        W = U
    else:
        D = select_bands(energies, l)
        keep = np.zeros((cfg.n0, cfg.G), bool)
        for tb, bands in enumerate(D):
            keep[list(bands), tb] = True
        W = _model_from_generators(cfg, gens, keep)
    obj_U = objective_extra(U, Y, filt)
    obj_W = obj_U if W is U else objective_extra(W, Y, filt)
    assert model_length(W) <= l
    return ExtraInvariantResult(U, W, D, obj_U, obj_W, C, energies)


def objective_extra(model, Y, filt):
    """sum_j |f~_{Y,j} - P_V f~_{Y,j}|^2 via pointwise range projections."""
    total = 0.0
    for y in Y:
        r = reconstruct(y, filt)
        total += field_norm_sq(r - range_project(model, r))
    return total


def objective_form1(model, Y, config):
    """sum_j |Y^j - P_V Y^j|^2, projecting (a_j(xi), 0) pointwise onto J(xi).

    Valid when every J(xi) lies inside A_xi (see ``kernel_consistency_error``).
    """
    total = 0.0
    for y in Y:
        m = measurement_field(y, config)
        total += field_norm_sq(m - range_project(model, m))
    return total


def residual_split(model, Y, filt):
    """Form 1, Form 2 and the data residual, with the Pythagoras gap between them."""
    from .projection import data_residual

    form1 = objective_form1(model, Y, filt.config)
    form2 = objective_extra(model, Y, filt)
    resid = sum(data_residual(y, filt) for y in Y)
    gap = form1 - (resid + form2)
    return {
        "form1": form1,
        "form2": form2,
        "data_residual": resid,
        "gap": gap,
        "relative_gap": abs(gap) / max(1.0, abs(form1)),
    }


def captured_energy(model, Y, filt):
    """sum_j |P_V f~_{Y,j}|^2."""
    w = metric_weights(filt.lam, filt.config.width)
    total = 0.0
    for y in Y:
        p = range_project(model, reconstruct(y, filt))
        total += float(np.sum(wnorm_sq(p.points, w)) / filt.config.G)
    return total
