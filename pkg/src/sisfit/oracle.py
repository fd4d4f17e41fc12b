"""
Brute-force reference implementations.

These deliberately avoid the production algorithms: projections go through
dense normal equations instead of the closed-form recursion, spectra through a
dense Hermitian eigensolver instead of the rank-one formula, and optimizers
through exhaustive enumeration instead of argmax/selection rules.
"""

import warnings
from dataclasses import dataclass
from itertools import product

import numpy as np

from .bands import SisModel, model_length
from .extra import assemble_optimal, band_spectrum, objective_extra
from .grid import FiberVector, field_norm_sq, metric_weights
from .paley_wiener import (
    enumerate_translations,
    enum_cap,
    EnumerationCapError,
    MultiTile,
    TileResult,
    band_power,
    optimize_tile,
    tile_model,
    validate_multitile,
)
from .projection import measurement_series, reconstruct


class SingularGramWarning(RuntimeWarning):
    """The oracle fell back to a pseudo-inverse."""


def _as_array(x):
    return x.as_array() if isinstance(x, FiberVector) else np.asarray(x, dtype=complex)


def oracle_project(basis, target, lam, rcond=1e-12):
    """Projection of ``target`` onto span(basis) by the weighted normal equations.

    Solves H c = r with H_ij = <b_j, b_i> and r_i = <target, b_i>, then
    returns sum_j c_j b_j.  A singular H triggers a pseudo-inverse solve and a
    ``SingularGramWarning``.
    """
    x = _as_array(target)
    w = metric_weights(lam, x.size - 1)
    B = np.array([_as_array(b) for b in basis]).reshape(-1, x.size)
    if B.shape[0] == 0:
        out = np.zeros_like(x)
    else:
        H = np.conj(B) @ (w * B).T
        rhs = np.conj(B) @ (w * x)
        s = np.linalg.svd(H, compute_uv=False)
        if s[-1] <= rcond * max(s[0], 1e-300):
            warnings.warn("singular Gram matrix, using pseudo-inverse", SingularGramWarning)
            coef = np.linalg.pinv(H, rcond=rcond, hermitian=True) @ rhs
        else:
            coef = np.linalg.solve(H, rhs)
        out = coef @ B
    return FiberVector.from_array(out) if isinstance(target, FiberVector) else out


def mgs(vectors, w):
    """Modified Gram-Schmidt in the metric diag(w); returns (orthogonal rows, norms^2)."""
    V = np.array(vectors, dtype=complex)
    n = V.shape[0]
    out = np.zeros_like(V)
    norms = np.zeros(n)
    for i in range(n):
        v = V[i].copy()
        for j in range(i):
            if norms[j] > 0:
                v -= np.sum(w * v * np.conj(out[j])) / norms[j] * out[j]
        out[i] = v
        norms[i] = float(np.sum(w * np.abs(v) ** 2))
    return out, norms


def dense_spectrum(gram):
    """Eigenvalues (descending) and eigenvectors of a Hermitian matrix."""
    vals, vecs = np.linalg.eigh(gram)
    return vals[::-1], vecs[:, ::-1]


def dense_band_gramians(Y, filt):
    """Gram matrices <F_i, F_j> from the reconstructed fields themselves."""
    cfg = filt.config
    w = metric_weights(cfg.lam, cfg.width)
    pts = np.array([reconstruct(y, filt).points for y in Y])  # (m, T, dim)
    gram = np.einsum("itd,jtd,d->tij", pts, np.conj(pts), w)
    return gram.reshape(cfg.n0, cfg.G, Y.m, Y.m)


@dataclass(frozen=True)
class CandidateSpec:
    """Seeded recipe for a random feasible model."""

    seed: int
    cls: str = "extra-invariant"
    l: int = 1
    N: int = 1
    noise: float = None


NOISE_LEVELS = (0.0, 1e-3, 1e-1, 1.0)


def _random_in_A(rng, g_fibers, scale=1.0):
    a = scale * (rng.normal(size=g_fibers.size) + 1j * rng.normal(size=g_fibers.size))
    return np.concatenate([[np.sum(a * np.conj(g_fibers))], a])


def random_candidate(spec, config, filt):
    """A random model of the requested class with length <= spec.l.

    Extra-invariant candidates pick, per base point, band dimensions summing
    to at most l; each active band gets vectors inside A_xi, the first one a
    perturbation of the filter direction so the competitor is not hopeless.
    Paley-Wiener candidates pick a random assignment per base point.
    """
    rng = np.random.default_rng(spec.seed)
    cfg = filt.config
    if spec.l <= 0:
        return SisModel.empty(cfg, spec.cls)
    if spec.cls == "paley-wiener":
        S = enumerate_translations(spec.N, spec.l, cfg.n0)
        picks = rng.integers(len(S), size=cfg.G)
        tile = MultiTile(cfg, spec.N, tuple(S[i] for i in picks))
        return tile_model(tile, filt.kernel, cfg.lam)
    if spec.cls != "extra-invariant":
        raise ValueError(f"no candidate generator for class {spec.cls!r}")

    noise = spec.noise if spec.noise is not None else NOISE_LEVELS[rng.integers(len(NOISE_LEVELS))]
    g = filt.kernel.fibers
    sets = [np.zeros((0, cfg.dim), complex) for _ in range(cfg.T)]
    for tb in range(cfg.G):
        total = int(rng.integers(0, spec.l + 1))
        dims = np.zeros(cfg.n0, int)
        for k in rng.integers(cfg.n0, size=total):
            dims[k] += 1
        for k in range(cfg.n0):
            if dims[k] == 0:
                continue
            t = cfg.point(tb, k)
            vecs = []
            base = filt.lifted.points[t]
            bnorm = np.sqrt(max(filt.energy()[t], 1e-300))
            vecs.append(base / bnorm + _random_in_A(rng, g[t], noise))
            for _ in range(dims[k] - 1):
                vecs.append(_random_in_A(rng, g[t]))
            sets[t] = np.array(vecs)
    return SisModel.from_spanning_sets(cfg, sets, "extra-invariant", meta={"seed": spec.seed})


def _band_dim_choices(n0, l, cap):
    """All band-dimension vectors d with sum(d) <= l and d_k <= cap."""
    out = []
    for d in product(range(min(l, cap) + 1), repeat=n0):
        if sum(d) <= l:
            out.append(d)
    return out


def exhaustive_extra(Y, filt, l):
    """Exhaustive per-point optimum over extra-invariant models of length <= l.

    At each base point every allocation of dimensions d_k to bands with
    sum d_k <= l is tried; band k then captures the top d_k eigenvalues of its
    dense Gramian.  Returns (objective, best allocation per base point).
    """
    cfg = filt.config
    gram = dense_band_gramians(Y, filt)
    eig = np.zeros((cfg.n0, cfg.G, Y.m))
    for k in range(cfg.n0):
        for tb in range(cfg.G):
            eig[k, tb] = np.clip(dense_spectrum(gram[k, tb])[0], 0, None)
    csum = np.concatenate([np.zeros((cfg.n0, cfg.G, 1)), np.cumsum(eig, axis=2)], axis=2)
    choices = _band_dim_choices(cfg.n0, l, Y.m)
    captured = 0.0
    best = []
    for tb in range(cfg.G):
        vals = [sum(csum[k, tb, d[k]] for k in range(cfg.n0)) for d in choices]
        i = int(np.argmax(vals))
        captured += vals[i]
        best.append(choices[i])
    total = sum(field_norm_sq(reconstruct(y, filt)) for y in Y)
    return total - captured / cfg.G, tuple(best)


def exhaustive_pw(Y, g, lam, N, l, cap=None):
    """Per-point enumeration of all assignments with oracle projections.

    Each candidate's captured energy is computed by projecting every (a_j, 0)
    onto the chosen kernel columns with ``oracle_project``.
    """
    cfg = g.config
    S = enumerate_translations(N, l, cfg.n0)
    limit = enum_cap(cap)
    if len(S) * cfg.G > limit:
        raise EnumerationCapError(len(S) * cfg.G, limit)
    a = measurement_series(Y.sequences, cfg)  # (m, T)
    chosen, captured = [], 0.0
    for tb in range(cfg.G):
        best, best_val = None, -np.inf
        for s in S:
            val = 0.0
            for k, offs in enumerate(s.s):
                if not offs:
                    continue
                t = cfg.point(tb, k)
                basis = []
                for off in offs:
                    v = np.zeros(cfg.dim, complex)
                    v[0] = np.conj(g.fibers[t, off + cfg.L])
                    v[off + cfg.L + 1] = 1.0
                    basis.append(v)
                w = metric_weights(lam, cfg.width)
                for j in range(Y.m):
                    x = np.zeros(cfg.dim, complex)
                    x[0] = a[j, t]
                    p = oracle_project(basis, x, lam)
                    val += float(np.sum(w * np.abs(p) ** 2))
            if val > best_val:
                best, best_val = s, val
        chosen.append(best)
        captured += best_val
    captured /= cfg.G
    total = float(np.sum(band_power(Y, cfg)) / cfg.G)
    tile = MultiTile(cfg, N, tuple(chosen))
    return TileResult(tile, captured, max(total - captured, 0.0), total)


def verify_all(Y, filt, l, N=None, n_candidates=50, seed=0):
    """Run the oracle checks on one dataset; returns {property: (passed, detail)}."""
    report = {}
    cfg = filt.config
    res = assemble_optimal(Y, filt, l)

    spec = band_spectrum(Y, filt)
    lam1 = spec.eigenvalues[..., 0]
    dense = dense_band_gramians(Y, filt)
    lam2 = np.zeros_like(lam1)
    if Y.m > 1:
        for k in range(cfg.n0):
            for tb in range(cfg.G):
                lam2[k, tb] = dense_spectrum(dense[k, tb])[0][1]
    worst = float(np.max(lam2 / np.maximum(lam1, 1.0)))
    report["rank_one_gramians"] = (worst <= 1e-10, worst)

    ex_obj, _ = exhaustive_extra(Y, filt, l)
    gap = abs(res.objective_W - ex_obj)
    report["extra_matches_exhaustive"] = (gap <= 1e-12 * max(1.0, ex_obj), gap)

    margins = []
    for i in range(n_candidates):
        cand = random_candidate(CandidateSpec(seed + i, "extra-invariant", l), cfg, filt)
        margins.append(objective_extra(cand, Y, filt) - res.objective_W)
    worst = float(min(margins)) if margins else 0.0
    report["extra_dominates_candidates"] = (worst >= -1e-9, worst)
    report["extra_length"] = (model_length(res.W) <= l, model_length(res.W))

    if N is not None:
        g = filt.kernel
        opt = optimize_tile(Y, g, cfg.lam, N, l)
        ex = exhaustive_pw(Y, g, cfg.lam, N, l)
        gap = abs(opt.captured - ex.captured)
        report["pw_matches_exhaustive"] = (gap <= 1e-12 * max(1.0, ex.total), gap)
        ok, problems = validate_multitile(opt.tile, l)
        report["pw_valid_multitile"] = (ok, len(problems))
    return report
