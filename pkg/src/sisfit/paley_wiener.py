"""
Optimal translation-invariant Paley-Wiener models over l multi-tiles.

A candidate picks, at every base point xi in [0, 1), l distinct integer cells
j in [-N, N]; cell j contributes the frequency xi + j.  Writing j = k + n0 s
with residue k in [0, n0) puts that frequency in band k at fiber index s, so
the model's range function at xi + k is spanned by

    (conj(ghat(xi + k + n0 s)), e_s),   s in s_k.

The captured energy of assignment s at xi is

    sum_j sum_k |a_j(xi + k)|^2 F_{s_k}(xi + k),

with F the squared norm of the projection of (1, 0) onto that span.  The
optimum is the per-point argmax over all C(2N+1, l) assignments.
"""

import os
from dataclasses import dataclass
from itertools import combinations
from math import comb

import numpy as np

from .bands import SisModel
from .grid import metric_weights
from .projection import gs_recursion, measurement_series

DEFAULT_ENUM_CAP = 100_000
ENUM_CAP_ENV = "SISFIT_ENUM_CAP"


class EnumerationCapError(RuntimeError):
    """Refusal to enumerate more translation assignments than the cap allows."""

    def __init__(self, count, cap):
        super().__init__(f"{count} translation assignments exceed the cap {cap}")
        self.count = count
        self.cap = cap


def enum_cap(cap=None):
    if cap is not None:
        return int(cap)
    return int(os.environ.get(ENUM_CAP_ENV, DEFAULT_ENUM_CAP))


@dataclass(frozen=True)
class TranslationAssignment:
    """l distinct cells in [-N, N], grouped by residue.

    ``cells`` is the sorted cell tuple; ``s[k]`` the increasing offsets with
    k + n0 * s in ``cells``.
    """

    cells: tuple
    n0: int
    N: int

    def __post_init__(self):
        cells = tuple(int(j) for j in self.cells)
        if list(cells) != sorted(set(cells)):
            raise ValueError("cells must be distinct and increasing")
        if any(abs(j) > self.N for j in cells):
            raise ValueError(f"cells {cells} leave [-{self.N}, {self.N}]")
        object.__setattr__(self, "cells", cells)

    @property
    def l(self):
        return len(self.cells)

    @property
    def s(self):
        out = [[] for _ in range(self.n0)]
        for j in self.cells:
            k = j % self.n0
            out[k].append((j - k) // self.n0)
        return tuple(tuple(v) for v in out)

    @property
    def l_k(self):
        return tuple(len(v) for v in self.s)


def enumerate_translations(N, l, n0, cap=None):
    """All l-subsets of cells [-N, N] in lexicographic order."""
    if N < 0 or l < 1 or n0 < 1:
        raise ValueError("need N >= 0, l >= 1 and n0 >= 1")
    if 2 * N + 1 < l:
        raise ValueError(f"only {2 * N + 1} cells available for l={l}")
    count = comb(2 * N + 1, l)
    limit = enum_cap(cap)
    if count > limit:
        raise EnumerationCapError(count, limit)
    return [TranslationAssignment(c, n0, N) for c in combinations(range(-N, N + 1), l)]


def _check_representable(assignments, L):
    worst = max((abs(s) for a in assignments for sk in a.s for s in sk), default=0)
    if worst > L:
        raise ValueError(f"fiber truncation L={L} cannot represent offset {worst}")


def band_energy(g, t, offsets, lam):
    """|P (1, 0)|^2 onto span{(conj(ghat(xi_t + n0 s)), e_s) : s in offsets}."""
    if len(offsets) == 0:
        return 0.0
    L = g.config.L
    idx = np.asarray(offsets, dtype=int)
    a = np.conj(g.fibers[t, idx + L])
    row = gs_recursion(a, idx, L, lam)
    # <(1,0), v_n> = conj(v_n[0]) and |v_n|^2 = lam S_n / S_{n-1}
    coef = np.abs(row.v[:, 0]) ** 2 / row.norm_sq
    return float(np.sum(coef))


def tile_energy(s, g, lam, t_base):
    """F_{s_k}(xi_{t_base} + k) for every band k."""
    cfg = g.config
    _check_representable([s], cfg.L)
    return np.array([band_energy(g, cfg.point(t_base, k), s.s[k], lam) for k in range(cfg.n0)])


def energy_table(assignments, g, lam):
    """F[a, t_base, k] for all assignments; cached per (band, offsets)."""
    cfg = g.config
    _check_representable(assignments, cfg.L)
    F = np.zeros((len(assignments), cfg.G, cfg.n0))
    cache = {}
    for i, s in enumerate(assignments):
        for k, offs in enumerate(s.s):
            key = (k, offs)
            if key not in cache:
                cache[key] = np.array(
                    [band_energy(g, cfg.point(tb, k), offs, lam) for tb in range(cfg.G)]
                )
            F[i, :, k] = cache[key]
    return F


def band_power(Y, config):
    """p[t_base, k] = sum_j |a_j(xi_{t_base} + k)|^2."""
    a = measurement_series(Y.sequences, config)
    return np.sum(np.abs(a) ** 2, axis=0).reshape(config.n0, config.G).T


@dataclass(frozen=True, eq=False)
class MultiTile:
    """Per-base-point translation assignments; ``assignments[t_base]``."""

    config: object
    N: int
    assignments: tuple
    scores: np.ndarray = None

    def cells(self):
        return [a.cells for a in self.assignments]

    def frequencies(self, t_base):
        """Frequencies xi_t + j of the chosen cells at one base point."""
        return self.config.xi[t_base] + np.array(self.assignments[t_base].cells)


@dataclass(frozen=True, eq=False)
class TileResult:
    tile: MultiTile
    captured: float
    residual: float
    total: float


def optimize_tile(Y, g, lam, N, l, cap=None):
    """Per-point argmax of the captured energy over all assignments.

    Ties go to the lexicographically first assignment.  ``captured`` is
    sum_j |P_V Y^j|^2 and ``residual`` = sum_j |Y^j|^2 - captured, the Form-1
    objective of the tile model.
    """
    cfg = g.config
    S = enumerate_translations(N, l, cfg.n0, cap)
    F = energy_table(S, g, lam)
    p = band_power(Y, cfg)
    scores = np.einsum("atk,tk->at", F, p)
    best = np.empty(cfg.G, dtype=int)
    for t in range(cfg.G):
        b = 0
        for i in range(1, len(S)):
            if scores[i, t] > scores[b, t]:
                b = i
        best[t] = b
    chosen = scores[best, np.arange(cfg.G)]
    tile = MultiTile(cfg, N, tuple(S[b] for b in best), chosen)
    captured = float(np.sum(chosen) / cfg.G)
    total = float(np.sum(p) / cfg.G)
    return TileResult(tile, captured, max(total - captured, 0.0), total)


def tile_score(tile, Y, g, lam):
    """Captured energy sum_j |P_V Y^j|^2 of an arbitrary tile."""
    cfg = g.config
    p = band_power(Y, cfg)
    total = 0.0
    for tb, s in enumerate(tile.assignments):
        total += float(np.dot(tile_energy(s, g, lam, tb), p[tb]))
    return total / cfg.G


def validate_multitile(tile, l):
    """Check l cells per base point, all inside [-N, N]."""
    report = []
    for tb, s in enumerate(tile.assignments):
        cells = s.cells
        if len(cells) != l:
            report.append(f"base point {tb}: {len(cells)} cells, expected {l}")
        if len(set(cells)) != len(cells):
            report.append(f"base point {tb}: repeated cells {cells}")
        out = [j for j in cells if abs(j) > tile.N]
        if out:
            report.append(f"base point {tb}: cells {out} outside [-{tile.N}, {tile.N}]")
    return not report, report


def tile_model(tile, g, lam=None):
    """SisModel whose range at xi_t + k is spanned by the chosen kernel columns."""
    cfg = g.config if lam is None else g.config.with_lam(lam)
    sets = [np.zeros((0, cfg.dim), complex) for _ in range(cfg.T)]
    for tb, s in enumerate(tile.assignments):
        for k, offs in enumerate(s.s):
            if not offs:
                continue
            t = cfg.point(tb, k)
            vecs = np.zeros((len(offs), cfg.dim), complex)
            for r, off in enumerate(offs):
                vecs[r, 0] = np.conj(g.fibers[t, off + cfg.L])
                vecs[r, off + cfg.L + 1] = 1.0
            sets[t] = vecs
    model = SisModel.from_spanning_sets(cfg, sets, "paley-wiener", meta={"N": tile.N})
    return model


def tile_from_cells(config, N, cells_per_point):
    return MultiTile(
        config, N, tuple(TranslationAssignment(tuple(sorted(c)), config.n0, N) for c in cells_per_point)
    )


def subspace_distance(A, B, w):
    """Largest residual when projecting each orthonormal basis onto the other span."""
    from .bands import orthonormalize, project_point

    A = orthonormalize(A, w)
    B = orthonormalize(B, w)
    if A.shape[0] != B.shape[0]:
        return np.inf
    err = 0.0
    for X, Z in ((A, B), (B, A)):
        for x in X:
            r = x - project_point(Z, x, w)
            err = max(err, float(np.sqrt(np.sum(w * np.abs(r) ** 2))))
    return err


def tile_span_error(tile, g, lam):
    """Max distance between the tile model's range and the kernel-column spans."""
    model = tile_model(tile, g, lam)
    cfg = model.config
    w = metric_weights(cfg.lam, cfg.width)
    err = 0.0
    for tb, s in enumerate(tile.assignments):
        for k, offs in enumerate(s.s):
            t = cfg.point(tb, k)
            ref = np.zeros((len(offs), cfg.dim), complex)
            for r, off in enumerate(offs):
                ref[r, 0] = np.conj(g.fibers[t, off + cfg.L])
                ref[r, off + cfg.L + 1] = 1.0
            err = max(err, subspace_distance(model.bases[t], ref, w))
    return err
