"""
The fiber domain
================

A band-limited signal is stored through its Fourier samples on a midpoint
grid, grouped into fibers fhat(xi + l n0).  Paired with a measurement
sequence it becomes a field of lifted points (scalar, fiber).
"""

import numpy as np

from sisfit import FiberizedSignal, GridConfig, fiber_map, inverse_fiber_map, lift, smooth_kernel, translate
from sisfit.grid import field_norm_sq, sequence_norm_sq

rng = np.random.default_rng(0)
cfg = GridConfig(n0=2, G=16, L=2, K=5, lam=0.5)
print(cfg)
print("grid points:", cfg.T, " fiber length:", cfg.width)

# A random pair (c, f) and its image in the fiber domain.
c = rng.normal(size=2 * cfg.K + 1) + 1j * rng.normal(size=2 * cfg.K + 1)
f = FiberizedSignal(cfg, rng.normal(size=(cfg.T, cfg.width)) + 1j * rng.normal(size=(cfg.T, cfg.width)))
fld = fiber_map(c, f)

# The map is an isometry once the sequence side carries the weight n0.
print("field norm^2       ", field_norm_sq(fld))
print("n0|c|^2 + lam|f|^2 ", sequence_norm_sq(c, cfg.n0) + cfg.lam * f.norm_sq())

c2, f2 = inverse_fiber_map(fld)
print("round trip error   ", max(np.abs(c2 - c).max(), np.abs(f2.fibers - f.fibers).max()))

# Lifting pairs a signal with the measurements a kernel would take of it.
g = smooth_kernel(cfg, degree=1, seed=1)
F = lift(f, g)

# Integer translation only multiplies the lift by a phase.
k = 3
phase = np.exp(-2j * np.pi * k * cfg.xi)[:, None]
print("translation covariance error", np.abs(lift(translate(f, k), g).points - phase * F.points).max())
