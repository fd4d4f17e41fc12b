"""
Bands and range functions
=========================

The frequency interval [0, n0) splits into n0 unit bands.  A model is stored
through its range function: an orthonormal set of lifted vectors at every
grid point.  Projections act point by point and the length of a model is the
largest number of vectors stacked over one base frequency.
"""

import numpy as np

from sisfit import FiberizedSignal, GridConfig, SisModel, lift, smooth_kernel
from sisfit.bands import active_bands, band_project, model_length, range_project
from sisfit.grid import field_inner, field_norm_sq
from sisfit.sampling import random_smooth_fibers

rng = np.random.default_rng(2)
cfg = GridConfig(n0=3, G=8, L=2, K=6, lam=0.5)
g = smooth_kernel(cfg, seed=2)

phi = [FiberizedSignal(cfg, random_smooth_fibers(cfg, 1, rng)) for _ in range(2)]
model = SisModel.from_generators(g, phi)
print("vectors per grid point:", model.dims())
print("model length:", model_length(model))
print("active bands at base point 0:", active_bands(model, 0))

# Band components of a lifted signal are mutually orthogonal.
F = lift(FiberizedSignal(cfg, rng.normal(size=(cfg.T, cfg.width))), g)
parts = [band_project(F, k) for k in range(cfg.n0)]
print("cross-band inner products:", [abs(field_inner(parts[i], parts[j])) for i in range(3) for j in range(3) if i < j])

# Projecting onto the model: norm splits into kept and residual parts.
P = range_project(model, F)
print("|F|^2 =", field_norm_sq(F), " kept + residual =", field_norm_sq(P) + field_norm_sq(F - P))
