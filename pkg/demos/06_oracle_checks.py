"""
Brute-force cross-checks
========================

Every optimizer has an independent reference: dense eigensolvers for the
band Gramians, enumeration of band allocations, and normal-equation
projections for the multi-tile scores.
"""

import numpy as np

from sisfit import GridConfig, MeasurementSet, build_filter, smooth_kernel
from sisfit.oracle import CandidateSpec, random_candidate, verify_all
from sisfit.extra import assemble_optimal, objective_extra

rng = np.random.default_rng(5)
cfg = GridConfig(n0=2, G=8, L=2, K=4, lam=1.0)
filt = build_filter(smooth_kernel(cfg, seed=7))
Y = MeasurementSet(cfg, rng.normal(size=(3, 2 * cfg.K + 1)) + 1j * rng.normal(size=(3, 2 * cfg.K + 1)))

for name, (ok, value) in verify_all(Y, filt, l=1, N=2, n_candidates=30).items():
    print(f"{'PASS' if ok else 'FAIL'}  {name:28s} {float(value):.3e}")

best = assemble_optimal(Y, filt, 1).objective_W
others = [objective_extra(random_candidate(CandidateSpec(s, l=1), cfg, filt), Y, filt) for s in range(100)]
print(f"\noptimum {best:.4f}; best of 100 random candidates {min(others):.4f}")
