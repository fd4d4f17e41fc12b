"""Optimal shift-invariant models learned from regularized measurements."""

from .grid import (
    ConfigMismatchError,
    FiberField,
    FiberVector,
    FiberizedSignal,
    GridConfig,
    InconsistentFieldError,
    field_norm_sq,
    fiber_map,
    inverse_fiber_map,
    lift,
    translate,
    weighted_inner_product,
)
from .sampling import (
    MeasurementSet,
    SamplingKernel,
    UnderResolvedError,
    sample,
    smooth_kernel,
    synthesize,
    verify_kernel_bound,
)
from .projection import build_filter, data_residual, gs_basis, project_A, reconstruct
from .bands import SisModel, active_bands, band_project, model_length, range_project
from .extra import assemble_optimal, objective_extra, residual_split, select_bands
from .paley_wiener import enumerate_translations, optimize_tile, tile_model, validate_multitile

__version__ = "0.1.0"
