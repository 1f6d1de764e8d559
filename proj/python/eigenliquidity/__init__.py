"""Cross-impact propagator model: optimal execution, costs and calibration."""

from ._core import (
    DecayKernel,
    PropagatorModel,
    TimeGrid,
    calibrate,
    compare_profiles,
    default_grid,
    eigencost,
    general_kkt,
    kernel_matrix,
    no_manipulation,
    optimal_profile,
    optimal_schedule,
    schedule_cost,
    simulate,
    synthetic_model,
)

__version__ = "0.1.0"
