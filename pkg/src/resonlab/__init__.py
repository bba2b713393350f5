"""resonlab: spectral simulator and resonance-analysis toolkit for splitting
and symplectic-midpoint discretizations of the cubic nonlinear Schroedinger
equation with a convolution potential on the 1-d torus."""

from .freqlat import FrequencyModel, K_INF, frequency, truncate
from .indexcomb import (audit_truncated_divisors, check_nonresonance,
                        enumerate_zero_moment, moment, mu_S, omega_sum,
                        psi_sum, small_divisor)
from .spectral import InitialSpec, SpectralState, synthesize_initial
from .integrators import (ActionSeries, MidpointDivergenceError, SchemeConfig,
                          linear_phase, nonlinear_flow, run, step)
from .resonance import ResonanceQuery, find_resonant_step, scan_resonances
from .config import ExperimentConfig, load_config
from .experiments import DriftReport, run_experiment, sweep
from .svgplot import emit_plot

__version__ = "0.1.0"

__all__ = [
    "FrequencyModel", "K_INF", "frequency", "truncate",
    "audit_truncated_divisors", "check_nonresonance", "enumerate_zero_moment",
    "moment", "mu_S", "omega_sum", "psi_sum", "small_divisor",
    "InitialSpec", "SpectralState", "synthesize_initial",
    "ActionSeries", "MidpointDivergenceError", "SchemeConfig",
    "linear_phase", "nonlinear_flow", "run", "step",
    "ResonanceQuery", "find_resonant_step", "scan_resonances",
    "ExperimentConfig", "load_config",
    "DriftReport", "run_experiment", "sweep",
    "emit_plot",
    "__version__",
]
