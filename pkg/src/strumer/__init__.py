"""Multichannel frequency estimation through structured low-rank
Hankel-Toeplitz matrix recovery (StruMER), with data generation, a Toeplitz
baseline, CRB oracles, and a Monte Carlo experiment harness.
"""

from .baseline import solve_toeplitz
from .crb import crb_frequencies, root_mean_crb
from .errors import ExtractionError, NumericalDivergenceError
from .harness import (
    ExperimentSpec,
    MethodSpec,
    ResultTable,
    SolveOptions,
    emit,
    presets,
    run_experiment,
    run_single,
    trace_solve,
)
from .model_order import select_order
from .postprocess import (
    EstimationResult,
    amplitude_ls,
    frequency_rmse,
    root_music,
    vandermonde_powers,
)
from .reduction import reduce_data, solve_reduced
from .scenario import (
    Scenario,
    generate_scenario,
    load_scenario,
    save_scenario,
    scenario_from_dict,
    scenario_to_dict,
)
from .signals import (
    FrequencyAmplitudeModel,
    MaskSpec,
    NoiseModel,
    Objective,
    Observation,
    ObservationMask,
    exact_embedding,
    make_mask,
    observe,
    sample_noise,
    snr_to_sigma,
    steering_vector,
    synthesize,
)
from .solver import SolveResult, SolverConfig, StrumerSolver, solve

__version__ = "0.1.0"

__all__ = [
    "ExperimentSpec",
    "EstimationResult",
    "ExtractionError",
    "FrequencyAmplitudeModel",
    "MaskSpec",
    "MethodSpec",
    "NoiseModel",
    "NumericalDivergenceError",
    "Objective",
    "Observation",
    "ObservationMask",
    "ResultTable",
    "Scenario",
    "SolveOptions",
    "SolveResult",
    "SolverConfig",
    "StrumerSolver",
    "amplitude_ls",
    "crb_frequencies",
    "emit",
    "exact_embedding",
    "frequency_rmse",
    "generate_scenario",
    "load_scenario",
    "make_mask",
    "observe",
    "presets",
    "reduce_data",
    "root_mean_crb",
    "root_music",
    "run_experiment",
    "run_single",
    "sample_noise",
    "save_scenario",
    "scenario_from_dict",
    "scenario_to_dict",
    "select_order",
    "snr_to_sigma",
    "solve",
    "solve_reduced",
    "solve_toeplitz",
    "steering_vector",
    "synthesize",
    "trace_solve",
    "vandermonde_powers",
    "__version__",
]
