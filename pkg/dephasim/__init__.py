# Pure-dephasing qubit registers and their non-Markovianity measures
from .bath import delta_exact, gamma_exact, kernel_quadrature, kernel_rates, kernel_values, long_time_limits
from .dynamics import (
    coherence_factors,
    coherence_trajectory,
    n_qubit_element,
    rates,
    reduced_pair,
    relative_entropy,
    trace_distance,
)
from .errors import ConfigError, ContractViolation, DephasimError, NumericalFailure
from .measures import blp_measure, entropy_measure, find_increase_intervals, measure, sweep
from .models import ModelConfig, SpectralParams, SweepAxis, SweepSpec, Variant

__version__ = "0.1.0"

__all__ = [
    'ConfigError',
    'ContractViolation',
    'DephasimError',
    'ModelConfig',
    'NumericalFailure',
    'SpectralParams',
    'SweepAxis',
    'SweepSpec',
    'Variant',
    'blp_measure',
    'coherence_factors',
    'coherence_trajectory',
    'delta_exact',
    'entropy_measure',
    'find_increase_intervals',
    'gamma_exact',
    'kernel_quadrature',
    'kernel_rates',
    'kernel_values',
    'long_time_limits',
    'measure',
    'n_qubit_element',
    'rates',
    'reduced_pair',
    'relative_entropy',
    'sweep',
    'trace_distance',
]
