import itertools
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Dict, Iterator, List, Optional, Tuple

import numpy as np
import pandas as pd

from .errors import ContractViolation

INFINITE = math.inf  # zero temperature / divergent limits
DIVERGENT = math.inf


def _finite_or_none(value: float) -> Optional[float]:
    return None if math.isinf(value) else float(value)


class Variant(Enum):
    """Reduced-coherence formula used for N > 2"""
    PAPER = "paper"        # g = |cos(N Δ / 2)|
    PAIRWISE = "pairwise"  # g = |cos Δ|^(N-1)


class SweepAxis(Enum):
    """Parameter swept by a SweepSpec"""
    OHMICITY = "s"
    COUPLING = "G"
    CUTOFF = "omega-c"
    HORIZON = "T"
    QUBIT_COUNT = "N"


@dataclass(frozen=True)
class SpectralParams:
    """Exponential-cutoff spectral density J(w) = G w^s wc^(1-s) exp(-w/wc)"""
    coupling: float = 1.0
    ohmicity: float = 1.0
    cutoff: float = 3.0
    inverse_temperature: float = INFINITE

    def __post_init__(self):
        if not self.coupling >= 0:
            raise ContractViolation(f"coupling G must be >= 0, got {self.coupling}")
        if not self.ohmicity > 0:
            raise ContractViolation(f"ohmicity s must be > 0, got {self.ohmicity}")
        if not self.cutoff > 0:
            raise ContractViolation(f"cutoff omega_c must be > 0, got {self.cutoff}")
        if not self.inverse_temperature > 0:
            raise ContractViolation(
                f"inverse temperature beta must be > 0 or infinite, got {self.inverse_temperature}")

    @property
    def zero_temperature(self) -> bool:
        return math.isinf(self.inverse_temperature)

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary representation"""
        return {
            'G': self.coupling,
            's': self.ohmicity,
            'omega_c': self.cutoff,
            'beta': "inf" if self.zero_temperature else self.inverse_temperature,
        }


@dataclass(frozen=True)
class KernelValues:
    """Decoherence exponent, indirect phase and their time derivatives at one time"""
    gamma: float
    delta: float
    gamma_rate: float
    delta_rate: float

    def to_dict(self) -> Dict[str, Any]:
        return {
            'gamma': self.gamma,
            'delta': self.delta,
            'gamma_rate': self.gamma_rate,
            'delta_rate': self.delta_rate,
        }


@dataclass(frozen=True)
class LongTimeLimits:
    """Asymptotics: Γ -> gamma_limit, Δ -> delta_offset + delta_slope * t"""
    gamma_limit: float
    delta_slope: float
    delta_offset: float

    @property
    def gamma_divergent(self) -> bool:
        return math.isinf(self.gamma_limit)

    @property
    def offset_divergent(self) -> bool:
        return math.isinf(self.delta_offset)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'gamma_limit': _finite_or_none(self.gamma_limit),
            'gamma_divergent': self.gamma_divergent,
            'delta_slope': self.delta_slope,
            'delta_offset': _finite_or_none(self.delta_offset),
            'offset_divergent': self.offset_divergent,
        }


@dataclass(frozen=True)
class ModelConfig:
    """N qubits with splitting omega0, evaluated up to the horizon T"""
    qubit_count: int = 2
    splitting: float = 0.0
    variant: Variant = Variant.PAPER
    horizon: float = 20.0

    def __post_init__(self):
        if isinstance(self.qubit_count, bool) or int(self.qubit_count) != self.qubit_count \
                or self.qubit_count < 1:
            raise ContractViolation(f"qubit count N must be an integer >= 1, got {self.qubit_count}")
        if not self.horizon > 0:
            raise ContractViolation(f"horizon T must be > 0, got {self.horizon}")
        if not isinstance(self.variant, Variant):
            raise ContractViolation(f"unknown variant {self.variant!r}")

    def to_dict(self) -> Dict[str, Any]:
        return {
            'N': int(self.qubit_count),
            'omega0': self.splitting,
            'variant': self.variant.value,
            'T': self.horizon,
        }


@dataclass(frozen=True)
class CoherenceFactors:
    """f = exp(-Γ), g = |cosine factor|, chi = sign of the cosine factor as a phase"""
    f: float
    g: float
    chi: float
    alpha_offdiag: complex


@dataclass(frozen=True)
class RateValues:
    """dD/dt and dS/dt at one time; at a zero of g the left-sided limits are kept too"""
    trace_distance_rate: float
    entropy_rate: float
    kink: bool = False
    left_trace_distance_rate: Optional[float] = None
    left_entropy_rate: Optional[float] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            'dDdt': self.trace_distance_rate,
            'dSdt': self.entropy_rate,
            'kink': self.kink,
            'dDdt_left': self.left_trace_distance_rate,
            'dSdt_left': self.left_entropy_rate,
        }


@dataclass(frozen=True, eq=False)
class QubitState:
    """Single-qubit density matrix in the sigma_z eigenbasis (+1 first)"""
    matrix: np.ndarray

    def __post_init__(self):
        matrix = np.asarray(self.matrix, dtype=complex)
        if matrix.shape != (2, 2):
            raise ContractViolation(f"qubit state must be 2x2, got shape {matrix.shape}")
        object.__setattr__(self, 'matrix', matrix)

    @property
    def offdiagonal(self) -> complex:
        return complex(self.matrix[0, 1])

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.hermitian_part())

    def hermitian_part(self) -> np.ndarray:
        return 0.5 * (self.matrix + self.matrix.conj().T)

    def hermiticity_error(self) -> float:
        return float(np.max(np.abs(self.matrix - self.matrix.conj().T)))

    def is_physical(self, atol: float = 1e-10) -> bool:
        """Hermitian, unit trace, eigenvalues in [0, 1]"""
        eigenvalues = self.eigenvalues()
        return (self.hermiticity_error() <= atol
                and abs(np.trace(self.matrix) - 1.0) <= atol
                and eigenvalues.min() >= -atol
                and eigenvalues.max() <= 1.0 + atol)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'real': self.matrix.real.tolist(),
            'imag': self.matrix.imag.tolist(),
        }


@dataclass(frozen=True)
class BasisString:
    """Joint sigma_z eigenstate |n1 n2 ... nN> with n_i = +1 or -1"""
    entries: Tuple[int, ...]
    total: int = field(init=False)      # s_n
    product: int = field(init=False)    # p_n
    pair_sum: int = field(init=False)   # q_n = sum_{i<j} n_i n_j

    def __post_init__(self):
        entries = tuple(int(n) for n in self.entries)
        if not entries:
            raise ContractViolation("basis string must have at least one entry")
        if any(n not in (1, -1) for n in entries):
            raise ContractViolation(f"basis entries must be +1 or -1, got {entries}")
        total = sum(entries)
        object.__setattr__(self, 'entries', entries)
        object.__setattr__(self, 'total', total)
        object.__setattr__(self, 'product', math.prod(entries))
        object.__setattr__(self, 'pair_sum', (total * total - len(entries)) // 2)

    def __len__(self) -> int:
        return len(self.entries)

    @classmethod
    def all_strings(cls, qubit_count: int) -> Iterator['BasisString']:
        """All 2^N strings in kron order (+1 before -1, first qubit most significant)"""
        for entries in itertools.product((1, -1), repeat=qubit_count):
            yield cls(entries)


@dataclass(frozen=True)
class MonotoneInterval:
    """Maximal time window on which the trace distance does not decrease"""
    t_start: float
    t_end: float
    D_start: float
    D_end: float
    S_start: float
    S_end: float
    kink_start: bool = False

    @property
    def blp_gain(self) -> float:
        return self.D_end - self.D_start

    @property
    def entropy_gain(self) -> float:
        return self.S_end - self.S_start

    def to_dict(self) -> Dict[str, Any]:
        return {
            't_start': self.t_start,
            't_end': self.t_end,
            'D_start': self.D_start,
            'D_end': self.D_end,
            'S_start': self.S_start,
            'S_end': self.S_end,
            'kink_start': self.kink_start,
        }


INTERVAL_COLUMNS = ['t_start', 't_end', 'D_start', 'D_end', 'S_start', 'S_end', 'kink_start']


@dataclass
class MeasureResult:
    """BLP and relative-entropy measures with the backflow intervals behind them"""
    blp: float
    entropy: float
    intervals: List[MonotoneInterval] = field(default_factory=list)
    horizon: float = 20.0
    grid_points: int = 20001
    refinement_tol: float = 2e-8

    def interval_table(self) -> pd.DataFrame:
        return pd.DataFrame([interval.to_dict() for interval in self.intervals],
                            columns=INTERVAL_COLUMNS)

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary representation"""
        return {
            'blp': self.blp,
            'entropy': self.entropy,
            'interval_count': len(self.intervals),
            'intervals': [interval.to_dict() for interval in self.intervals],
            'horizon': self.horizon,
            'grid_points': self.grid_points,
            'refinement_tol': self.refinement_tol,
        }


@dataclass(frozen=True)
class SweepSpec:
    """One-parameter sweep around a fixed (model, bath) configuration"""
    axis: SweepAxis
    values: Tuple[float, ...]
    model: ModelConfig = field(default_factory=ModelConfig)
    bath: SpectralParams = field(default_factory=SpectralParams)

    def __post_init__(self):
        values = tuple(self.values)
        if not values:
            raise ContractViolation("sweep values must be nonempty")
        if any(b <= a for a, b in zip(values, values[1:])):
            raise ContractViolation("sweep values must be strictly increasing")
        if self.axis is SweepAxis.QUBIT_COUNT and any(int(v) != v for v in values):
            raise ContractViolation("qubit-count sweep values must be integers")
        object.__setattr__(self, 'values', values)

    def configure(self, value: float) -> Tuple[ModelConfig, SpectralParams]:
        """The (model, bath) pair for one axis value"""
        if self.axis is SweepAxis.OHMICITY:
            return self.model, replace(self.bath, ohmicity=float(value))
        if self.axis is SweepAxis.COUPLING:
            return self.model, replace(self.bath, coupling=float(value))
        if self.axis is SweepAxis.CUTOFF:
            return self.model, replace(self.bath, cutoff=float(value))
        if self.axis is SweepAxis.HORIZON:
            return replace(self.model, horizon=float(value)), self.bath
        return replace(self.model, qubit_count=int(value)), self.bath


@dataclass(frozen=True, eq=False)
class DiscreteBath:
    """Finite list of bath modes (w_k, g_k) with Fock truncation d_k per mode"""
    frequencies: np.ndarray
    couplings: np.ndarray
    truncation: Tuple[int, ...]

    def __post_init__(self):
        frequencies = np.atleast_1d(np.asarray(self.frequencies, dtype=float))
        couplings = np.atleast_1d(np.asarray(self.couplings, dtype=complex))
        truncation = tuple(int(d) for d in np.atleast_1d(self.truncation))
        if frequencies.ndim != 1 or frequencies.shape != couplings.shape \
                or len(truncation) != len(frequencies):
            raise ContractViolation("frequencies, couplings and truncation must have equal length")
        if np.any(frequencies <= 0):
            raise ContractViolation("mode frequencies must be strictly positive")
        if len(np.unique(frequencies)) != len(frequencies):
            raise ContractViolation("mode frequencies must be distinct")
        if any(d < 2 for d in truncation):
            raise ContractViolation("Fock truncation must be >= 2 for every mode")
        object.__setattr__(self, 'frequencies', frequencies)
        object.__setattr__(self, 'couplings', couplings)
        object.__setattr__(self, 'truncation', truncation)

    @property
    def mode_count(self) -> int:
        return len(self.frequencies)

    def with_truncation(self, truncation) -> 'DiscreteBath':
        if np.isscalar(truncation):
            truncation = (int(truncation),) * self.mode_count
        return DiscreteBath(self.frequencies, self.couplings, tuple(truncation))

    def to_dict(self) -> Dict[str, Any]:
        return {
            'frequencies': self.frequencies.tolist(),
            'coupling_abs': np.abs(self.couplings).tolist(),
            'truncation': list(self.truncation),
        }


@dataclass(frozen=True)
class ExactResult:
    """Brute-force reduced single-qubit state with propagation diagnostics"""
    reduced: QubitState
    norm_error: float
    truncation_leakage: float
    purity_error: float = 0.0
    hermiticity_error: float = 0.0

    def to_dict(self) -> Dict[str, Any]:
        return {
            'reduced': self.reduced.to_dict(),
            'coherence_abs': abs(self.reduced.offdiagonal) * 2.0,
            'norm_error': self.norm_error,
            'truncation_leakage': self.truncation_leakage,
            'purity_error': self.purity_error,
            'hermiticity_error': self.hermiticity_error,
        }
