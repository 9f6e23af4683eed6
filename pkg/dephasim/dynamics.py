"""
Reduced dynamics of the qubit register: coherence factors, single-qubit states,
N-qubit density-matrix elements, trace distance and relative entropy.

All qubits start in |+>, so the pair of single-qubit states that maximizes the
trace distance evolves as rho_1,2 = 1/2 [[1, ±alpha], [±alpha*, 1]] with
|alpha| = f g.
"""

import logging
import math
from typing import Tuple, Union

import numpy as np
import pandas as pd

from . import bath
from .errors import ContractViolation
from .models import (
    BasisString,
    CoherenceFactors,
    ModelConfig,
    QubitState,
    RateValues,
    SpectralParams,
    Variant,
)

logger = logging.getLogger("dephasim.dynamics")

ArrayLike = Union[float, np.ndarray]

KINK_ATOL = 1e-13
MAX_DENSITY_QUBITS = 10
TRAJECTORY_COLUMNS = ['t', 'f', 'g', 'chi', 'D', 'S', 'dDdt', 'dSdt']


# --- cosine factor ------------------------------------------------------------

def phase_cosine(m: ModelConfig, delta: ArrayLike) -> np.ndarray:
    """cos(NΔ/2) for PAPER, cos Δ for PAIRWISE; g vanishes exactly where this does"""
    delta = np.asarray(delta, dtype=float)
    if m.qubit_count == 1:
        return np.ones_like(delta)
    if m.variant is Variant.PAPER:
        return np.cos(0.5 * m.qubit_count * delta)
    return np.cos(delta)


def cosine_factor(m: ModelConfig, delta: ArrayLike) -> np.ndarray:
    """Signed cosine factor c with g = |c|"""
    base = phase_cosine(m, delta)
    if m.variant is Variant.PAIRWISE and m.qubit_count > 2:
        return base ** (m.qubit_count - 1)
    return base


def cosine_factor_rate(m: ModelConfig, delta: ArrayLike, delta_rate: ArrayLike) -> np.ndarray:
    """dc/dt by the chain rule through Δ"""
    delta = np.asarray(delta, dtype=float)
    delta_rate = np.asarray(delta_rate, dtype=float)
    N = m.qubit_count
    if N == 1:
        return np.zeros_like(delta)
    if m.variant is Variant.PAPER:
        return -0.5 * N * np.sin(0.5 * N * delta) * delta_rate
    return -(N - 1) * np.cos(delta) ** (N - 2) * np.sin(delta) * delta_rate


def _envelope(gamma: ArrayLike) -> np.ndarray:
    # Γ >= 0; clamp rounding so f never exceeds 1
    return np.exp(-np.maximum(np.asarray(gamma, dtype=float), 0.0))


def coherence_factors(m: ModelConfig, p: SpectralParams, t: float) -> CoherenceFactors:
    """f = e^-Γ, g = |c|, chi = 0 or π carrying the sign of c"""
    gamma = bath.gamma_exact(p, t)
    delta = bath.delta_exact(p, t)
    f = float(_envelope(gamma))
    c = float(cosine_factor(m, delta))
    g = abs(c)
    chi = math.pi if c < 0 else 0.0
    alpha = f * g * complex(math.cos(m.splitting * t + chi), math.sin(m.splitting * t + chi))
    return CoherenceFactors(f=f, g=g, chi=chi, alpha_offdiag=alpha)


def reduced_pair(m: ModelConfig, p: SpectralParams, t: float) -> Tuple[QubitState, QubitState]:
    """Single-qubit states evolved from |+> and |->"""
    half_alpha = 0.5 * coherence_factors(m, p, t).alpha_offdiag
    rho_plus = np.array([[0.5, half_alpha], [np.conj(half_alpha), 0.5]], dtype=complex)
    rho_minus = np.array([[0.5, -half_alpha], [-np.conj(half_alpha), 0.5]], dtype=complex)
    return QubitState(rho_plus), QubitState(rho_minus)


# --- N-qubit register -----------------------------------------------------------

def _pair_phase(m: ModelConfig, delta: float, products: np.ndarray, pair_sums: np.ndarray) -> np.ndarray:
    """Phase from the bath-mediated qubit-qubit interaction; none for a single qubit"""
    if m.qubit_count == 1:
        return np.ones(np.shape(products), dtype=complex)
    if m.variant is Variant.PAPER:
        return np.exp(-0.25j * m.qubit_count * delta * products)
    return np.exp(-0.5j * delta * pair_sums)


def n_qubit_element(m: ModelConfig, p: SpectralParams, t: float,
                    row: BasisString, column: BasisString) -> complex:
    """Element <row| rho_S(t) |column> of the N-qubit state grown from all-|+>"""
    N = m.qubit_count
    if len(row) != N or len(column) != N:
        raise ContractViolation(
            f"basis strings must have length N={N}, got {len(row)} and {len(column)}")
    if row == column:
        return complex(2.0 ** -N)
    gamma = bath.gamma_exact(p, t)
    delta = bath.delta_exact(p, t)
    total_diff = row.total - column.total
    phase = _pair_phase(m, delta, np.array(row.product - column.product),
                        np.array(row.pair_sum - column.pair_sum))
    value = (2.0 ** -N
             * np.exp(0.5j * m.splitting * t * total_diff)
             * phase
             * math.exp(-0.25 * total_diff ** 2 * gamma))
    return complex(value)


def density_matrix(m: ModelConfig, p: SpectralParams, t: float) -> np.ndarray:
    """Full 2^N x 2^N register state in kron order, same elements as n_qubit_element"""
    N = m.qubit_count
    if N > MAX_DENSITY_QUBITS:
        raise ContractViolation(f"density matrix limited to N <= {MAX_DENSITY_QUBITS}, got {N}")
    strings = list(BasisString.all_strings(N))
    totals = np.array([b.total for b in strings], dtype=float)
    products = np.array([b.product for b in strings], dtype=float)
    pair_sums = np.array([b.pair_sum for b in strings], dtype=float)

    gamma = bath.gamma_exact(p, t)
    delta = bath.delta_exact(p, t)
    total_diff = totals[:, None] - totals[None, :]
    phase = _pair_phase(m, delta, products[:, None] - products[None, :],
                        pair_sums[:, None] - pair_sums[None, :])
    rho = (2.0 ** -N
           * np.exp(0.5j * m.splitting * t * total_diff)
           * phase
           * np.exp(-0.25 * total_diff ** 2 * gamma))
    logger.debug(f"assembled {rho.shape[0]}x{rho.shape[1]} register state at t={t:.6g}")
    return rho


def partial_trace_first(rho: np.ndarray, qubit_count: int) -> np.ndarray:
    """Trace out qubits 2..N, leaving the state of qubit 1"""
    rest = 2 ** (qubit_count - 1)
    if rho.shape != (2 * rest, 2 * rest):
        raise ContractViolation(f"expected a {2 * rest}x{2 * rest} matrix, got {rho.shape}")
    return np.einsum('ajbj->ab', rho.reshape(2, rest, 2, rest))


# --- distinguishability ------------------------------------------------------------

def trace_distance(m: ModelConfig, p: SpectralParams, t: ArrayLike) -> ArrayLike:
    """D(t) = f(t) g(t); arrays in, arrays out"""
    gamma = bath.gamma_exact(p, t)
    delta = bath.delta_exact(p, t)
    values = _envelope(gamma) * np.abs(cosine_factor(m, delta))
    return float(values) if np.ndim(values) == 0 else values


def relative_entropy(D: ArrayLike) -> ArrayLike:
    """S = D ln((1+D)/(1-D)) in nats; infinite at D = 1"""
    values = np.asarray(D, dtype=float)
    if np.any(np.isnan(values)) or np.any(values < 0) or np.any(values > 1):
        raise ContractViolation("relative entropy requires 0 <= D <= 1")
    with np.errstate(divide='ignore', invalid='ignore'):
        entropy = np.where(values >= 1.0, np.inf, 2.0 * values * np.arctanh(values))
    return float(entropy) if entropy.ndim == 0 else entropy


def _entropy_slope(D: np.ndarray) -> np.ndarray:
    """dS/dD = ln((1+D)/(1-D)) + 2D/(1-D^2)"""
    with np.errstate(divide='ignore', invalid='ignore'):
        return 2.0 * np.arctanh(D) + 2.0 * D / (1.0 - D * D)


def _entropy_rate(D: np.ndarray, d_rate: np.ndarray) -> np.ndarray:
    with np.errstate(invalid='ignore'):
        return np.where(d_rate == 0.0, 0.0, d_rate * _entropy_slope(D))


def rates(m: ModelConfig, p: SpectralParams, t: float) -> RateValues:
    """(dD/dt, dS/dt); at a zero of g both one-sided limits are returned"""
    if not t > 0:
        raise ContractViolation(f"rates require t > 0, got {t}")
    kernels = bath.kernel_values(p, t)
    f = float(_envelope(kernels.gamma))
    c = float(cosine_factor(m, kernels.delta))
    c_rate = float(cosine_factor_rate(m, kernels.delta, kernels.delta_rate))
    g = abs(c)
    D = f * g

    if m.qubit_count > 1 and abs(phase_cosine(m, kernels.delta)) <= KINK_ATOL:
        right = f * (abs(c_rate) - kernels.gamma_rate * g)
        left = f * (-abs(c_rate) - kernels.gamma_rate * g)
        logger.debug(f"rates at t={t:.6g} evaluated on a zero of g")
        return RateValues(
            trace_distance_rate=right,
            entropy_rate=float(_entropy_rate(np.array(D), np.array(right))),
            kink=True,
            left_trace_distance_rate=left,
            left_entropy_rate=float(_entropy_rate(np.array(D), np.array(left))),
        )

    d_rate = f * (math.copysign(1.0, c) * c_rate - kernels.gamma_rate * g)
    return RateValues(trace_distance_rate=d_rate,
                      entropy_rate=float(_entropy_rate(np.array(D), np.array(d_rate))))


def coherence_trajectory(m: ModelConfig, p: SpectralParams, times: np.ndarray) -> pd.DataFrame:
    """Vectorised (t, f, g, chi, D, S, dDdt, dSdt) over a time grid

    On an exact zero of g the rate columns carry the mean of the one-sided limits.
    """
    times = np.asarray(times, dtype=float)
    kernels = bath.kernel_values(p, times)
    f = _envelope(kernels.gamma)
    c = cosine_factor(m, kernels.delta)
    c_rate = cosine_factor_rate(m, kernels.delta, kernels.delta_rate)
    g = np.abs(c)
    D = f * g
    d_rate = f * (np.sign(c) * c_rate - kernels.gamma_rate * g)
    frame = pd.DataFrame({
        't': times,
        'f': f,
        'g': g,
        'chi': np.where(c < 0, math.pi, 0.0),
        'D': D,
        'S': relative_entropy(D),
        'dDdt': d_rate,
        'dSdt': _entropy_rate(D, d_rate),
    }, columns=TRAJECTORY_COLUMNS)
    logger.info(f"trajectory: {len(times)} points, N={m.qubit_count}, variant={m.variant.value}")
    return frame
