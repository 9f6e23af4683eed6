"""
Brute-force reference for the reduced dynamics.

The bath is discretized into a handful of modes, the qubits x Fock Hamiltonian
is exponentiated densely one S_z block at a time, and the environment plus N-1
qubits are traced out of the resulting state vector. Nothing here uses the
displaced-oscillator solution the rest of the package is built on.
"""

import logging
import math
from functools import reduce
from typing import Any, Dict, Iterable, List, Sequence, Tuple

import numpy as np
from scipy import integrate, linalg, stats

from . import bath
from .dynamics import cosine_factor
from .errors import ContractViolation, NumericalFailure
from .models import (
    BasisString,
    DiscreteBath,
    ExactResult,
    ModelConfig,
    QubitState,
    SpectralParams,
    Variant,
)

logger = logging.getLogger("dephasim.oracle")

MAX_DIMENSION = 2 ** 14
MAX_BATH_DIMENSION = 2 ** 11
DEFAULT_LEAKAGE_BOUND = 1e-10
TRUNCATION_TARGET = 1e-12
MAX_FOCK_DIM = 64
NORM_TOLERANCE = 1e-10
AGREEMENT_TOLERANCE = 1e-6
DEFAULT_ORDER_MODES = (50, 100, 200)


def discretize(p: SpectralParams, modes: int, omega_max: float, truncation: int = 2) -> DiscreteBath:
    """Midpoint rule on [0, omega_max]: w_k = (k - 1/2) h, |g_k|^2 = J(w_k) h / 4"""
    if int(modes) != modes or modes < 1:
        raise ContractViolation(f"mode count K must be an integer >= 1, got {modes}")
    if not omega_max > 0:
        raise ContractViolation(f"omega_max must be > 0, got {omega_max}")
    if not p.zero_temperature:
        raise ContractViolation("the discrete bath is zero-temperature only")
    step = omega_max / modes
    frequencies = (np.arange(1, int(modes) + 1) - 0.5) * step
    couplings = np.sqrt(np.asarray(bath.spectral_density(p, frequencies)) * step / 4.0)
    return DiscreteBath(frequencies, couplings, (int(truncation),) * int(modes))


def discrete_kernels(b: DiscreteBath, t):
    """(Γ_K, Δ_K) as sums over modes; arrays of t give arrays"""
    times = np.asarray(t, dtype=float)
    if np.any(times < 0):
        raise ContractViolation("times must be >= 0")
    w = b.frequencies
    weights = 4.0 * np.abs(b.couplings) ** 2 / w ** 2
    phases = np.multiply.outer(times, w)
    gamma = (2.0 * np.sin(0.5 * phases) ** 2) @ weights
    delta = (np.sin(phases) - phases) @ weights
    if times.ndim == 0:
        return float(gamma), float(delta)
    return gamma, delta


# --- Fock truncation ------------------------------------------------------------

def _photon_means(b: DiscreteBath, qubit_count: int) -> np.ndarray:
    # largest branch displacement |S_z| 2|g|/w with |S_z| <= N
    return (2.0 * qubit_count * np.abs(b.couplings) / b.frequencies) ** 2


def truncation_leakage(b: DiscreteBath, qubit_count: int) -> float:
    """Union bound on the probability mass above every mode's Fock cutoff"""
    means = _photon_means(b, qubit_count)
    tails = stats.poisson.sf(np.asarray(b.truncation) - 1, means)
    return float(min(1.0, np.sum(tails)))


def suggest_truncation(b: DiscreteBath, qubit_count: int,
                       target: float = TRUNCATION_TARGET) -> DiscreteBath:
    """Smallest per-mode Fock dimensions whose total leakage stays below target"""
    per_mode = target / b.mode_count
    dims = []
    for mean in _photon_means(b, qubit_count):
        d = 2
        while stats.poisson.sf(d - 1, mean) >= per_mode and d < MAX_FOCK_DIM:
            d += 1
        dims.append(d)
    logger.debug(f"suggested Fock dimensions {dims} for N={qubit_count}")
    return b.with_truncation(tuple(dims))


# --- exact propagation ----------------------------------------------------------

def _annihilation(dim: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), k=1)


def _embed(ops: Sequence[np.ndarray]) -> np.ndarray:
    return reduce(np.kron, ops)


def _bath_operators(b: DiscreteBath) -> Tuple[np.ndarray, np.ndarray]:
    """sum_k w_k b_k^+ b_k and sum_k (g_k^* b_k + g_k b_k^+) on the truncated Fock space"""
    dims = b.truncation
    bath_dim = math.prod(dims)
    identities = [np.eye(d) for d in dims]

    bath_energy = np.zeros((bath_dim, bath_dim), dtype=complex)
    bath_field = np.zeros((bath_dim, bath_dim), dtype=complex)
    for k, (w, g, d) in enumerate(zip(b.frequencies, b.couplings, dims)):
        a = _annihilation(d)
        factors = list(identities)
        factors[k] = a.T @ a
        bath_energy += w * _embed(factors)
        factors[k] = np.conj(g) * a + g * a.T
        bath_field += _embed(factors)
    return bath_energy, bath_field


def _propagate(qubit_count: int, b: DiscreteBath, t: float, initial_sign: int,
               splitting: float) -> np.ndarray:
    """
    ψ(t) for all-|±> ⊗ vacuum under (w0/2) S_z + sum_k w_k b_k^+ b_k + S_z sum_k (g_k^* b_k + g_k b_k^+)

    S_z is diagonal in the qubit basis, so the Hamiltonian is block diagonal with one
    bath-sized block per S_z eigenvalue. Rows of the result follow BasisString kron order.
    """
    bath_energy, bath_field = _bath_operators(b)
    strings = list(BasisString.all_strings(qubit_count))
    qubit = np.array([1.0, float(initial_sign)]) / math.sqrt(2.0)
    amplitudes = _embed([qubit] * qubit_count)

    branches: Dict[int, np.ndarray] = {}
    for total in sorted({s.total for s in strings}):
        block = 0.5 * splitting * total * np.eye(len(bath_energy)) + bath_energy + total * bath_field
        # first column of exp(-iHt) is the propagated vacuum
        branches[total] = linalg.expm(-1j * t * block)[:, 0]
    return np.stack([amplitude * branches[s.total] for amplitude, s in zip(amplitudes, strings)])


def exact_reduced_state(qubit_count: int, b: DiscreteBath, t: float, initial_sign: int = 1,
                        splitting: float = 0.0,
                        leakage_bound: float = DEFAULT_LEAKAGE_BOUND) -> ExactResult:
    """
    Propagate all-|±> ⊗ vacuum with the full Hamiltonian and reduce to qubit 1

    Args:
        qubit_count: N
        b: discrete bath with its Fock truncation
        t: time >= 0
        initial_sign: +1 for |+>, -1 for |->
        splitting: qubit splitting w0
        leakage_bound: largest tolerated truncation leakage

    Returns:
        ExactResult with the reduced state and propagation diagnostics
    """
    if initial_sign not in (1, -1):
        raise ContractViolation(f"initial_sign must be +1 or -1, got {initial_sign}")
    if not t >= 0:
        raise ContractViolation(f"time must be >= 0, got {t}")
    bath_dim = math.prod(b.truncation)
    full_dim = 2 ** qubit_count * bath_dim
    if full_dim > MAX_DIMENSION:
        raise ContractViolation(
            f"full dimension {full_dim} exceeds {MAX_DIMENSION}; reduce N, modes or Fock dimensions")
    if bath_dim > MAX_BATH_DIMENSION:
        raise ContractViolation(
            f"bath dimension {bath_dim} exceeds {MAX_BATH_DIMENSION} (dense blocks of "
            f"{bath_dim ** 2 * 16 / 2 ** 20:.0f} MiB); reduce modes or Fock dimensions")

    leakage = truncation_leakage(b, qubit_count)
    if leakage > leakage_bound:
        raise NumericalFailure(
            "Fock truncation too small; raise the per-mode dimension",
            {'truncation_leakage': leakage, 'bound': leakage_bound,
             'truncation': list(b.truncation)})

    psi = _propagate(qubit_count, b, t, initial_sign, splitting)
    norm = float(np.vdot(psi, psi).real)
    norm_error = abs(norm - 1.0)
    # tr(rho^2) = |psi|^4 for the pure full state
    purity_error = abs(norm * norm - 1.0)
    if norm_error > NORM_TOLERANCE:
        logger.warning(f"exact propagation lost norm: |tr rho - 1| = {norm_error:.2e} at t={t:.6g}")

    first = psi.reshape(2, full_dim // 2)
    reduced = QubitState(first @ first.conj().T)
    logger.debug(f"exact evolution: dim={full_dim}, t={t:.6g}, norm_error={norm_error:.2e}")
    return ExactResult(reduced=reduced, norm_error=norm_error, truncation_leakage=leakage,
                       purity_error=purity_error, hermiticity_error=reduced.hermiticity_error())


# --- variant arbitration ----------------------------------------------------------

def predicted_coherence(qubit_count: int, variant: Variant, gamma: float, delta: float) -> float:
    """e^-Γ times the reduced cosine factor of one variant"""
    model = ModelConfig(qubit_count=qubit_count, variant=variant)
    return math.exp(-gamma) * abs(float(cosine_factor(model, delta)))


def arbitrate_variants(qubit_count: int, b: DiscreteBath, times: Iterable[float],
                       leakage_bound: float = DEFAULT_LEAKAGE_BOUND) -> Dict[str, Any]:
    """Compare both reduced-coherence formulas with exact evolution at each time

    Agreement is enforced only for N <= 2, where the formulas coincide.
    """
    if qubit_count > 3:
        raise ContractViolation(f"variant arbitration supports N <= 3, got {qubit_count}")
    rows: List[Dict[str, float]] = []
    for t in times:
        exact = exact_reduced_state(qubit_count, b, float(t), leakage_bound=leakage_bound)
        gamma, delta = discrete_kernels(b, float(t))
        exact_abs = 2.0 * abs(exact.reduced.offdiagonal)
        paper = predicted_coherence(qubit_count, Variant.PAPER, gamma, delta)
        pairwise = predicted_coherence(qubit_count, Variant.PAIRWISE, gamma, delta)
        rows.append({
            't': float(t),
            'gamma': gamma,
            'delta': delta,
            'exact': exact_abs,
            'paper': paper,
            'pairwise': pairwise,
            'paper_deviation': abs(paper - exact_abs),
            'pairwise_deviation': abs(pairwise - exact_abs),
            **exact.to_dict(),
        })

    worst = {
        'paper': max((r['paper_deviation'] for r in rows), default=0.0),
        'pairwise': max((r['pairwise_deviation'] for r in rows), default=0.0),
    }
    if abs(worst['paper'] - worst['pairwise']) <= 1e-12:
        closest = 'both'
    else:
        closest = min(worst, key=worst.get)

    report = {
        'N': int(qubit_count),
        'bath': b.to_dict(),
        'rows': rows,
        'max_deviation': worst,
        'closest_variant': closest,
        'agreement_required': qubit_count <= 2,
    }
    logger.info(f"arbitration N={qubit_count}: closest={closest}, "
                f"paper={worst['paper']:.2e}, pairwise={worst['pairwise']:.2e}")

    if qubit_count <= 2 and max(worst.values()) > AGREEMENT_TOLERANCE:
        raise NumericalFailure("exact evolution disagrees with the reduced formula", report)
    return report


# --- discretization convergence -------------------------------------------------

def _band_limited_kernels(p: SpectralParams, t: float, omega_max: float) -> Tuple[float, float]:
    """Continuum kernels restricted to [0, omega_max], the target of the midpoint sums"""
    def gamma_integrand(w):
        return bath.spectral_density(p, w) * 2.0 * math.sin(0.5 * w * t) ** 2 / w ** 2

    def delta_integrand(w):
        return bath.spectral_density(p, w) * (math.sin(w * t) - w * t) / w ** 2

    options = dict(epsabs=1e-14, epsrel=1e-12, limit=500)
    gamma, _ = integrate.quad(gamma_integrand, 0.0, omega_max, **options)
    delta, _ = integrate.quad(delta_integrand, 0.0, omega_max, **options)
    return gamma, delta


def midpoint_order(p: SpectralParams, t: float, omega_max: float,
                   modes: Sequence[int] = DEFAULT_ORDER_MODES) -> Dict[str, Any]:
    """Empirical convergence order of Γ_K, Δ_K toward the band-limited continuum"""
    if len(modes) < 2:
        raise ContractViolation("midpoint_order needs at least two mode counts")
    reference = _band_limited_kernels(p, t, omega_max)
    errors = {'gamma': [], 'delta': []}
    for K in modes:
        gamma_K, delta_K = discrete_kernels(discretize(p, K, omega_max), t)
        errors['gamma'].append(abs(gamma_K - reference[0]))
        errors['delta'].append(abs(delta_K - reference[1]))

    log_modes = np.log(np.asarray(modes, dtype=float))
    orders = {name: float(-np.polyfit(log_modes, np.log(values), 1)[0])
              for name, values in errors.items()}
    return {
        'modes': list(modes),
        'reference': {'gamma': reference[0], 'delta': reference[1]},
        'errors': errors,
        'order': orders,
    }
