"""
Bath kernels for N qubits dephasing in a common bosonic environment.

With x = w_c t and u = w / w_c the kernels are

    Γ(t)  = G ∫ u^(s-2) e^(-u) (1 - cos ux) coth(β w_c u / 2) du
    Δ(t)  = G ∫ u^(s-2) e^(-u) (sin ux - ux) du
    Γ'(t) = G w_c ∫ u^(s-1) e^(-u) sin(ux) coth(β w_c u / 2) du
    Δ'(t) = G w_c ∫ u^(s-1) e^(-u) (cos ux - 1) du

At zero temperature all four have closed forms through the Mellin transform
∫ u^(a-1) e^(-u) e^(iux) du = Gamma(a) (1 - ix)^(-a), continued analytically
to a = s - 1 < 0. The quadrature path evaluates the integrals directly and is
the reference the closed forms are checked against.
"""

import logging
import math
from typing import Callable, Tuple, Union

import numpy as np
from scipy import integrate, special

from .cache import kernel_cache
from .errors import ContractViolation, NumericalFailure
from .models import DIVERGENT, KernelValues, LongTimeLimits, SpectralParams

logger = logging.getLogger("dephasim.bath")

ArrayLike = Union[float, np.ndarray]

QUAD_EPSREL = 1e-10
QUAD_EPSABS = 1e-13
QUAD_LIMIT = 500
TAIL_START = 60.0           # in units of w_c; e^-60 below double precision of any kernel
OSCILLATION_THRESHOLD = 10.0
OHMIC_POLE_WIDTH = 1e-6
COTH_SERIES_BELOW = 1e-6    # in units of w_c
PHASE_SERIES_BELOW = 1e-3   # x = w_c t below which sin ux - ux is summed as a series
PHASE_SERIES_TERMS = 4
_LAGUERRE_NODES, _LAGUERRE_WEIGHTS = np.polynomial.laguerre.laggauss(64)


def _as_times(t: ArrayLike) -> Tuple[np.ndarray, bool]:
    times = np.asarray(t, dtype=float)
    if np.any(~np.isfinite(times)) or np.any(times < 0):
        raise ContractViolation("times must be finite and >= 0")
    return times, times.ndim == 0


def _output(values: np.ndarray, scalar: bool) -> ArrayLike:
    return float(values) if scalar else values


def spectral_density(p: SpectralParams, omega: ArrayLike) -> ArrayLike:
    """J(w) = G w^s w_c^(1-s) exp(-w / w_c)"""
    omega_arr = np.asarray(omega, dtype=float)
    if np.any(omega_arr < 0):
        raise ContractViolation("spectral density is defined for w >= 0")
    s, wc = p.ohmicity, p.cutoff
    values = p.coupling * wc * np.power(omega_arr / wc, s) * np.exp(-omega_arr / wc)
    return float(values) if omega_arr.ndim == 0 else values


# --- closed forms (zero temperature) -----------------------------------------

def _log_one_minus_ix(x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Real and imaginary parts of w = log(1 - ix)"""
    return 0.5 * np.log1p(x * x), -np.arctan(x)


def _mellin_difference(p: SpectralParams, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Real and imaginary parts of (1 - (1 - ix)^-(s-1)) / (s-1), finite across s = 1"""
    eps = p.ohmicity - 1.0
    w_re, w_im = _log_one_minus_ix(x)
    if abs(eps) < OHMIC_POLE_WIDTH:
        w = w_re + 1j * w_im
        series = w - eps * w ** 2 / 2 + eps ** 2 * w ** 3 / 6 - eps ** 3 * w ** 4 / 24
        return series.real, series.imag
    a, b = -eps * w_re, -eps * w_im
    expm1_re = np.expm1(a) * np.cos(b) - 2.0 * np.sin(b / 2) ** 2
    expm1_im = np.exp(a) * np.sin(b)
    return -expm1_re / eps, -expm1_im / eps


def _gamma_closed(p: SpectralParams, times: np.ndarray) -> np.ndarray:
    x = p.cutoff * times
    real, _ = _mellin_difference(p, x)
    return p.coupling * special.gamma(p.ohmicity) * real


def _phase_series(s: float, x: np.ndarray, power: int) -> np.ndarray:
    """Sum_k (-1)^k (s)_2k x^(2k+power) / (2k+power)!, the small-x expansion of Δ (power 1) or Δ' (power 0)"""
    total = np.zeros_like(x)
    for k in range(1, PHASE_SERIES_TERMS + 1):
        n = 2 * k + power
        total = total + (-1) ** k * special.poch(s, 2 * k) * x ** n / math.factorial(n)
    return total


def _delta_closed(p: SpectralParams, times: np.ndarray) -> np.ndarray:
    x = p.cutoff * times
    _, imag = _mellin_difference(p, x)
    # -Im of the difference is Gamma(s-1) (1+x^2)^((1-s)/2) sin((s-1) arctan x) / Gamma(s)
    values = -imag - x
    small = x < PHASE_SERIES_BELOW
    if np.any(small):
        # -imag and x agree to O(x^3); subtracting them loses every digit near t = 0
        values = np.where(small, _phase_series(p.ohmicity, x, 1), values)
    # sin y <= y
    return p.coupling * special.gamma(p.ohmicity) * np.minimum(values, 0.0)


def _rates_closed(p: SpectralParams, times: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    s = p.ohmicity
    x = p.cutoff * times
    prefactor = p.coupling * special.gamma(s) * p.cutoff
    envelope = np.exp(-0.5 * s * np.log1p(x * x))
    angle = s * np.arctan(x)
    delta_rate = np.where(x < PHASE_SERIES_BELOW, _phase_series(s, x, 0), envelope * np.cos(angle) - 1.0)
    return prefactor * envelope * np.sin(angle), prefactor * np.minimum(delta_rate, 0.0)


# --- quadrature ---------------------------------------------------------------

def _sin_minus_identity(y: np.ndarray) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    small = np.abs(y) < 1e-2
    y2 = y * y
    series = -y * y2 / 6 * (1 - y2 / 20 * (1 - y2 / 42))
    return np.where(small, series, np.sin(y) - y)


def _thermal_factor(p: SpectralParams, u: np.ndarray) -> np.ndarray:
    """coth(β w_c u / 2), replaced by its Laurent series near u = 0"""
    if p.zero_temperature:
        return np.ones_like(u)
    z = 0.5 * p.inverse_temperature * p.cutoff * u
    with np.errstate(divide='ignore'):
        exact = 1.0 / np.tanh(z)
    series = 1.0 / np.where(z == 0, np.inf, z) + z / 3 - z ** 3 / 45
    return np.where(u < COTH_SERIES_BELOW, series, exact)


# (oscillatory weight, sign of the weighted term, smooth remainder K_s(u, x))
# so that kernel(ux) = sign * weight(ux) + K_s(u, x)
_KERNELS = {
    'gamma': ('cos', -1.0, lambda u, x: np.ones_like(u)),
    'delta': ('sin', 1.0, lambda u, x: -u * x),
    'gamma_rate': ('sin', 1.0, lambda u, x: np.zeros_like(u)),
    'delta_rate': ('cos', 1.0, lambda u, x: -np.ones_like(u)),
}


def _full_kernel(name: str, y: np.ndarray) -> np.ndarray:
    if name == 'gamma':
        return 2.0 * np.sin(y / 2) ** 2
    if name == 'delta':
        return _sin_minus_identity(y)
    if name == 'gamma_rate':
        return np.sin(y)
    return -2.0 * np.sin(y / 2) ** 2


def _weight_function(p: SpectralParams, name: str) -> Callable[[np.ndarray], np.ndarray]:
    """Non-oscillatory factor u^(s-2) e^-u [coth] (or u^(s-1) for the rates)"""
    power = p.ohmicity - (1.0 if name.endswith('_rate') else 2.0)
    thermal = name.startswith('gamma')

    def weight(u):
        u = np.asarray(u, dtype=float)
        value = np.power(u, power) * np.exp(-u)
        if thermal:
            value = value * _thermal_factor(p, u)
        return value

    return weight


def _checked_quad(func, a, b, epsrel, **kwargs) -> float:
    result = integrate.quad(func, a, b, epsabs=QUAD_EPSABS, epsrel=epsrel,
                            limit=QUAD_LIMIT, full_output=1, **kwargs)
    value, abserr = result[0], result[1]
    if len(result) > 3:
        requested = max(QUAD_EPSABS, epsrel * abs(value))
        if abserr > 100.0 * requested:
            raise NumericalFailure(
                f"quadrature on [{a:.6g}, {b:.6g}] did not converge",
                {'value': value, 'error_estimate': abserr, 'requested': requested,
                 'message': str(result[3])})
        logger.debug(f"quad on [{a:.3g}, {b:.3g}] flagged but within tolerance: err={abserr:.2e}")
    return value


def _reduced_integral(p: SpectralParams, name: str, x: float, epsrel: float) -> float:
    """∫_0^∞ weight(u) kernel(ux) du in reduced units (without G or w_c prefactors)"""
    if x == 0.0:
        return 0.0
    weight = _weight_function(p, name)
    osc, sign, smooth = _KERNELS[name]

    def integrand(u):
        return float(weight(u) * _full_kernel(name, u * x))

    if x <= OSCILLATION_THRESHOLD:
        split = min(max(1.0, 1.0 / x), 0.5 * TAIL_START)
        body = (_checked_quad(integrand, 0.0, split, epsrel)
                + _checked_quad(integrand, split, TAIL_START, epsrel))
    else:
        # first half-period carries the small-u cancellation; beyond it QAWO handles the oscillation
        first = math.pi / x
        head = _checked_quad(integrand, 0.0, first, epsrel)
        oscillating = _checked_quad(lambda u: float(weight(u)), first, TAIL_START, epsrel,
                                    weight=osc, wvar=x, maxp1=100)
        remainder = _checked_quad(lambda u: float(weight(u) * smooth(np.asarray(u), x)),
                                  first, TAIL_START, epsrel)
        body = head + sign * oscillating + remainder
        logger.debug(f"{name} at x={x:.4g}: head={head:.6g} osc={oscillating:.6g} rem={remainder:.6g}")

    nodes = TAIL_START + _LAGUERRE_NODES
    tail_values = weight(nodes) * np.exp(nodes) * _full_kernel(name, nodes * x)
    tail = math.exp(-TAIL_START) * float(np.dot(_LAGUERRE_WEIGHTS, tail_values))
    return body + tail


def _quadrature_kernel(p: SpectralParams, name: str, t: float,
                       epsrel: float = QUAD_EPSREL) -> float:
    x = p.cutoff * t
    prefactor = p.coupling * (p.cutoff if name.endswith('_rate') else 1.0)
    if prefactor == 0.0:
        return 0.0
    key = (p, name, float(t), epsrel)
    return prefactor * kernel_cache.get_or_compute(
        key, lambda: _reduced_integral(p, name, x, epsrel))


def _quadrature_array(p: SpectralParams, name: str, times: np.ndarray,
                      epsrel: float = QUAD_EPSREL) -> np.ndarray:
    flat = [_quadrature_kernel(p, name, float(t), epsrel) for t in times.ravel()]
    return np.asarray(flat, dtype=float).reshape(times.shape)


# --- public operations --------------------------------------------------------

def gamma_exact(p: SpectralParams, t: ArrayLike) -> ArrayLike:
    """Decoherence exponent Γ(t); closed form at zero temperature, quadrature otherwise"""
    times, scalar = _as_times(t)
    if p.zero_temperature:
        values = _gamma_closed(p, times)
    else:
        values = _quadrature_array(p, 'gamma', times)
    return _output(values, scalar)


def delta_exact(p: SpectralParams, t: ArrayLike, method: str = "closed") -> ArrayLike:
    """Indirect-interaction phase Δ(t); temperature independent

    method="closed" uses the s = 1 form or its analytic continuation to s != 1,
    with a series for small w_c t. method="quadrature" integrates the defining
    integral (memoized per (params, t)) and is the reference the closed form is
    validated against.
    """
    times, scalar = _as_times(t)
    if method == "closed" or p.ohmicity == 1.0:
        values = _delta_closed(p, times)
    elif method == "quadrature":
        values = _quadrature_array(p, 'delta', times)
    else:
        raise ContractViolation(f"unknown delta method {method!r}")
    return _output(values, scalar)


def kernel_rates(p: SpectralParams, t: ArrayLike) -> Tuple[ArrayLike, ArrayLike]:
    """(dΓ/dt, dΔ/dt); the Γ rate at finite temperature integrates the differentiated integrand"""
    times, scalar = _as_times(t)
    gamma_rate, delta_rate = _rates_closed(p, times)
    if not p.zero_temperature:
        gamma_rate = _quadrature_array(p, 'gamma_rate', times)
    return _output(gamma_rate, scalar), _output(delta_rate, scalar)


def kernel_values(p: SpectralParams, t: ArrayLike) -> KernelValues:
    """All four kernels through the production path (arrays in, arrays out)"""
    gamma_rate, delta_rate = kernel_rates(p, t)
    return KernelValues(gamma=gamma_exact(p, t), delta=delta_exact(p, t),
                        gamma_rate=gamma_rate, delta_rate=delta_rate)


def kernel_quadrature(p: SpectralParams, t: float, epsrel: float = QUAD_EPSREL) -> KernelValues:
    """All four kernels by adaptive quadrature only; the cross-check for the closed forms"""
    _as_times(t)
    t = float(t)
    return KernelValues(
        gamma=_quadrature_kernel(p, 'gamma', t, epsrel),
        delta=_quadrature_kernel(p, 'delta', t, epsrel),
        gamma_rate=_quadrature_kernel(p, 'gamma_rate', t, epsrel),
        delta_rate=_quadrature_kernel(p, 'delta_rate', t, epsrel),
    )


def long_time_limits(p: SpectralParams) -> LongTimeLimits:
    """lim Γ = ∫ J/w^2, Δ ~ (π/2) lim J/w - t ∫ J/w"""
    G, s = p.coupling, p.ohmicity
    if G == 0.0:
        return LongTimeLimits(gamma_limit=0.0, delta_slope=0.0, delta_offset=0.0)
    gamma_s = float(special.gamma(s))
    gamma_limit = G * gamma_s / (s - 1.0) if s > 1.0 else DIVERGENT
    if s == 1.0:
        offset = 0.5 * math.pi * G
    elif s > 1.0:
        offset = 0.0
    else:
        offset = DIVERGENT
    return LongTimeLimits(gamma_limit=gamma_limit,
                          delta_slope=-G * gamma_s * p.cutoff,
                          delta_offset=offset)
