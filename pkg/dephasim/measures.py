"""
Non-Markovianity measures from the trace-distance curve.

D(t) is continuous and piecewise smooth; its only non-smooth points are the
zeros of the cosine factor. Rises of D are located between refined local minima
(or kinks) and the following refined maxima (or the horizon), and both measures
are evaluated on the same intervals by the fundamental theorem of calculus.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from typing import List, Optional, Tuple

import numpy as np
import pandas as pd
from scipy import optimize

from . import bath
from .dynamics import phase_cosine, relative_entropy, trace_distance
from .errors import ContractViolation, DephasimError, NumericalFailure
from .models import (
    MeasureResult,
    ModelConfig,
    MonotoneInterval,
    SpectralParams,
    SweepAxis,
    SweepSpec,
)

logger = logging.getLogger("dephasim.measures")

DEFAULT_GRID_POINTS = 20001
MIN_GRID_POINTS = 1000
DEFAULT_RELATIVE_TOL = 1e-9   # refinement tolerance in units of T
STEP_NOISE_FLOOR = 1e-14      # |ΔD| per grid step treated as flat
AUDIT_SAMPLES = 17
AUDIT_SLACK = 1e-10
SWEEP_TABLE_COLUMNS = ['axis', 'value', 'blp', 'entropy', 'intervals']
SWEEP_COLUMNS = SWEEP_TABLE_COLUMNS + ['error']


def default_tol(horizon: float) -> float:
    return DEFAULT_RELATIVE_TOL * horizon


def _check_resolution(grid_points: int, tol: float) -> None:
    if int(grid_points) != grid_points or grid_points < MIN_GRID_POINTS:
        raise ContractViolation(f"grid_points must be an integer >= {MIN_GRID_POINTS}, got {grid_points}")
    if not tol > 0:
        raise ContractViolation(f"tol must be > 0, got {tol}")


def _locate_kinks(m: ModelConfig, p: SpectralParams, times: np.ndarray,
                  delta: np.ndarray) -> np.ndarray:
    """Zeros of the cosine factor, bracketed on the grid and polished by Brent's method"""
    if m.qubit_count == 1:
        return np.empty(0)
    base = phase_cosine(m, delta)
    exact = times[base == 0.0]
    crossings = np.flatnonzero(base[:-1] * base[1:] < 0)

    def phase_at(t: float) -> float:
        return float(phase_cosine(m, bath.delta_exact(p, t)))

    polished = [optimize.brentq(phase_at, times[i], times[i + 1], xtol=1e-15, rtol=4 * np.finfo(float).eps)
                for i in crossings]
    kinks = np.union1d(exact, np.asarray(polished, dtype=float))
    logger.debug(f"{len(kinks)} zeros of the cosine factor on [0, {times[-1]:.6g}]")
    return kinks


def _refine(m: ModelConfig, p: SpectralParams, bracket: Tuple[float, float],
            t_grid: float, D_grid: float, tol: float, maximize: bool) -> Tuple[float, float]:
    """Polish a grid extremum inside its bracket; never returns a worse point than the grid one"""
    sign = -1.0 if maximize else 1.0
    low, high = bracket
    if high - low <= tol:
        return t_grid, D_grid
    found = optimize.minimize_scalar(lambda t: sign * trace_distance(m, p, t),
                                     bounds=(low, high), method='bounded',
                                     options={'xatol': tol})
    t_best, D_best = float(found.x), float(sign * found.fun)
    if sign * D_best < sign * D_grid:
        return t_best, D_best
    return t_grid, D_grid


def _audit(m: ModelConfig, p: SpectralParams, intervals: List[MonotoneInterval]) -> None:
    for interval in intervals:
        if not interval.t_start < interval.t_end or interval.D_end < interval.D_start:
            raise NumericalFailure(
                "refined extrema out of order; increase grid_points",
                {'t_start': interval.t_start, 't_end': interval.t_end})
        samples = np.linspace(interval.t_start, interval.t_end, AUDIT_SAMPLES + 2)
        drops = np.diff(np.asarray(trace_distance(m, p, samples)))
        if np.any(drops < -AUDIT_SLACK):
            raise NumericalFailure(
                "trace distance not monotone on a detected interval; increase grid_points",
                {'t_start': interval.t_start, 't_end': interval.t_end,
                 'largest_drop': float(-drops.min())})


def find_increase_intervals(m: ModelConfig, p: SpectralParams,
                            grid_points: int = DEFAULT_GRID_POINTS,
                            tol: Optional[float] = None) -> List[MonotoneInterval]:
    """Maximal intervals of [0, T] on which D(t) does not decrease"""
    tol = default_tol(m.horizon) if tol is None else tol
    _check_resolution(grid_points, tol)

    grid = np.linspace(0.0, m.horizon, int(grid_points))
    delta = np.asarray(bath.delta_exact(p, grid))
    kinks = _locate_kinks(m, p, grid, delta)

    times = np.union1d(grid, kinks)
    is_kink = np.isin(times, kinks)
    D = np.asarray(trace_distance(m, p, times))

    steps = np.diff(D)
    direction = np.where(steps > STEP_NOISE_FLOOR, 1, np.where(steps < -STEP_NOISE_FLOOR, -1, 0))
    moving = np.flatnonzero(direction)
    if moving.size == 0:
        logger.info("trace distance is flat on the grid; no intervals")
        return []
    turns = direction[moving]
    last = len(times) - 1

    # (bracket of a rise start, bracket of the following rise end or None for the horizon)
    rises: List[Tuple[Tuple[int, int], Optional[Tuple[int, int]]]] = []
    start: Optional[Tuple[int, int]] = (moving[0], moving[0]) if turns[0] == 1 else None
    for a in range(len(moving) - 1):
        left, right = moving[a], moving[a + 1]
        if turns[a] == -1 and turns[a + 1] == 1:
            start = (left, right)
        elif turns[a] == 1 and turns[a + 1] == -1 and start is not None:
            rises.append((start, (left, right + 1)))
            start = None
    if start is not None:
        rises.append((start, None))

    intervals = []
    for (lo, hi), end in rises:
        # minimum lies at a grid point in [lo, hi]; widen by one step for the polish
        window = slice(lo, hi + 1)
        kink_here = np.flatnonzero(is_kink[window])
        if kink_here.size:
            k = lo + kink_here[np.argmin(D[window][kink_here])]
            t_start, D_start, opened_at_kink = times[k], D[k], True
        else:
            k = lo + int(np.argmin(D[window]))
            bracket = (times[max(lo, k - 1)], times[min(hi + 1, last)])
            t_start, D_start = _refine(m, p, bracket, times[k], D[k], tol, maximize=False)
            opened_at_kink = False

        if end is None:
            t_end, D_end = float(times[last]), float(D[last])
        else:
            e_lo, e_hi = end
            window = slice(e_lo, e_hi + 1)
            k = e_lo + int(np.argmax(D[window]))
            bracket = (times[max(e_lo, k - 1)], times[min(e_hi, k + 1, last)])
            t_end, D_end = _refine(m, p, bracket, times[k], D[k], tol, maximize=True)

        D_start, D_end = float(D_start), float(D_end)
        intervals.append(MonotoneInterval(
            t_start=float(t_start), t_end=float(t_end),
            D_start=D_start, D_end=D_end,
            S_start=relative_entropy(D_start), S_end=relative_entropy(D_end),
            kink_start=opened_at_kink))

    _audit(m, p, intervals)
    logger.info(f"{len(intervals)} backflow intervals on [0, {m.horizon:.6g}] "
                f"(N={m.qubit_count}, s={p.ohmicity:.6g})")
    return intervals


def _result(intervals: List[MonotoneInterval], horizon: float,
            grid_points: int, tol: float) -> MeasureResult:
    return MeasureResult(
        blp=math.fsum(i.blp_gain for i in intervals),
        entropy=math.fsum(i.entropy_gain for i in intervals),
        intervals=intervals,
        horizon=horizon,
        grid_points=int(grid_points),
        refinement_tol=tol,
    )


def measure(m: ModelConfig, p: SpectralParams, grid_points: int = DEFAULT_GRID_POINTS,
            tol: Optional[float] = None) -> MeasureResult:
    """Both measures from one interval search"""
    tol = default_tol(m.horizon) if tol is None else tol
    intervals = find_increase_intervals(m, p, grid_points, tol)
    return _result(intervals, m.horizon, grid_points, tol)


def blp_measure(m: ModelConfig, p: SpectralParams, grid_points: int = DEFAULT_GRID_POINTS,
                tol: Optional[float] = None) -> MeasureResult:
    """Total rise of the trace distance over [0, T]"""
    return measure(m, p, grid_points, tol)


def entropy_measure(m: ModelConfig, p: SpectralParams, grid_points: int = DEFAULT_GRID_POINTS,
                    tol: Optional[float] = None) -> MeasureResult:
    """Total rise of the relative entropy over the same intervals as the BLP measure"""
    return measure(m, p, grid_points, tol)


def truncate_result(m: ModelConfig, p: SpectralParams, result: MeasureResult,
                    horizon: float) -> MeasureResult:
    """Restrict a result computed on a longer horizon to [0, horizon]"""
    if horizon > result.horizon:
        raise ContractViolation(f"cannot extend a result from T={result.horizon} to T={horizon}")
    kept = []
    for interval in result.intervals:
        if interval.t_start >= horizon:
            break
        if interval.t_end > horizon:
            D_end = float(trace_distance(m, p, horizon))
            interval = replace(interval, t_end=horizon, D_end=D_end, S_end=relative_entropy(D_end))
        kept.append(interval)
    return _result(kept, horizon, result.grid_points, result.refinement_tol)


# --- sweeps -------------------------------------------------------------------

def _row(axis: SweepAxis, value: float, result: Optional[MeasureResult],
         error: Optional[str] = None) -> dict:
    return {
        'axis': axis.value,
        'value': value,
        'blp': result.blp if result else None,
        'entropy': result.entropy if result else None,
        'intervals': len(result.intervals) if result else None,
        'error': error,
    }


def _sweep_point(spec: SweepSpec, value: float, grid_points: int, tol: Optional[float]) -> dict:
    try:
        model, params = spec.configure(value)
        result = measure(model, params, grid_points, tol)
        logger.info(f"sweep {spec.axis.value}={value:.6g}: blp={result.blp:.6g}")
        return _row(spec.axis, value, result)
    except DephasimError as e:
        logger.warning(f"sweep {spec.axis.value}={value:.6g} failed: {e}")
        return _row(spec.axis, value, None, str(e))


def _horizon_sweep(spec: SweepSpec, grid_points: int, tol: Optional[float]) -> List[dict]:
    """One interval search at the largest T, truncated to every requested horizon"""
    longest = spec.values[-1]
    model = replace(spec.model, horizon=float(longest))
    try:
        full = measure(model, spec.bath, grid_points, tol)
    except DephasimError as e:
        logger.warning(f"horizon sweep failed at T={longest:.6g}: {e}")
        return [_row(spec.axis, value, None, str(e)) for value in spec.values]
    rows = []
    for value in spec.values:
        try:
            rows.append(_row(spec.axis, value,
                             truncate_result(model, spec.bath, full, float(value))))
        except DephasimError as e:
            rows.append(_row(spec.axis, value, None, str(e)))
    return rows


def sweep(spec: SweepSpec, grid_points: int = DEFAULT_GRID_POINTS,
          tol: Optional[float] = None, jobs: int = 1) -> pd.DataFrame:
    """
    One row per axis value, in the order of spec.values

    Args:
        spec: axis, values and the fixed model/bath around them
        grid_points: uniform grid size per row
        tol: extremum refinement tolerance; defaults to 1e-9 T per row
        jobs: worker threads; the table does not depend on it

    Returns:
        DataFrame with columns axis, value, blp, entropy, intervals, error
    """
    if jobs < 1:
        raise ContractViolation(f"jobs must be >= 1, got {jobs}")
    logger.info(f"sweep over {spec.axis.value}: {len(spec.values)} values, jobs={jobs}")

    if spec.axis is SweepAxis.HORIZON:
        rows = _horizon_sweep(spec, grid_points, tol)
    elif jobs == 1:
        rows = [_sweep_point(spec, value, grid_points, tol) for value in spec.values]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(lambda v: _sweep_point(spec, v, grid_points, tol), spec.values))

    return pd.DataFrame(rows, columns=SWEEP_COLUMNS)
