"""
Named parameter studies: families of sweeps that regenerate the standard
non-Markovianity curves (ohmicity, horizon, coupling, cutoff and qubit-count
dependence).
"""

import logging
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

from .errors import ContractViolation
from .measures import DEFAULT_GRID_POINTS, SWEEP_COLUMNS, sweep
from .models import ModelConfig, SpectralParams, SweepAxis, SweepSpec, Variant

logger = logging.getLogger("dephasim.studies")

STUDY_COLUMNS = ['series'] + SWEEP_COLUMNS
STUDY_TABLE_COLUMNS = ['series', 'axis', 'value', 'blp', 'entropy', 'intervals']
HORIZON = 20.0


def _span(start: float, stop: float, step: float) -> Tuple[float, ...]:
    count = int(round((stop - start) / step)) + 1
    return tuple(float(v) for v in np.round(start + step * np.arange(count), 12))


@dataclass(frozen=True)
class StudySeries:
    label: str
    spec: SweepSpec


def _ohmicity(qubit_count: int) -> List[StudySeries]:
    spec = SweepSpec(SweepAxis.OHMICITY, _span(0.5, 5.0, 0.05),
                     ModelConfig(qubit_count=qubit_count, horizon=HORIZON),
                     SpectralParams(coupling=1.0, cutoff=3.0))
    return [StudySeries(f"N={qubit_count}", spec)]


def _horizon() -> List[StudySeries]:
    series = []
    for qubit_count in (1, 2):
        for ohmicity in (0.5, 1.0, 2.0, 3.0):
            spec = SweepSpec(SweepAxis.HORIZON, _span(1.0, 40.0, 1.0),
                             ModelConfig(qubit_count=qubit_count),
                             SpectralParams(coupling=1.0, ohmicity=ohmicity, cutoff=3.0))
            series.append(StudySeries(f"N={qubit_count},s={ohmicity:g}", spec))
    return series


def _coupling(ohmicities: Tuple[float, ...], qubit_counts: Tuple[int, ...]) -> List[StudySeries]:
    series = []
    for ohmicity in ohmicities:
        for qubit_count in qubit_counts:
            for cutoff in (0.5, 1.0, 2.0, 3.0):
                spec = SweepSpec(SweepAxis.COUPLING, _span(0.1, 4.0, 0.1),
                                 ModelConfig(qubit_count=qubit_count, horizon=HORIZON),
                                 SpectralParams(ohmicity=ohmicity, cutoff=cutoff))
                series.append(StudySeries(
                    f"N={qubit_count},s={ohmicity:g},omega_c={cutoff:g}", spec))
    return series


def _cutoff() -> List[StudySeries]:
    series = []
    for qubit_count in (1, 2):
        for coupling in (0.5, 1.0, 2.0, 3.0):
            spec = SweepSpec(SweepAxis.CUTOFF, _span(0.1, 4.0, 0.1),
                             ModelConfig(qubit_count=qubit_count, horizon=HORIZON),
                             SpectralParams(coupling=coupling, ohmicity=3.0))
            series.append(StudySeries(f"N={qubit_count},G={coupling:g}", spec))
    return series


def _qubit_count() -> List[StudySeries]:
    return [StudySeries(f"variant={variant.value}",
                        SweepSpec(SweepAxis.QUBIT_COUNT, tuple(float(n) for n in range(1, 9)),
                                  ModelConfig(variant=variant, horizon=HORIZON),
                                  SpectralParams(coupling=1.0, ohmicity=3.0, cutoff=3.0)))
            for variant in Variant]


STUDIES: Dict[str, Callable[[], List[StudySeries]]] = {
    'ohmicity-single': lambda: _ohmicity(1),
    'ohmicity-pair': lambda: _ohmicity(2),
    'horizon': _horizon,
    'coupling': lambda: _coupling((3.0,), (1, 2)),
    'cutoff': _cutoff,
    'qubit-count': _qubit_count,
    'coupling-ohmic': lambda: _coupling((1.0, 0.5), (2,)),
}


def study_series(name: str) -> List[StudySeries]:
    if name not in STUDIES:
        raise ContractViolation(f"unknown study {name!r}; choose from {', '.join(sorted(STUDIES))}")
    return STUDIES[name]()


def run_study(name: str, grid_points: int = DEFAULT_GRID_POINTS,
              tol: Optional[float] = None, jobs: int = 1) -> pd.DataFrame:
    """All sweeps of a named study stacked into one table tagged by series"""
    frames = []
    for entry in study_series(name):
        logger.info(f"study {name}: series {entry.label}")
        frame = sweep(entry.spec, grid_points=grid_points, tol=tol, jobs=jobs)
        frame.insert(0, 'series', entry.label)
        frames.append(frame)
    return pd.concat(frames, ignore_index=True)[STUDY_COLUMNS]
