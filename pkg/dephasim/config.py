"""
Run configuration: defaults < JSON file < command-line flags.

Every setting has a flat dotted key (``bath.s``, ``model.N``, ...). Files are
flat JSON objects over the same keys; unknown keys and bad values raise
ConfigError naming the key.
"""

import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, Mapping, Optional, Tuple

import numpy as np

from .errors import ConfigError, ContractViolation
from .models import INFINITE, ModelConfig, SpectralParams, SweepAxis, SweepSpec, Variant

logger = logging.getLogger("dephasim.config")

DEFAULTS: Dict[str, Any] = {
    'model.N': 2,
    'model.omega0': 0.0,
    'model.variant': 'paper',
    'model.T': 20.0,
    'bath.G': 1.0,
    'bath.s': 1.0,
    'bath.omega_c': 3.0,
    'bath.beta': 'inf',
    'grid_points': 20001,
    'tol': None,
    'output': None,
    'format': None,
    'jobs': 1,
    'sweep.axis': 's',
    'sweep.from': 0.5,
    'sweep.to': 5.0,
    'sweep.step': 0.05,
    'oracle.modes': 2,
    'oracle.omega_max': 4.0,
    'oracle.fock_dim': None,
    'oracle.times': [1.0, 2.5, 4.3],
    'oracle.leakage_bound': 1e-10,
    'study.name': 'ohmicity-pair',
}


# --- value parsers ---------------------------------------------------------------
# each takes a raw JSON value or a flag string and returns the typed value or raises ValueError

def _integer(raw: Any) -> int:
    if isinstance(raw, bool):
        raise ValueError("expected an integer, got a boolean")
    if isinstance(raw, str):
        return int(raw.strip())
    if isinstance(raw, float) and raw.is_integer():
        return int(raw)
    if isinstance(raw, int):
        return raw
    raise ValueError(f"expected an integer, got {raw!r}")


def _real(raw: Any) -> float:
    if isinstance(raw, bool):
        raise ValueError("expected a number, got a boolean")
    if isinstance(raw, (int, float)):
        value = float(raw)
    elif isinstance(raw, str):
        value = float(raw.strip())
    else:
        raise ValueError(f"expected a number, got {raw!r}")
    if not math.isfinite(value):
        raise ValueError(f"expected a finite number, got {raw!r}")
    return value


def _text(raw: Any) -> str:
    if not isinstance(raw, str):
        raise ValueError(f"expected a string, got {raw!r}")
    return raw


def _choice(*options: str) -> Callable[[Any], str]:
    def parse(raw: Any) -> str:
        value = _text(raw).strip().lower()
        if value not in options:
            raise ValueError(f"expected one of {', '.join(options)}, got {raw!r}")
        return value
    return parse


def _checked(parse: Callable[[Any], Any], test: Callable[[Any], bool], rule: str) -> Callable[[Any], Any]:
    def run(raw: Any) -> Any:
        value = parse(raw)
        if not test(value):
            raise ValueError(f"must be {rule}, got {value}")
        return value
    return run


def _optional(parse: Callable[[Any], Any]) -> Callable[[Any], Any]:
    return lambda raw: None if raw is None else parse(raw)


def _inverse_temperature(raw: Any) -> float:
    if isinstance(raw, str) and raw.strip().lower() in ('inf', 'infinity'):
        return INFINITE
    value = _real(raw)
    if not value > 0:
        raise ValueError(f"must be > 0 or \"inf\", got {value}")
    return value


def _time_list(raw: Any) -> Tuple[float, ...]:
    if isinstance(raw, str):
        items = [item for item in raw.split(',') if item.strip()]
    elif isinstance(raw, list):
        items = raw
    else:
        raise ValueError(f"expected a list of times, got {raw!r}")
    times = tuple(_real(item) for item in items)
    if not times or any(t < 0 for t in times):
        raise ValueError("expected a nonempty list of times >= 0")
    return times


_positive = lambda v: v > 0  # noqa: E731

PARSERS: Dict[str, Callable[[Any], Any]] = {
    'model.N': _checked(_integer, lambda v: v >= 1, ">= 1"),
    'model.omega0': _real,
    'model.variant': _choice('paper', 'pairwise'),
    'model.T': _checked(_real, _positive, "> 0"),
    'bath.G': _checked(_real, lambda v: v >= 0, ">= 0"),
    'bath.s': _checked(_real, _positive, "> 0"),
    'bath.omega_c': _checked(_real, _positive, "> 0"),
    'bath.beta': _inverse_temperature,
    'grid_points': _checked(_integer, lambda v: v >= 1000, ">= 1000"),
    'tol': _optional(_checked(_real, _positive, "> 0")),
    'output': _optional(_text),
    'format': _optional(_choice('csv', 'json')),
    'jobs': _checked(_integer, lambda v: v >= 1, ">= 1"),
    'sweep.axis': _choice(*(axis.value.lower() for axis in SweepAxis)),
    'sweep.from': _real,
    'sweep.to': _real,
    'sweep.step': _checked(_real, _positive, "> 0"),
    'oracle.modes': _checked(_integer, lambda v: v >= 1, ">= 1"),
    'oracle.omega_max': _checked(_real, _positive, "> 0"),
    'oracle.fock_dim': _optional(_checked(_integer, lambda v: v >= 2, ">= 2")),
    'oracle.times': _time_list,
    'oracle.leakage_bound': _checked(_real, _positive, "> 0"),
    'study.name': _text,
}


# --- resolved configuration --------------------------------------------------------

@dataclass(frozen=True)
class SweepSettings:
    axis: SweepAxis = SweepAxis.OHMICITY
    start: float = 0.5
    stop: float = 5.0
    step: float = 0.05

    def values(self) -> Tuple[float, ...]:
        """start, start + step, ... up to stop inclusive"""
        if self.stop < self.start:
            raise ContractViolation(f"sweep range is empty: from {self.start} to {self.stop}")
        count = int(math.floor((self.stop - self.start) / self.step + 1e-9)) + 1
        values = np.round(self.start + self.step * np.arange(count), 12)
        return tuple(float(v) for v in values)


@dataclass(frozen=True)
class OracleSettings:
    modes: int = 2
    omega_max: float = 4.0
    fock_dim: Optional[int] = None
    times: Tuple[float, ...] = (1.0, 2.5, 4.3)
    leakage_bound: float = 1e-10


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved settings for one command"""
    model: ModelConfig = field(default_factory=ModelConfig)
    bath: SpectralParams = field(default_factory=SpectralParams)
    grid_points: int = 20001
    tol: Optional[float] = None
    output_path: Optional[str] = None
    format: Optional[str] = None
    jobs: int = 1
    sweep: SweepSettings = field(default_factory=SweepSettings)
    oracle: OracleSettings = field(default_factory=OracleSettings)
    study: str = 'ohmicity-pair'

    @property
    def resolved_tol(self) -> float:
        return self.tol if self.tol is not None else 1e-9 * self.model.horizon

    def sweep_spec(self) -> SweepSpec:
        return SweepSpec(axis=self.sweep.axis, values=self.sweep.values(),
                         model=self.model, bath=self.bath)

    def output_format(self, default: str) -> str:
        return self.format or default


def _axis_from_key(value: str) -> SweepAxis:
    for axis in SweepAxis:
        if axis.value.lower() == value:
            return axis
    raise ValueError(f"unknown sweep axis {value!r}")


def read_config_file(path: str) -> Dict[str, Any]:
    """Flat JSON object with dotted keys"""
    try:
        text = Path(path).read_text(encoding='utf-8')
    except OSError as e:
        raise ConfigError(f"cannot read config file: {e}", key='config') from e
    if not text.strip():
        return {}
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"invalid JSON: {e}", key='config') from e
    if not isinstance(data, dict):
        raise ConfigError("config file must hold a JSON object", key='config')
    return data


def _apply(values: Dict[str, Any], source: Mapping[str, Any], skip_none: bool) -> None:
    for key, raw in source.items():
        if key not in PARSERS:
            raise ConfigError("unknown configuration key", key=key)
        if raw is None and skip_none:
            continue
        try:
            values[key] = PARSERS[key](raw)
        except (TypeError, ValueError) as e:
            raise ConfigError(str(e), key=key) from e


def _parsed_defaults() -> Dict[str, Any]:
    return {key: PARSERS[key](value) if value is not None else None
            for key, value in DEFAULTS.items()}


def load_config(path: Optional[str] = None, flags: Optional[Mapping[str, Any]] = None) -> RunConfig:
    """
    Resolve defaults, an optional JSON file and flags into a validated RunConfig

    Args:
        path: JSON config file with dotted keys, or None
        flags: dotted key -> raw flag value; None values are ignored

    Returns:
        RunConfig
    """
    file_values = read_config_file(path) if path else {}
    values = _parsed_defaults()
    _apply(values, file_values, skip_none=False)
    _apply(values, flags or {}, skip_none=True)

    try:
        model = ModelConfig(qubit_count=values['model.N'], splitting=values['model.omega0'],
                            variant=Variant(values['model.variant']), horizon=values['model.T'])
    except ContractViolation as e:
        raise ConfigError(str(e), key='model') from e
    try:
        params = SpectralParams(coupling=values['bath.G'], ohmicity=values['bath.s'],
                                cutoff=values['bath.omega_c'],
                                inverse_temperature=values['bath.beta'])
    except ContractViolation as e:
        raise ConfigError(str(e), key='bath') from e

    try:
        axis = _axis_from_key(values['sweep.axis'])
    except ValueError as e:
        raise ConfigError(str(e), key='sweep.axis') from e
    sweep = SweepSettings(axis=axis, start=values['sweep.from'], stop=values['sweep.to'],
                          step=values['sweep.step'])
    if sweep.stop < sweep.start:
        raise ConfigError(f"must be >= sweep.from ({sweep.start}), got {sweep.stop}", key='sweep.to')

    oracle = OracleSettings(modes=values['oracle.modes'], omega_max=values['oracle.omega_max'],
                            fock_dim=values['oracle.fock_dim'], times=values['oracle.times'],
                            leakage_bound=values['oracle.leakage_bound'])

    config = RunConfig(model=model, bath=params, grid_points=values['grid_points'],
                       tol=values['tol'], output_path=values['output'], format=values['format'],
                       jobs=values['jobs'], sweep=sweep, oracle=oracle, study=values['study.name'])
    logger.debug(f"resolved config: model={model.to_dict()}, bath={params.to_dict()}")
    return config
