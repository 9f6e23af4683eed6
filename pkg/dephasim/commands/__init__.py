from .base_command import BaseCommand
from .kernels_command import KernelsCommand
from .measure_command import MeasureCommand
from .oracle_command import OracleCheckCommand
from .study_command import StudyCommand
from .sweep_command import SweepCommand
from .trajectory_command import TrajectoryCommand

COMMANDS = {
    'kernels': KernelsCommand,
    'trajectory': TrajectoryCommand,
    'measure': MeasureCommand,
    'sweep': SweepCommand,
    'study': StudyCommand,
    'oracle-check': OracleCheckCommand,
}

__all__ = [
    'BaseCommand',
    'COMMANDS',
    'KernelsCommand',
    'MeasureCommand',
    'OracleCheckCommand',
    'StudyCommand',
    'SweepCommand',
    'TrajectoryCommand',
]
