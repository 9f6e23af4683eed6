import numpy as np
import pandas as pd

from ..config import RunConfig
from ..dynamics import coherence_trajectory
from .base_command import BaseCommand


class TrajectoryCommand(BaseCommand):
    """Coherence factors, D, S and their rates over [0, T]"""

    default_format = 'csv'

    def __init__(self, config: RunConfig):
        super().__init__("trajectory", config)

    def execute(self) -> pd.DataFrame:
        times = np.linspace(0.0, self.config.model.horizon, self.config.grid_points)
        return coherence_trajectory(self.config.model, self.config.bath, times)
