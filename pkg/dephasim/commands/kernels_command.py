import numpy as np
import pandas as pd

from .. import bath
from ..config import RunConfig
from .base_command import BaseCommand

KERNEL_COLUMNS = ['t', 'gamma', 'delta', 'gamma_rate', 'delta_rate']


class KernelsCommand(BaseCommand):
    """Tabulate Γ, Δ and their rates on the uniform grid over [0, T]"""

    default_format = 'csv'

    def __init__(self, config: RunConfig):
        super().__init__("kernels", config)

    def execute(self) -> pd.DataFrame:
        times = np.linspace(0.0, self.config.model.horizon, self.config.grid_points)
        if not self.config.bath.zero_temperature:
            self.logger.warning(f"finite temperature: {len(times)} quadrature evaluations per kernel")
        values = bath.kernel_values(self.config.bath, times)
        return pd.DataFrame({
            't': times,
            'gamma': values.gamma,
            'delta': values.delta,
            'gamma_rate': values.gamma_rate,
            'delta_rate': values.delta_rate,
        }, columns=KERNEL_COLUMNS)
