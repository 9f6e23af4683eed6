import pandas as pd

from ..config import RunConfig
from ..measures import SWEEP_TABLE_COLUMNS, sweep
from .base_command import EXIT_NUMERICAL_FAILURE, EXIT_SUCCESS, BaseCommand


class SweepCommand(BaseCommand):
    """One-parameter sweep of both measures"""

    default_format = 'csv'
    table_columns = SWEEP_TABLE_COLUMNS

    def __init__(self, config: RunConfig, name: str = "sweep"):
        super().__init__(name, config)

    def compute(self) -> pd.DataFrame:
        config = self.config
        return sweep(config.sweep_spec(), config.grid_points, config.tol, config.jobs)

    def execute(self) -> pd.DataFrame:
        table = self.compute()
        failed = table['error'].notna()
        self.update_context('failed_rows', int(failed.sum()))
        for _, row in table[failed].iterrows():
            self.logger.warning(f"row {row['axis']}={row['value']} failed: {row['error']}")
        if self.config.output_format(self.default_format) == 'csv':
            return table[self.table_columns]
        return table

    def exit_code_for(self, payload) -> int:
        return EXIT_NUMERICAL_FAILURE if self.get_context('failed_rows', 0) else EXIT_SUCCESS
