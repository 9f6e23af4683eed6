import pandas as pd

from ..config import RunConfig
from ..studies import STUDY_TABLE_COLUMNS, run_study
from .sweep_command import SweepCommand


class StudyCommand(SweepCommand):
    """Named family of sweeps stacked into one table"""

    table_columns = STUDY_TABLE_COLUMNS

    def __init__(self, config: RunConfig):
        super().__init__(config, name="study")

    def compute(self) -> pd.DataFrame:
        config = self.config
        self.logger.info(f"running study {config.study}")
        return run_study(config.study, config.grid_points, config.tol, config.jobs)
