from typing import Any, Dict, Union

import pandas as pd

from ..config import RunConfig
from ..measures import measure
from .base_command import BaseCommand


class MeasureCommand(BaseCommand):
    """BLP and relative-entropy measures; JSON report, or the interval table as CSV"""

    default_format = 'json'

    def __init__(self, config: RunConfig):
        super().__init__("measure", config)

    def execute(self) -> Union[pd.DataFrame, Dict[str, Any]]:
        config = self.config
        result = measure(config.model, config.bath, config.grid_points, config.resolved_tol)
        self.logger.info(f"blp={result.blp:.6g}, entropy={result.entropy:.6g}, "
                         f"{len(result.intervals)} intervals")
        if config.output_format(self.default_format) == 'csv':
            return result.interval_table()
        return {
            'model': config.model.to_dict(),
            'bath': config.bath.to_dict(),
            'result': result.to_dict(),
        }
