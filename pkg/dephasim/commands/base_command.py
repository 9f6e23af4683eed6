import logging
import time
from abc import ABC, abstractmethod
from typing import Any, Dict, Union

import pandas as pd

from ..config import RunConfig
from ..errors import ConfigError, ContractViolation, DephasimError, NumericalFailure
from ..monitoring import run_monitor
from ..utils import format_error_message, write_output

Payload = Union[pd.DataFrame, Dict[str, Any]]

EXIT_SUCCESS = 0
EXIT_CONFIG_ERROR = 1
EXIT_NUMERICAL_FAILURE = 2


class BaseCommand(ABC):
    """Base class for all dephasim commands"""

    default_format = 'csv'

    def __init__(self, name: str, config: RunConfig):
        self.name = name
        self.config = config
        self.logger = logging.getLogger(f"dephasim.commands.{name}")
        self.context: Dict[str, Any] = {}

    @abstractmethod
    def execute(self) -> Payload:
        """Compute the command's table or report"""
        pass

    def exit_code_for(self, payload: Payload) -> int:
        """Exit code for a payload that was computed and written"""
        return EXIT_SUCCESS

    def update_context(self, key: str, value: Any):
        self.context[key] = value
        self.logger.debug(f"Updated context: {key}")

    def get_context(self, key: str, default: Any = None) -> Any:
        return self.context.get(key, default)

    def run(self) -> Dict[str, Any]:
        """Execute, write the output and map the outcome to an exit code"""
        started = time.perf_counter()
        self.logger.info(f"Starting {self.name}")
        rows = 0
        try:
            payload = self.execute()
            fmt = self.config.output_format(self.default_format)
            rows = write_output(payload, fmt, self.config.output_path)
            exit_code = self.exit_code_for(payload)
            result = {
                'status': 'success' if exit_code == EXIT_SUCCESS else 'partial',
                'command': self.name,
                'exit_code': exit_code,
                'rows': rows,
            }
        except (ConfigError, ContractViolation) as e:
            self.logger.error(f"{self.name} rejected its input: {e}")
            result = self._failure(e, EXIT_CONFIG_ERROR)
        except NumericalFailure as e:
            self.logger.error(f"{self.name} failed numerically: {e} {e.diagnostics}")
            result = self._failure(e, EXIT_NUMERICAL_FAILURE)
        except (DephasimError, OSError) as e:
            self.logger.error(f"{self.name} failed: {e}")
            result = self._failure(e, EXIT_CONFIG_ERROR)

        elapsed = time.perf_counter() - started
        run_monitor.record_command(self.name, elapsed, success=result['exit_code'] == EXIT_SUCCESS,
                                   exit_code=result['exit_code'], rows_written=rows,
                                   error_message=result.get('message'))
        self.logger.info(f"Finished {self.name} in {elapsed:.3f}s (exit {result['exit_code']})")
        return result

    def _failure(self, error: Exception, exit_code: int) -> Dict[str, Any]:
        return {
            'status': 'error',
            'command': self.name,
            'exit_code': exit_code,
            'message': format_error_message(error),
        }

