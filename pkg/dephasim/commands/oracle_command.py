from typing import Any, Dict

from .. import oracle
from ..config import RunConfig
from .base_command import BaseCommand


class OracleCheckCommand(BaseCommand):
    """Exact brute-force evolution against both reduced-coherence formulas"""

    default_format = 'json'

    def __init__(self, config: RunConfig):
        super().__init__("oracle-check", config)

    def execute(self) -> Dict[str, Any]:
        config = self.config
        settings = config.oracle
        qubit_count = config.model.qubit_count
        discrete = oracle.discretize(config.bath, settings.modes, settings.omega_max)
        if settings.fock_dim is not None:
            discrete = discrete.with_truncation(settings.fock_dim)
        else:
            discrete = oracle.suggest_truncation(discrete, qubit_count)
        self.logger.info(f"oracle: N={qubit_count}, K={settings.modes}, "
                         f"Fock dimensions {list(discrete.truncation)}")
        report = oracle.arbitrate_variants(qubit_count, discrete, settings.times,
                                           leakage_bound=settings.leakage_bound)
        report['spectral'] = config.bath.to_dict()
        report['omega_max'] = settings.omega_max
        return report
