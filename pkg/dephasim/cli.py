"""
Command-line entry point.

    dephasim {kernels,trajectory,measure,sweep,study,oracle-check} [flags]

Exit codes: 0 success, 1 configuration error, 2 numerical failure.
"""

import argparse
import logging
import os
import sys
from typing import Any, Dict, List, Optional

from .cache import kernel_cache
from .commands import COMMANDS
from .config import load_config
from .errors import ConfigError
from .monitoring import run_monitor
from .utils import format_error_message

logger = logging.getLogger("dephasim.cli")

LOG_LEVELS = {'error': logging.ERROR, 'info': logging.INFO, 'debug': logging.DEBUG}

# flag destination -> dotted config key
FLAG_KEYS = {
    's': 'bath.s',
    'G': 'bath.G',
    'omega_c': 'bath.omega_c',
    'beta': 'bath.beta',
    'N': 'model.N',
    'omega0': 'model.omega0',
    'T': 'model.T',
    'variant': 'model.variant',
    'grid_points': 'grid_points',
    'tol': 'tol',
    'output': 'output',
    'format': 'format',
    'jobs': 'jobs',
    'axis': 'sweep.axis',
    'sweep_from': 'sweep.from',
    'sweep_to': 'sweep.to',
    'step': 'sweep.step',
    'modes': 'oracle.modes',
    'omega_max': 'oracle.omega_max',
    'fock_dim': 'oracle.fock_dim',
    'times': 'oracle.times',
    'study': 'study.name',
}


class _ArgumentParser(argparse.ArgumentParser):
    """Reports usage errors as configuration errors instead of exiting with 2"""

    def error(self, message):
        raise ConfigError(message, key='argv')


def configure_logging(environ: Optional[Dict[str, str]] = None) -> None:
    """Set the dephasim logger level from DEPHASIM_LOG, writing to stderr"""
    environ = os.environ if environ is None else environ
    requested = environ.get('DEPHASIM_LOG', 'error').strip().lower()
    level = LOG_LEVELS.get(requested, logging.ERROR)

    root = logging.getLogger("dephasim")
    root.setLevel(level)
    if not any(getattr(h, '_dephasim', False) for h in root.handlers):
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter('%(asctime)s - %(name)s - %(levelname)s - %(message)s'))
        handler._dephasim = True
        root.addHandler(handler)
    if requested not in LOG_LEVELS:
        root.warning(f"unknown DEPHASIM_LOG value {requested!r}; using 'error'")


def _common_flags() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', help='flat JSON file with dotted keys')
    bath_group = common.add_argument_group('bath')
    bath_group.add_argument('--s', help='ohmicity s > 0')
    bath_group.add_argument('--G', help='coupling strength G >= 0')
    bath_group.add_argument('--omega-c', dest='omega_c', help='cutoff frequency')
    bath_group.add_argument('--beta', help='inverse temperature or "inf"')
    model_group = common.add_argument_group('model')
    model_group.add_argument('--N', help='number of qubits')
    model_group.add_argument('--omega0', help='qubit splitting')
    model_group.add_argument('--T', help='horizon')
    model_group.add_argument('--variant', help='paper or pairwise')
    run_group = common.add_argument_group('run')
    run_group.add_argument('--grid-points', dest='grid_points')
    run_group.add_argument('--tol', help='extremum refinement tolerance (default 1e-9 T)')
    run_group.add_argument('--output', help='output file (default stdout)')
    run_group.add_argument('--format', help='csv or json; measure writes its interval table as csv, '
                           'while its json report carries the intervals next to both measures')
    run_group.add_argument('--jobs', help='sweep worker threads')
    sweep_group = common.add_argument_group('sweep')
    sweep_group.add_argument('--axis', help='s, G, omega-c, T or N')
    sweep_group.add_argument('--from', dest='sweep_from')
    sweep_group.add_argument('--to', dest='sweep_to')
    sweep_group.add_argument('--step')
    sweep_group.add_argument('--study', help='named parameter study')
    oracle_group = common.add_argument_group('oracle-check')
    oracle_group.add_argument('--modes', help='number of discrete bath modes')
    oracle_group.add_argument('--omega-max', dest='omega_max')
    oracle_group.add_argument('--fock-dim', dest='fock_dim')
    oracle_group.add_argument('--times', help='comma-separated times')
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_flags()
    parser = _ArgumentParser(prog='dephasim',
                             description='Non-Markovianity of qubits dephasing in a common bosonic bath')
    subparsers = parser.add_subparsers(dest='command', parser_class=_ArgumentParser)
    subparsers.required = True
    for name, command in COMMANDS.items():
        subparsers.add_parser(name, parents=[common], help=(command.__doc__ or '').strip())
    return parser


def _flags(namespace: argparse.Namespace) -> Dict[str, Any]:
    return {key: getattr(namespace, dest) for dest, key in FLAG_KEYS.items()}


def run_command(argv: List[str]) -> int:
    """Parse argv, run one command and return its exit code"""
    try:
        namespace = build_parser().parse_args(argv)
        config = load_config(namespace.config, _flags(namespace))
    except ConfigError as e:
        logger.error(f"configuration rejected: {e}")
        sys.stderr.write(format_error_message(e) + '\n')
        return 1

    command = COMMANDS[namespace.command](config)
    result = command.run()
    if result['exit_code'] != 0 and 'message' in result:
        sys.stderr.write(result['message'] + '\n')
    run_monitor.log_report(kernel_cache.get_stats())
    return result['exit_code']


def main() -> None:
    configure_logging()
    sys.exit(run_command(sys.argv[1:]))


if __name__ == '__main__':
    main()
