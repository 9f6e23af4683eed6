import json
import logging
import math

import pandas as pd
import pytest

from dephasim import cli, measures
from dephasim.cache import KernelCache
from dephasim.config import SweepSettings, load_config, read_config_file
from dephasim.errors import ConfigError, ContractViolation, NumericalFailure
from dephasim.models import SweepAxis, Variant
from dephasim.monitoring import RunMonitor, run_monitor
from dephasim.utils import format_error_message, to_json, write_output


def _write(tmp_path, payload, name="run.json"):
    path = tmp_path / name
    path.write_text(payload if isinstance(payload, str) else json.dumps(payload), encoding='utf-8')
    return str(path)


class TestLoadConfig:
    def test_defaults(self):
        config = load_config()
        assert config.model.qubit_count == 2
        assert config.model.horizon == 20.0
        assert config.model.variant is Variant.PAPER
        assert config.bath.coupling == 1.0
        assert config.bath.cutoff == 3.0
        assert config.bath.zero_temperature
        assert config.grid_points == 20001
        assert config.resolved_tol == pytest.approx(2e-8)

    def test_empty_file_gives_defaults(self, tmp_path):
        assert load_config(_write(tmp_path, "")) == load_config()

    def test_flags_override_file(self, tmp_path):
        path = _write(tmp_path, {"bath.s": 1, "model.N": 3})
        config = load_config(path, {'bath.s': '3', 'model.N': None})
        assert config.bath.ohmicity == 3.0
        assert config.model.qubit_count == 3

    def test_finite_temperature(self, tmp_path):
        assert load_config(flags={'bath.beta': '2.5'}).bath.inverse_temperature == 2.5
        assert math.isinf(load_config(_write(tmp_path, {"bath.beta": "inf"})).bath.inverse_temperature)

    @pytest.mark.parametrize("payload, key", [
        ({"bath.s": -1}, 'bath.s'),
        ({"bath.ohmicity": 2}, 'bath.ohmicity'),
        ({"model.N": "two"}, 'model.N'),
        ({"model.N": 2.5}, 'model.N'),
        ({"model.variant": "exact"}, 'model.variant'),
        ({"grid_points": 10}, 'grid_points'),
        ({"sweep.from": 3, "sweep.to": 1}, 'sweep.to'),
    ])
    def test_rejections_name_the_key(self, tmp_path, payload, key):
        with pytest.raises(ConfigError) as excinfo:
            load_config(_write(tmp_path, payload))
        assert excinfo.value.key == key
        assert str(excinfo.value).startswith(f"{key}: ")

    def test_file_must_hold_an_object(self, tmp_path):
        with pytest.raises(ConfigError):
            read_config_file(_write(tmp_path, "[1, 2]"))
        with pytest.raises(ConfigError):
            read_config_file(str(tmp_path / "missing.json"))

    def test_sweep_settings(self):
        config = load_config(flags={'sweep.axis': 'omega-c', 'sweep.from': '0.5', 'sweep.to': '5',
                                    'sweep.step': '0.05'})
        spec = config.sweep_spec()
        assert spec.axis is SweepAxis.CUTOFF
        assert len(spec.values) == 91
        assert spec.values[-1] == 5.0
        with pytest.raises(ContractViolation):
            SweepSettings(start=2.0, stop=1.0).values()

    def test_oracle_times(self):
        config = load_config(flags={'oracle.times': '0.5, 1.5'})
        assert config.oracle.times == (0.5, 1.5)


class TestRunCommand:
    def test_markovian_measure(self, tmp_path):
        out = tmp_path / "measure.json"
        assert cli.run_command(['measure', '--N', '1', '--s', '1', '--output', str(out)]) == 0
        report = json.loads(out.read_text())
        assert report['result']['blp'] == 0
        assert report['result']['entropy'] == 0
        assert report['model']['N'] == 1

    def test_super_ohmic_measure(self, tmp_path):
        out = tmp_path / "measure.json"
        assert cli.run_command(['measure', '--N', '1', '--s', '3', '--T', '20', '--output', str(out)]) == 0
        assert json.loads(out.read_text())['result']['blp'] == pytest.approx(0.0431, abs=1e-3)

    def test_measure_interval_table(self, tmp_path):
        out = tmp_path / "intervals.csv"
        args = ['measure', '--N', '1', '--s', '3', '--format', 'csv', '--output', str(out)]
        assert cli.run_command(args) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == 't_start,t_end,D_start,D_end,S_start,S_end,kink_start'
        assert len(lines) == 2

    def test_measure_formats_are_documented(self, tmp_path, capsys):
        with pytest.raises(SystemExit):
            cli.run_command(['measure', '--help'])
        help_text = ' '.join(capsys.readouterr().out.split())
        assert 'measure writes its interval table as csv' in help_text
        out = tmp_path / "measure.json"
        assert cli.run_command(['measure', '--N', '1', '--s', '3', '--output', str(out)]) == 0
        result = json.loads(out.read_text())['result']
        assert len(result['intervals']) == result['interval_count'] == 1

    def test_kernels_table(self, tmp_path):
        out = tmp_path / "kernels.csv"
        assert cli.run_command(['kernels', '--grid-points', '1000', '--output', str(out)]) == 0
        frame = pd.read_csv(out)
        assert list(frame.columns) == ['t', 'gamma', 'delta', 'gamma_rate', 'delta_rate']
        assert len(frame) == 1000
        assert frame['t'].iloc[-1] == 20.0

    def test_trajectory_table(self, tmp_path):
        out = tmp_path / "trajectory.csv"
        assert cli.run_command(['trajectory', '--grid-points', '1001', '--output', str(out)]) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == 't,f,g,chi,D,S,dDdt,dSdt'
        assert lines[1].split(',')[5] == 'inf'
        assert '\r' not in out.read_text()

    def test_short_sweep(self, tmp_path):
        out = tmp_path / "sweep.csv"
        args = ['sweep', '--axis', 's', '--from', '0.5', '--to', '1.5', '--step', '0.5',
                '--N', '1', '--output', str(out)]
        assert cli.run_command(args) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == 'axis,value,blp,entropy,intervals'
        assert [line.split(',')[1] for line in lines[1:]] == ['0.5', '1', '1.5']

    @pytest.mark.slow
    def test_full_ohmicity_sweep(self, tmp_path):
        out = tmp_path / "sweep.csv"
        args = ['sweep', '--axis', 's', '--from', '0.5', '--to', '5', '--step', '0.05',
                '--N', '2', '--output', str(out)]
        assert cli.run_command(args) == 0
        frame = pd.read_csv(out)
        assert list(frame.columns) == ['axis', 'value', 'blp', 'entropy', 'intervals']
        assert len(frame) == 91
        assert frame['value'].is_monotonic_increasing
        assert frame.loc[frame['value'] == 1.0, 'blp'].iloc[0] > 0

    def test_failed_sweep_row_exits_with_numerical_failure(self, tmp_path, monkeypatch):
        def failing(m, p, grid_points, tol):
            raise NumericalFailure("refined extrema out of order")

        monkeypatch.setattr(measures, 'measure', failing)
        out = tmp_path / "sweep.json"
        args = ['sweep', '--from', '1', '--to', '2', '--step', '1', '--format', 'json', '--output', str(out)]
        assert cli.run_command(args) == 2
        rows = json.loads(out.read_text())
        assert [row['error'] for row in rows] == ["refined extrema out of order"] * 2

    def test_oracle_check(self, tmp_path):
        out = tmp_path / "oracle.json"
        assert cli.run_command(['oracle-check', '--N', '1', '--times', '1,2', '--output', str(out)]) == 0
        report = json.loads(out.read_text())
        assert report['closest_variant'] == 'both'
        assert len(report['rows']) == 2

    def test_oracle_check_three_qubits(self, tmp_path):
        out = tmp_path / "oracle.json"
        assert cli.run_command(['oracle-check', '--N', '3', '--G', '0.1', '--output', str(out)]) == 0
        report = json.loads(out.read_text())
        assert report['closest_variant'] == 'pairwise'
        assert not report['agreement_required']
        for row in report['rows']:
            assert row['pairwise_deviation'] < 1e-6
            assert row['norm_error'] < 1e-8
            assert len(row['reduced']['real']) == 2

    @pytest.mark.slow
    def test_oracle_check_three_qubits_with_defaults(self, tmp_path):
        out = tmp_path / "oracle.json"
        assert cli.run_command(['oracle-check', '--N', '3', '--output', str(out)]) == 0
        assert json.loads(out.read_text())['closest_variant'] == 'pairwise'

    def test_study_table(self, tmp_path):
        out = tmp_path / "study.csv"
        args = ['study', '--study', 'qubit-count', '--format', 'csv', '--grid-points', '4001',
                '--output', str(out)]
        assert cli.run_command(args) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == 'series,axis,value,blp,entropy,intervals'
        assert len(lines) == 17
        assert lines[1].startswith('variant=paper,N,1,')

    def test_unknown_study(self, capsys):
        assert cli.run_command(['study', '--study', 'spectral']) == 1
        assert "unknown study 'spectral'" in capsys.readouterr().err

    def test_oracle_truncation_failure(self, tmp_path, capsys):
        out = tmp_path / "oracle.json"
        assert cli.run_command(['oracle-check', '--N', '1', '--fock-dim', '3', '--output', str(out)]) == 2
        assert 'Numerical failure' in capsys.readouterr().err

    @pytest.mark.parametrize("argv", [
        ['measure', '--s', '-1'],
        ['measure', '--variant', 'exact'],
        ['measure', '--bogus', '1'],
        ['integrate'],
        [],
    ])
    def test_configuration_errors_exit_with_one(self, argv, capsys):
        assert cli.run_command(argv) == 1
        assert 'Configuration error' in capsys.readouterr().err

    def test_invalid_config_file(self, tmp_path):
        assert cli.run_command(['measure', '--config', _write(tmp_path, {"bath.s": -1})]) == 1

    def test_stdout_output(self, capsys):
        assert cli.run_command(['measure', '--N', '1', '--s', '1']) == 0
        assert json.loads(capsys.readouterr().out)['result']['interval_count'] == 0

    def test_commands_are_recorded(self, tmp_path):
        before = run_monitor.get_summary().total_commands
        cli.run_command(['measure', '--N', '1', '--s', '1', '--output', str(tmp_path / "m.json")])
        assert run_monitor.get_summary().total_commands == before + 1


class TestLogging:
    def test_level_from_environment(self, restore_dephasim_logger):
        cli.configure_logging({'DEPHASIM_LOG': 'debug'})
        assert restore_dephasim_logger.level == logging.DEBUG
        cli.configure_logging({'DEPHASIM_LOG': 'info'})
        assert restore_dephasim_logger.level == logging.INFO
        assert sum(getattr(h, '_dephasim', False) for h in restore_dephasim_logger.handlers) == 1

    def test_default_and_unknown_levels(self, restore_dephasim_logger):
        cli.configure_logging({})
        assert restore_dephasim_logger.level == logging.ERROR
        cli.configure_logging({'DEPHASIM_LOG': 'verbose'})
        assert restore_dephasim_logger.level == logging.ERROR


class TestOutput:
    def test_json_handles_non_finite_values(self):
        payload = json.loads(to_json({'S': math.inf, 'x': 0.1, 'z': 1 + 2j}))
        assert payload == {'S': 'inf', 'x': 0.1, 'z': {'real': 1.0, 'imag': 2.0}}

    def test_csv_needs_a_table(self, tmp_path):
        with pytest.raises(ContractViolation):
            write_output({'a': 1}, 'csv', str(tmp_path / "x.csv"))

    def test_error_messages(self):
        assert format_error_message(ConfigError("must be > 0", key='bath.s')).startswith("❌ Configuration error: bath.s")
        assert format_error_message(NumericalFailure("no")).startswith("❌ Numerical failure")
        assert format_error_message(ContractViolation("bad")).startswith("❌ Invalid input")


class TestBookkeeping:
    def test_cache_evicts_least_recent(self):
        cache = KernelCache(max_cache_size=2)
        cache.cache_result('a', 1.0)
        cache.cache_result('b', 2.0)
        assert cache.get_cached_result('a') == 1.0
        cache.cache_result('c', 3.0)
        assert cache.get_cached_result('b') is None
        assert cache.get_or_compute('c', lambda: 0.0) == 3.0
        stats = cache.get_stats()
        assert stats['entries'] == 2
        assert stats['hits'] == 2 and stats['misses'] == 1

    def test_monitor_summary(self):
        monitor = RunMonitor()
        monitor.record_command('measure', 0.5, rows_written=0)
        monitor.record_command('sweep', 1.5, success=False, exit_code=2, rows_written=3)
        summary = monitor.get_summary()
        assert summary.total_commands == 2
        assert summary.avg_processing_time == pytest.approx(1.0)
        assert summary.error_rate == pytest.approx(50.0)
        assert monitor.get_report({'entries': 0, 'hit_rate': 0.0})['kernel_cache']['entries'] == 0
