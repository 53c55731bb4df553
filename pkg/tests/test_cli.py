import csv
import io
import json

import pytest
from click.testing import CliRunner

from macap_cli import context
from macap_cli.common import macap

SMALL = ['-N', '2', '-M', '2', '-L', '4', '-A', '2', '--snr-db', '5']

@pytest.fixture(autouse=True)
def fresh_context():
    context.configured = False
    context.compact = False
    context.options = None
    yield

def _invoke(*args):
    return CliRunner().invoke(macap, list(args), catch_exceptions=False)

def test_schemes():
    result = _invoke('schemes')
    assert result.exit_code == 0
    assert json.loads(result.output) == ['PROPOSED', 'SEPM', 'FPA', 'AS', 'RMA', 'APS']

def test_compact_output():
    result = _invoke('--compact', 'schemes')
    assert result.output.strip() == '["PROPOSED","SEPM","FPA","AS","RMA","APS"]'

def test_solve_prints_report(tmp_path):
    report_path = tmp_path / 'report.json'
    result = _invoke('solve', *SMALL, '--save-report', str(report_path))
    assert result.exit_code == 0, result.output
    report = json.loads(result.output)
    assert report['mode'] == 'full'
    assert report['capacity_bps_hz'] >= report['initial_capacity_bps_hz']
    assert json.loads(report_path.read_text()) == report

@pytest.mark.parametrize('mode, tx_count, rx_count', [('miso', 2, 1), ('simo', 1, 2), ('sepm', 2, 2)])
def test_solve_modes(mode, tx_count, rx_count):
    result = _invoke('solve', *SMALL, '--mode', mode)
    assert result.exit_code == 0, result.output
    report = json.loads(result.output)
    assert report['mode'] == mode
    assert len(report['tx_layout']['positions']) == tx_count
    assert len(report['rx_layout']['positions']) == rx_count

def test_scene_files(tmp_path):
    path = str(tmp_path / 'scene.json')
    assert _invoke('scene', 'new', '-L', '3', '-A', '2', path).exit_code == 0
    context.configured = False
    shown = _invoke('scene', 'show', '-N', '2', '-M', '2', path)
    assert shown.exit_code == 0, shown.output
    document = json.loads(shown.output)
    assert set(document) == {'scene', 'snr_db', 'fpa', 'initial'}
    assert len(document['scene']['sigma']) == 3
    context.configured = False
    solved = _invoke('solve', '-N', '2', '-M', '2', '--scene', path)
    assert solved.exit_code == 0, solved.output

def test_sweep_prints_csv():
    result = _invoke('sweep', *SMALL, '-n', '2', '--schemes', 'fpa,as')
    assert result.exit_code == 0, result.output
    rows = list(csv.DictReader(io.StringIO(result.output)))
    assert [r['scheme'] for r in rows] == ['FPA', 'AS']
    assert all(r['realizations'] == '2' for r in rows)

def test_sweep_writes_file(tmp_path):
    path = tmp_path / 'sweep.csv'
    result = _invoke('-j', '1', 'sweep', *SMALL, '-n', '1', '--schemes', 'FPA', '-o', str(path))
    assert result.exit_code == 0, result.output
    assert json.loads(result.output) == {'output': str(path), 'rows': 1, 'failures': 0}
    assert path.read_text().startswith('scheme,A_over_lambda')

def test_config_file_with_flag_override(tmp_path):
    config = tmp_path / 'experiment.json'
    config.write_text(json.dumps({'realizations': 1, 'schemes': ['FPA'], 'tx_count': 2, 'rx_count': 2,
                                  'paths': [4], 'region_sizes': [2.0]}))
    result = _invoke('-C', str(config), 'sweep', '--snr-db', '0,10')
    assert result.exit_code == 0, result.output
    rows = list(csv.DictReader(io.StringIO(result.output)))
    assert [r['snr_db'] for r in rows] == ['0', '10']

def test_trace_csv():
    result = _invoke('trace', *SMALL, '-n', '2', '--max-outer-iters', '3')
    assert result.exit_code == 0, result.output
    lines = result.output.splitlines()
    assert lines[0] == 'iteration,mean_capacity_bps_hz,stderr,realizations'
    assert 2 <= len(lines) <= 5

def test_invalid_config_is_reported():
    result = _invoke('-C', '{"realizations": 0}', 'sweep')
    assert result.exit_code != 0
    assert 'realizations' in result.output

def test_bad_scheme_list():
    result = _invoke('sweep', '--schemes', 'FPA,MUSIC')
    assert result.exit_code != 0
    assert 'MUSIC' in result.output

def test_search_spacing_flag():
    plain = _invoke('solve', *SMALL, '--search-spacing', '0')
    assert plain.exit_code == 0, plain.output
    assert json.loads(plain.output)['capacity_bps_hz'] > 0
    rejected = _invoke('solve', *SMALL, '--search-spacing', '-1')
    assert rejected.exit_code != 0
    assert 'search_spacing' in rejected.output
