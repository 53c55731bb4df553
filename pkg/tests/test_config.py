import json

import pytest

from macap_cli.config import ExperimentConfig, load_config
from macap_cli.errors import ConfigError

def test_defaults():
    cfg = load_config()
    assert cfg.tx_count == 4 and cfg.rx_count == 4
    assert cfg.min_distance == 0.5
    assert cfg.realizations == 200
    assert cfg.eps_inner == cfg.eps_outer == 1e-3
    assert cfg.schemes == ['PROPOSED', 'SEPM', 'FPA', 'AS', 'RMA', 'APS']

def test_inline_json():
    cfg = load_config('{"snr_db": [-5, 15], "schemes": ["fpa", "as"]}')
    assert cfg.snr_db == [-5, 15]
    assert cfg.schemes == ['FPA', 'AS']

def test_file(tmp_path):
    path = tmp_path / 'experiment.json'
    path.write_text(json.dumps({'realizations': 3, 'region_sizes': [1, 2]}))
    cfg = load_config(str(path))
    assert cfg.realizations == 3
    assert cfg.grid_points() == [(10, 1, 5.0), (10, 2, 5.0)]

def test_overrides_take_precedence():
    cfg = load_config('{"realizations": 3, "seed": 4}', realizations=7, seed=None)
    assert cfg.realizations == 7
    assert cfg.seed == 4

def test_scalars_become_lists():
    assert ExperimentConfig(snr_db=10.0).snr_db == [10.0]

@pytest.mark.parametrize('source', [
    '{"bogus": 1}',
    '{"realizations": 0}',
    '{"snr_db": []}',
    '{"paths": [2.5]}',
    '{"schemes": ["MUSIC"]}',
    '{"eps_outer": 0}',
    '{"workers": 0}',
    '[1, 2]',
    'not json at all',
])
def test_invalid_configs(source):
    with pytest.raises(ConfigError):
        load_config(source)

def test_solver_config_from_snr():
    cfg = load_config('{"max_outer_iters": 5}')
    solver_cfg = cfg.solver_config(10.0, mode='sepm')
    assert solver_cfg.power == pytest.approx(10.0)
    assert solver_cfg.noise == 1.0
    assert solver_cfg.max_outer_iters == 5
    assert solver_cfg.mode == 'sepm'

def test_search_spacing_reaches_solver():
    assert load_config().solver_config(5.0).search_spacing == 0.125
    assert load_config('{"search_spacing": 0}').solver_config(5.0).search_spacing == 0
    with pytest.raises(ConfigError, match='search_spacing'):
        load_config('{"search_spacing": -0.5}')
