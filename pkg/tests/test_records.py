import json

from numpy.testing import assert_allclose, assert_array_equal

from macap_cli.benchmarks import initial_layouts
from macap_cli.channel import ChannelScene
from macap_cli.geometry import Circle, Position
from macap_cli.records import (load_scene, report_to_json, save_json, scene_from_json, scene_to_json)
from macap_cli.solver import SolverConfig, solve

def test_scene_survives_a_file(scene, tmp_path):
    path = str(tmp_path / 'scene.json')
    save_json(scene_to_json(scene), path)
    loaded = load_scene(path)
    assert_array_equal(loaded.sigma, scene.sigma)
    assert_array_equal(loaded.tx_paths.elevation, scene.tx_paths.elevation)
    assert loaded.rx_region == scene.rx_region
    assert loaded.min_distance == scene.min_distance

def test_circle_regions(scene):
    region = Circle(Position(0.5, -0.5), 2.0)
    circular = ChannelScene(scene.tx_paths, scene.rx_paths, scene.sigma, scene.wavelength, region, region,
                            scene.min_distance)
    loaded = scene_from_json(json.loads(json.dumps(scene_to_json(circular))))
    assert loaded.tx_region == region

def test_report_document(scene):
    tx, rx = initial_layouts(scene, 2, 2)
    report = solve(scene, tx, rx, SolverConfig(power=2.0))
    document = json.loads(json.dumps(report_to_json(report)))
    assert document['capacity_bps_hz'] == report.capacity
    assert document['outer_iterations'] == report.outer_iterations
    assert len(document['capacity_trace']) == len(report.capacity_trace)
    assert_allclose(document['rx_layout']['positions'], report.rx_layout.array)
    covariance = document['covariance']
    assert len(covariance) == 2 and len(covariance[0][0]) == 2
