"""JSON-ready dictionaries for scenes, layouts and solve reports.

Complex numbers are stored as [re, im] pairs and regions carry a 'kind' tag.
"""
import json
import logging

import numpy as np

from macap_cli.channel import ChannelScene, PathSet
from macap_cli.errors import MacapError, ShapeMismatch
from macap_cli.geometry import AntennaLayout, Circle, Position, Rectangle

def complex_to_json(matrix):
    matrix = np.asarray(matrix, dtype=complex)
    return np.stack([matrix.real, matrix.imag], axis=-1).tolist()

def complex_from_json(value):
    array = np.asarray(value, dtype=float)
    if array.shape[-1:] != (2,):
        raise ShapeMismatch("complex values must be [re, im] pairs")
    return array[..., 0] + 1j * array[..., 1]

def region_to_json(region):
    if isinstance(region, Rectangle):
        return {'kind': region.kind, 'x_low': region.x_low, 'x_high': region.x_high,
                'y_low': region.y_low, 'y_high': region.y_high}
    return {'kind': region.kind, 'center': [region.center.x, region.center.y], 'radius': region.radius}

def region_from_json(value):
    kind = value.get('kind')
    if kind == Rectangle.kind:
        return Rectangle(value['x_low'], value['x_high'], value['y_low'], value['y_high'])
    if kind == Circle.kind:
        return Circle(Position(*value['center']), value['radius'])
    raise MacapError("unknown region kind {!r}".format(kind))

def layout_to_json(layout):
    return {'positions': layout.array.tolist(), 'min_distance': layout.min_distance}

def layout_from_json(value):
    return AntennaLayout.from_array(value['positions'], value['min_distance'])

def _paths_to_json(paths):
    return {'elevation': paths.elevation.tolist(), 'azimuth': paths.azimuth.tolist()}

def scene_to_json(scene):
    return {
        'tx_paths': _paths_to_json(scene.tx_paths),
        'rx_paths': _paths_to_json(scene.rx_paths),
        'sigma': complex_to_json(scene.sigma),
        'wavelength': scene.wavelength,
        'tx_region': region_to_json(scene.tx_region),
        'rx_region': region_to_json(scene.rx_region),
        'min_distance': scene.min_distance,
    }

def scene_from_json(value):
    try:
        return ChannelScene(
            tx_paths=PathSet(**value['tx_paths']),
            rx_paths=PathSet(**value['rx_paths']),
            sigma=complex_from_json(value['sigma']),
            wavelength=value['wavelength'],
            tx_region=region_from_json(value['tx_region']),
            rx_region=region_from_json(value['rx_region']),
            min_distance=value['min_distance'],
        )
    except (KeyError, TypeError) as e:
        raise MacapError("malformed scene: {}".format(e)) from None

def metrics_to_json(metrics):
    return {
        'capacity_bps_hz': metrics.capacity,
        'total_power': metrics.total_power,
        'strongest_eig_power': metrics.strongest_eig_power,
        'condition_number': metrics.condition_number,
    }

def report_to_json(report):
    return {
        'mode': report.mode,
        'capacity_bps_hz': report.capacity,
        'initial_capacity_bps_hz': report.initial_capacity,
        'outer_iterations': report.outer_iterations,
        'capacity_trace': list(report.capacity_trace),
        'moves': list(report.moves),
        'metrics': metrics_to_json(report.final_metrics),
        'tx_layout': layout_to_json(report.tx_layout),
        'rx_layout': layout_to_json(report.rx_layout),
        'covariance': complex_to_json(report.covariance),
    }

def save_json(value, path):
    try:
        with open(path, 'w') as f:
            f.write(json.dumps(value))
    except OSError as e:
        raise MacapError("cannot write {}: {}".format(path, e)) from None
    logging.debug("saved {}".format(path))

def load_json(path):
    try:
        with open(path, 'r') as f:
            return json.loads(f.read())
    except (OSError, json.JSONDecodeError) as e:
        raise MacapError("cannot read {}: {}".format(path, e)) from None

def load_scene(path):
    return scene_from_json(load_json(path))
