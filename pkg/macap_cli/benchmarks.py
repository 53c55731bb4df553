"""Comparison schemes: fixed arrays, antenna selection, receive-only and discrete movement.

Every runner takes (scene, cfg, tx_count, rx_count) so the harness can run
any registered scheme on the same scene.
"""
import enum
import itertools
import logging
from dataclasses import dataclass, field
from typing import List

import numpy as np

from macap_cli.capacity import ChannelMetrics, metrics_of, water_filled_capacity
from macap_cli.channel import assemble_channel
from macap_cli.errors import AllZeroChannel
from macap_cli.geometry import AntennaLayout, Position, circle_packing_init, snap_to_grid
from macap_cli.solver import GridSearchStep, solve, solve_sepm

class Scheme(str, enum.Enum):
    PROPOSED = 'PROPOSED'
    SEPM = 'SEPM'
    FPA = 'FPA'
    AS = 'AS'
    RMA = 'RMA'
    APS = 'APS'

    @classmethod
    def parse(cls, value):
        try:
            return cls(value.strip().upper())
        except ValueError:
            raise ValueError("unknown scheme {!r}, expected one of {}".format(
                value, ', '.join(s.value for s in cls))) from None

@dataclass(frozen=True, eq=False)
class SchemeResult:
    scheme: Scheme
    metrics: ChannelMetrics
    tx_layout: AntennaLayout
    rx_layout: AntennaLayout
    outer_iterations: int = 0
    capacity_trace: List[float] = field(default_factory=list)

def fpa_layout(count, wavelength, orientation='x', center=Position(0.0, 0.0)):
    """Uniform linear array of count elements at half-wavelength spacing, centered on center"""
    if count < 1:
        raise ValueError("count must be at least 1")
    if orientation not in ('x', 'y'):
        raise ValueError("orientation must be 'x' or 'y'")
    spacing = wavelength / 2
    offsets = [(k - (count - 1) / 2) * spacing for k in range(count)]
    if orientation == 'x':
        positions = tuple(Position(center.x + o, center.y) for o in offsets)
    else:
        positions = tuple(Position(center.x, center.y + o) for o in offsets)
    return AntennaLayout(positions, spacing)

def _fpa_pair(scene, tx_count, rx_count, orientation='x'):
    tx = fpa_layout(tx_count, scene.wavelength, orientation, scene.tx_region.center)
    rx = fpa_layout(rx_count, scene.wavelength, orientation, scene.rx_region.center)
    return tx, rx

def run_fpa(scene, cfg, tx_count, rx_count, orientation='x'):
    tx, rx = _fpa_pair(scene, tx_count, rx_count, orientation)
    H = assemble_channel(scene, tx, rx)
    metrics = metrics_of(H, cfg.power, cfg.noise, cfg.rank_tol)
    return SchemeResult(Scheme.FPA, metrics, tx, rx, 0, [metrics.capacity])

def selection_candidates(count, wavelength, center=Position(0.0, 0.0)):
    """2 * count half-wavelength ULA elements that include the count-element FPA array"""
    spacing = wavelength / 2
    first = -(count // 2)
    offsets = [(k - (count - 1) / 2) * spacing for k in range(first, first + 2 * count)]
    return AntennaLayout(tuple(Position(center.x + o, center.y) for o in offsets), spacing)

def run_antenna_selection(scene, cfg, tx_count, rx_count):
    """Exhaustive search over every tx_count-of-2N and rx_count-of-2M subset pair

    The candidate arrays extend past small regions; selection has no region.
    """
    tx_all = selection_candidates(tx_count, scene.wavelength, scene.tx_region.center)
    rx_all = selection_candidates(rx_count, scene.wavelength, scene.rx_region.center)
    H_all = assemble_channel(scene, tx_all, rx_all)

    best, best_pair = -np.inf, None
    evaluated = 0
    for rows in itertools.combinations(range(len(rx_all)), rx_count):
        for cols in itertools.combinations(range(len(tx_all)), tx_count):
            evaluated += 1
            try:
                capacity = water_filled_capacity(H_all[np.ix_(rows, cols)], cfg.power, cfg.noise, cfg.rank_tol)
            except AllZeroChannel:
                continue
            if capacity > best:
                best, best_pair = capacity, (rows, cols)
    if best_pair is None:
        raise AllZeroChannel("every antenna subset sees an all-zero channel")
    logging.debug("antenna selection evaluated {} subset pairs".format(evaluated))

    rows, cols = best_pair
    tx = AntennaLayout(tuple(tx_all.positions[i] for i in cols), tx_all.min_distance)
    rx = AntennaLayout(tuple(rx_all.positions[i] for i in rows), rx_all.min_distance)
    metrics = metrics_of(assemble_channel(scene, tx, rx), cfg.power, cfg.noise, cfg.rank_tol)
    return SchemeResult(Scheme.AS, metrics, tx, rx, 0, [metrics.capacity])

def _from_report(scheme, report):
    return SchemeResult(scheme, report.final_metrics, report.tx_layout, report.rx_layout,
                        report.outer_iterations, list(report.capacity_trace))

def run_rma(scene, cfg, tx_count, rx_count, init_rx=None):
    """Transmitter frozen at its FPA array, receive antennas moved as in the proposed scheme"""
    tx, _ = _fpa_pair(scene, tx_count, rx_count)
    if init_rx is None:
        init_rx = circle_packing_init(rx_count, scene.rx_region, scene.min_distance)
    report = solve(scene, tx, init_rx, cfg, move_tx=False)
    return _from_report(Scheme.RMA, report)

def run_aps(scene, cfg, tx_count, rx_count, grid_step=None):
    """Alternating exhaustive search over grid nodes spaced grid_step (default: the minimum distance)"""
    grid_step = grid_step or scene.min_distance
    tx = snap_to_grid(circle_packing_init(tx_count, scene.tx_region, scene.min_distance), scene.tx_region, grid_step)
    rx = snap_to_grid(circle_packing_init(rx_count, scene.rx_region, scene.min_distance), scene.rx_region, grid_step)
    report = solve(scene, tx, rx, cfg, step=GridSearchStep(grid_step))
    return _from_report(Scheme.APS, report)

def initial_layouts(scene, tx_count, rx_count):
    return (circle_packing_init(tx_count, scene.tx_region, scene.min_distance),
            circle_packing_init(rx_count, scene.rx_region, scene.min_distance))

def run_proposed(scene, cfg, tx_count, rx_count):
    tx, rx = initial_layouts(scene, tx_count, rx_count)
    return _from_report(Scheme.PROPOSED, solve(scene, tx, rx, cfg))

def run_sepm(scene, cfg, tx_count, rx_count):
    tx, rx = initial_layouts(scene, tx_count, rx_count)
    return _from_report(Scheme.SEPM, solve_sepm(scene, tx, rx, cfg))

# Every runner is called as runner(scene, cfg, tx_count, rx_count)
SCHEMES = {
    Scheme.PROPOSED: run_proposed,
    Scheme.SEPM: run_sepm,
    Scheme.FPA: run_fpa,
    Scheme.AS: run_antenna_selection,
    Scheme.RMA: run_rma,
    Scheme.APS: run_aps,
}

def run_scheme(scheme, scene, cfg, tx_count, rx_count):
    scheme = Scheme(scheme)
    logging.debug("running scheme {}".format(scheme.value))
    return SCHEMES[scheme](scene, cfg, tx_count, rx_count)
