"""Alternating position optimization of both antenna arrays.

Each outer iteration water-fills the transmit covariance, moves the receive
antennas one by one, water-fills the reciprocal channel and then moves the
transmit antennas one by one. Every single-antenna move maximizes a quadratic
form f(r)^H B f(r) whose matrix collects the contribution of all the other
antennas, so each move can only raise the capacity.
"""
import functools
import logging
import math
from dataclasses import dataclass, field
from typing import List

import numpy as np
from scipy import linalg

from macap_cli.capacity import (RANK_TOL, ChannelMetrics, covariance_factor, metrics_of, optimal_covariance,
                                receive_side_covariance, strongest_right_vector, water_filled_capacity)
from macap_cli.channel import assemble_channel, field_response, field_response_matrix
from macap_cli.errors import AllZeroChannel, ConfigError, InfeasibleRegion, ShapeMismatch
from macap_cli.geometry import AntennaLayout, grid_nodes, is_feasible
from macap_cli.position_opt import (QuadraticFormObjective, grid_search_position, positions_except,
                                    sca_optimize_position)

MODES = ('full', 'sepm', 'miso', 'simo')

@dataclass(frozen=True)
class SolverConfig:
    power: float
    noise: float = 1.0
    eps_inner: float = 1e-3
    eps_outer: float = 1e-3
    max_outer_iters: int = 100
    max_inner_iters: int = 100
    mode: str = 'full'
    rank_tol: float = RANK_TOL
    # Spacing in wavelengths of the grid that seeds every SCA move, 0 to start from the current position
    search_spacing: float = 0.125

    def __post_init__(self):
        if not self.power > 0:
            raise ConfigError("power must be positive, got {}".format(self.power))
        if not self.noise > 0:
            raise ConfigError("noise must be positive, got {}".format(self.noise))
        if not (self.eps_inner > 0 and self.eps_outer > 0):
            raise ConfigError("convergence thresholds must be positive")
        if self.max_outer_iters < 0 or self.max_inner_iters < 0:
            raise ConfigError("iteration limits must not be negative")
        if not self.search_spacing >= 0:
            raise ConfigError("search_spacing must not be negative, got {}".format(self.search_spacing))
        if self.mode not in MODES:
            raise ConfigError("mode must be one of {}, got {!r}".format(', '.join(MODES), self.mode))

    @classmethod
    def from_snr_db(cls, snr_db, **kwargs):
        """Unit noise power and P = 10^(snr_db/10)"""
        return cls(power=10 ** (snr_db / 10), noise=1.0, **kwargs)

@dataclass(frozen=True, eq=False)
class SolveReport:
    tx_layout: AntennaLayout
    rx_layout: AntennaLayout
    covariance: np.ndarray
    capacity_trace: List[float]
    final_metrics: ChannelMetrics
    outer_iterations: int
    mode: str = 'full'
    # Position moves per outer iteration; empty for solves that never move
    moves: List[int] = field(default_factory=list)

    @property
    def initial_capacity(self):
        return self.capacity_trace[0]

    @property
    def capacity(self):
        return self.final_metrics.capacity

@functools.lru_cache(maxsize=64)
def cached_grid_nodes(region, spacing):
    nodes = grid_nodes(region, spacing)
    nodes.setflags(write=False)
    logging.debug("grid of spacing {:.4g} has {} nodes".format(spacing, len(nodes)))
    return nodes

# A position step moves one antenna: step(objective, start, region, others, min_distance, cfg) -> Position
def sca_step(obj, start, region, others, min_distance, cfg):
    """SCA from the best search grid node, or from start when no node beats it

    The grid only picks the starting point, so the move never lowers the objective.
    """
    if cfg.search_spacing > 0:
        nodes = cached_grid_nodes(region, cfg.search_spacing * obj.wavelength)
        start = grid_search_position(obj, start, nodes, others, min_distance)
    return sca_optimize_position(obj, start, region, others, min_distance, cfg.eps_inner, cfg.max_inner_iters)

class GridSearchStep:
    """Position step restricted to a square grid of the given spacing over each region"""

    def __init__(self, spacing):
        if not spacing > 0:
            raise ValueError("grid spacing must be positive")
        self.spacing = spacing

    def nodes(self, region):
        return cached_grid_nodes(region, self.spacing)

    def __call__(self, obj, start, region, others, min_distance, cfg=None):
        return grid_search_position(obj, start, self.nodes(region), others, min_distance)

def _stack_columns(columns):
    columns = [np.asarray(c, dtype=complex).reshape(-1) for c in columns]
    return np.array(columns).T

def effective_columns_rx(scene, tx, rx, Q):
    """w(r_m) = V_Q^(1/2) U_Q^H G^H Sigma^H f(r_m) for every receive antenna"""
    K = _rx_transform(scene, tx, covariance_factor(Q))
    W = K @ field_response_matrix(rx, scene.rx_paths, scene.wavelength)
    return [W[:, m] for m in range(W.shape[1])]

def effective_columns_tx(scene, tx, rx, S):
    """p(t_n) = V_S^(1/2) U_S^H F^H Sigma g(t_n) for every transmit antenna"""
    K = _tx_transform(scene, rx, covariance_factor(S))
    P = K @ field_response_matrix(tx, scene.tx_paths, scene.wavelength)
    return [P[:, n] for n in range(P.shape[1])]

def _rx_transform(scene, tx, factor):
    G = field_response_matrix(tx, scene.tx_paths, scene.wavelength)
    return factor.conj().T @ G.conj().T @ scene.sigma.conj().T

def _tx_transform(scene, rx, factor):
    F = field_response_matrix(rx, scene.rx_paths, scene.wavelength)
    return factor.conj().T @ F.conj().T @ scene.sigma

def leave_one_out_inverse(columns, excluded, noise):
    """(I + (1/noise) sum_{k != excluded} w_k w_k^H)^-1, computed directly"""
    W = _stack_columns(columns)
    size = W.shape[0]
    rest = np.delete(W, excluded, axis=1)
    return linalg.inv(np.eye(size) + rest @ rest.conj().T / noise)

def next_leave_one_out_inverse(previous, w_previous, w_current, noise):
    """Turn the inverse that leaves out m-1 into the one that leaves out m

    Adds w_previous w_previous^H and removes w_current w_current^H as one rank-2
    update through the matrix inversion lemma. w_previous should already hold
    the moved position of antenna m-1.
    """
    A = np.asarray(previous, dtype=complex)
    Z1 = np.column_stack([w_previous, w_current])
    Z2 = np.column_stack([w_previous, -np.asarray(w_current)])
    AZ1 = A @ Z1
    core = np.eye(2) + Z2.conj().T @ AZ1 / noise
    updated = A - AZ1 @ linalg.solve(core, Z2.conj().T @ A) / noise
    return (updated + updated.conj().T) / 2

def build_rx_objective(scene, tx, A_m, factor):
    """B_m = Sigma G U_Q V_Q^(1/2) A_m V_Q^(1/2) U_Q^H G^H Sigma^H, as an objective over the receive paths

    factor is U_Q V_Q^(1/2) from covariance_factor.
    """
    K = _rx_transform(scene, tx, factor)
    B = K.conj().T @ A_m @ K
    return QuadraticFormObjective((B + B.conj().T) / 2, scene.rx_paths, scene.wavelength)

def build_tx_objective(scene, rx, C_n, factor):
    K = _tx_transform(scene, rx, factor)
    D = K.conj().T @ C_n @ K
    return QuadraticFormObjective((D + D.conj().T) / 2, scene.tx_paths, scene.wavelength)

def _check_start(layout, region, min_distance, side, movable=True):
    if len(layout) == 0:
        raise ShapeMismatch("{} layout is empty".format(side))
    # A frozen side may sit outside its region, as a fixed array does
    if movable and not is_feasible(AntennaLayout(layout.positions, min_distance), region):
        raise InfeasibleRegion("initial {} layout is not feasible".format(side))

def _layout(positions, scene):
    return AntennaLayout(tuple(positions), scene.min_distance)

def _sweep(K, positions, paths, wavelength, region, cfg, step, min_distance):
    """Move every antenna of one side in turn; K maps its field responses to effective columns"""
    W = K @ field_response_matrix(np.array([[p.x, p.y] for p in positions]), paths, wavelength)
    A = leave_one_out_inverse(list(W.T), 0, cfg.noise)
    moved = 0
    for m in range(len(positions)):
        if m > 0:
            A = next_leave_one_out_inverse(A, W[:, m - 1], W[:, m], cfg.noise)
        B = K.conj().T @ A @ K
        obj = QuadraticFormObjective((B + B.conj().T) / 2, paths, wavelength)
        new = step(obj, positions[m], region, positions_except(positions, m), min_distance, cfg)
        if new != positions[m]:
            moved += 1
        positions[m] = new
        W[:, m] = K @ field_response(new, paths, wavelength)
    return moved

def solve(scene, init_tx, init_rx, cfg, move_tx=True, move_rx=True, step=None):
    """Alternating optimization of covariance, receive and transmit positions

    move_tx/move_rx freeze a side; step replaces the per-antenna SCA move
    (grid search, for instance). The capacity trace starts with the capacity
    of the initial layouts and gains one entry per outer iteration.
    """
    if cfg.mode != 'full':
        raise ConfigError("solve runs the full mode only, got {!r}; use solve_mode to dispatch".format(cfg.mode))
    step = step or sca_step
    D = scene.min_distance
    _check_start(init_tx, scene.tx_region, D, 'transmit', move_tx)
    _check_start(init_rx, scene.rx_region, D, 'receive', move_rx)
    tx, rx = list(init_tx.positions), list(init_rx.positions)

    H = assemble_channel(scene, init_tx, init_rx)
    trace = [water_filled_capacity(H, cfg.power, cfg.noise, cfg.rank_tol)]
    moves = []
    iterations = 0
    for iterations in range(1, cfg.max_outer_iters + 1):
        moved = 0
        if move_rx:
            Q, _ = optimal_covariance(H, cfg.power, cfg.noise, cfg.rank_tol)
            K = _rx_transform(scene, _layout(tx, scene), covariance_factor(Q))
            moved += _sweep(K, rx, scene.rx_paths, scene.wavelength, scene.rx_region, cfg, step, D)
            H = assemble_channel(scene, _layout(tx, scene), _layout(rx, scene))
        if move_tx:
            # S stays fixed for the whole transmit sweep
            S = receive_side_covariance(H, cfg.power, cfg.noise, cfg.rank_tol)
            K = _tx_transform(scene, _layout(rx, scene), covariance_factor(S))
            moved += _sweep(K, tx, scene.tx_paths, scene.wavelength, scene.tx_region, cfg, step, D)
            H = assemble_channel(scene, _layout(tx, scene), _layout(rx, scene))

        capacity = water_filled_capacity(H, cfg.power, cfg.noise, cfg.rank_tol)
        increase = capacity - trace[-1]
        trace.append(capacity)
        moves.append(moved)
        logging.debug("outer iteration {}: capacity {:.6f}, {} antennas moved".format(iterations, capacity, moved))
        if increase < cfg.eps_outer * abs(capacity):
            break

    return _report(scene, tx, rx, H, cfg, trace, iterations, moves, 'full')

def _report(scene, tx, rx, H, cfg, trace, iterations, moves, mode, covariance=None):
    metrics = metrics_of(H, cfg.power, cfg.noise, cfg.rank_tol)
    if covariance is None:
        covariance, _ = optimal_covariance(H, cfg.power, cfg.noise, cfg.rank_tol)
    logging.info("{} solve finished after {} outer iterations: capacity {:.6f} bps/Hz".format(
        mode, iterations, metrics.capacity))
    return SolveReport(
        tx_layout=_layout(tx, scene),
        rx_layout=_layout(rx, scene),
        covariance=covariance,
        capacity_trace=trace,
        final_metrics=metrics,
        outer_iterations=iterations,
        mode=mode,
        moves=moves,
    )

def _rank_one_sweep(vector, positions, paths, wavelength, region, cfg, step, min_distance):
    obj = QuadraticFormObjective.rank_one(vector, paths, wavelength)
    moved = 0
    for m in range(len(positions)):
        new = step(obj, positions[m], region, positions_except(positions, m), min_distance, cfg)
        moved += new != positions[m]
        positions[m] = new
    return int(moved)

def _single_stream_capacity(H, cfg):
    strongest = linalg.svdvals(H)[0]
    return math.log2(1 + cfg.power * strongest ** 2 / cfg.noise)

def solve_sepm(scene, init_tx, init_rx, cfg, step=None):
    """Maximize the strongest eigenchannel power, the low-SNR capacity surrogate

    The trace holds log2(1 + P lambda_max^2 / noise), the single-stream
    capacity being maximized; the final metrics report the water-filled
    capacity of the resulting channel so SEPM compares with the other schemes.
    """
    step = step or sca_step
    D = scene.min_distance
    _check_start(init_tx, scene.tx_region, D, 'transmit')
    _check_start(init_rx, scene.rx_region, D, 'receive')
    tx, rx = list(init_tx.positions), list(init_rx.positions)

    H = assemble_channel(scene, init_tx, init_rx)
    trace = [_single_stream_capacity(H, cfg)]
    moves = []
    iterations = 0
    for iterations in range(1, cfg.max_outer_iters + 1):
        u_Q = strongest_right_vector(H)
        G = field_response_matrix(_layout(tx, scene), scene.tx_paths, scene.wavelength)
        moved = _rank_one_sweep(scene.sigma @ G @ u_Q, rx, scene.rx_paths, scene.wavelength,
                                scene.rx_region, cfg, step, D)
        H = assemble_channel(scene, _layout(tx, scene), _layout(rx, scene))

        u_S = strongest_right_vector(H.conj().T)
        F = field_response_matrix(_layout(rx, scene), scene.rx_paths, scene.wavelength)
        moved += _rank_one_sweep(scene.sigma.conj().T @ F @ u_S, tx, scene.tx_paths, scene.wavelength,
                                 scene.tx_region, cfg, step, D)
        H = assemble_channel(scene, _layout(tx, scene), _layout(rx, scene))

        value = _single_stream_capacity(H, cfg)
        increase = value - trace[-1]
        trace.append(value)
        moves.append(moved)
        logging.debug("SEPM iteration {}: single-stream capacity {:.6f}".format(iterations, value))
        if increase < cfg.eps_outer * abs(value):
            break

    return _report(scene, tx, rx, H, cfg, trace, iterations, moves, 'sepm')

def _single_antenna(layout, region, side):
    if layout is None:
        return AntennaLayout((region.center,), 0.0)
    if len(layout) != 1:
        raise ShapeMismatch("{} side must have exactly one antenna, got {}".format(side, len(layout)))
    return layout

def _total_power_capacity(h, cfg):
    return math.log2(1 + cfg.power * float(np.vdot(h, h).real) / cfg.noise)

def solve_miso(scene, init_tx, cfg, init_rx=None, step=None):
    """One receive antenna: maximize the channel power ||h||^2 under maximum ratio transmission"""
    step = step or sca_step
    D = scene.min_distance
    init_rx = _single_antenna(init_rx, scene.rx_region, 'receive')
    _check_start(init_tx, scene.tx_region, D, 'transmit')
    _check_start(init_rx, scene.rx_region, D, 'receive')
    tx, rx = list(init_tx.positions), list(init_rx.positions)

    G = field_response_matrix(init_tx, scene.tx_paths, scene.wavelength)
    h = assemble_channel(scene, init_tx, init_rx)[0]
    trace = [_total_power_capacity(h, cfg)]
    moves = []
    iterations = 0
    for iterations in range(1, cfg.max_outer_iters + 1):
        SG = scene.sigma @ G
        B = SG @ SG.conj().T
        obj = QuadraticFormObjective((B + B.conj().T) / 2, scene.rx_paths, scene.wavelength)
        new_rx = step(obj, rx[0], scene.rx_region, [], D, cfg)
        moved = int(new_rx != rx[0])
        rx[0] = new_rx

        d_bar = scene.sigma.conj().T @ field_response(rx[0], scene.rx_paths, scene.wavelength)
        moved += _rank_one_sweep(d_bar, tx, scene.tx_paths, scene.wavelength, scene.tx_region, cfg, step, D)
        G = field_response_matrix(_layout(tx, scene), scene.tx_paths, scene.wavelength)

        h = assemble_channel(scene, _layout(tx, scene), _layout(rx, scene))[0]
        value = _total_power_capacity(h, cfg)
        increase = value - trace[-1]
        trace.append(value)
        moves.append(moved)
        if increase < cfg.eps_outer * abs(value):
            break

    norm = float(np.vdot(h, h).real)
    if norm == 0:
        raise AllZeroChannel("MISO channel vanished")
    # Maximum ratio transmission
    covariance = cfg.power * np.outer(h.conj(), h) / norm
    H = h.reshape(1, -1)
    return _report(scene, tx, rx, H, cfg, trace, iterations, moves, 'miso', covariance)

def solve_simo(scene, init_rx, cfg, init_tx=None, step=None):
    """One transmit antenna: maximize ||h||^2, received with maximum ratio combining"""
    step = step or sca_step
    D = scene.min_distance
    init_tx = _single_antenna(init_tx, scene.tx_region, 'transmit')
    _check_start(init_tx, scene.tx_region, D, 'transmit')
    _check_start(init_rx, scene.rx_region, D, 'receive')
    tx, rx = list(init_tx.positions), list(init_rx.positions)

    h = assemble_channel(scene, init_tx, init_rx)[:, 0]
    trace = [_total_power_capacity(h, cfg)]
    moves = []
    iterations = 0
    for iterations in range(1, cfg.max_outer_iters + 1):
        c = scene.sigma @ field_response(tx[0], scene.tx_paths, scene.wavelength)
        moved = _rank_one_sweep(c, rx, scene.rx_paths, scene.wavelength, scene.rx_region, cfg, step, D)

        SF = scene.sigma.conj().T @ field_response_matrix(_layout(rx, scene), scene.rx_paths, scene.wavelength)
        D_matrix = SF @ SF.conj().T
        obj = QuadraticFormObjective((D_matrix + D_matrix.conj().T) / 2, scene.tx_paths, scene.wavelength)
        new_tx = step(obj, tx[0], scene.tx_region, [], D, cfg)
        moved += int(new_tx != tx[0])
        tx[0] = new_tx

        h = assemble_channel(scene, _layout(tx, scene), _layout(rx, scene))[:, 0]
        value = _total_power_capacity(h, cfg)
        increase = value - trace[-1]
        trace.append(value)
        moves.append(moved)
        if increase < cfg.eps_outer * abs(value):
            break

    if float(np.vdot(h, h).real) == 0:
        raise AllZeroChannel("SIMO channel vanished")
    H = h.reshape(-1, 1)
    return _report(scene, tx, rx, H, cfg, trace, iterations, moves, 'simo', np.array([[cfg.power]], dtype=complex))

def solve_mode(scene, init_tx, init_rx, cfg):
    """Dispatch on cfg.mode"""
    if cfg.mode == 'full':
        return solve(scene, init_tx, init_rx, cfg)
    if cfg.mode == 'sepm':
        return solve_sepm(scene, init_tx, init_rx, cfg)
    if cfg.mode == 'miso':
        return solve_miso(scene, init_tx, cfg, init_rx)
    return solve_simo(scene, init_rx, cfg, init_tx)
