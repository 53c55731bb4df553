"""Seeded Monte Carlo runs of the schemes over a sweep grid, and their CSV output.

Scenes are drawn from a seed derived from (seed, L, realization) only, so
every scheme, region size and SNR point of a realization sees the same paths
and gains, and the worker count cannot change which scenes are drawn.
"""
import csv
import io
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import List

import numpy as np

from macap_cli.benchmarks import Scheme, initial_layouts, run_scheme
from macap_cli.channel import random_scene
from macap_cli.errors import ConfigError, MacapError
from macap_cli.solver import solve

CSV_HEADER = [
    'scheme', 'A_over_lambda', 'snr_db', 'L', 'mean_capacity_bps_hz', 'stderr', 'mean_total_power',
    'mean_strongest_eig_power', 'mean_condition_number', 'mean_outer_iters', 'realizations', 'failures',
]
TRACE_HEADER = ['iteration', 'mean_capacity_bps_hz', 'stderr', 'realizations']
FLOAT_FORMAT = '.12g'
# Failures of one realization that are counted instead of aborting the sweep
REALIZATION_ERRORS = (MacapError, ValueError, np.linalg.LinAlgError)

@dataclass(frozen=True)
class AggregateRow:
    scheme: str
    region_size: float
    snr_db: float
    paths: int
    mean_capacity: float
    stderr: float
    mean_total_power: float
    mean_strongest_eig_power: float
    mean_condition_number: float
    mean_outer_iters: float
    realizations: int
    failures: int = 0

    def as_csv_row(self):
        def fmt(value):
            return format(value, FLOAT_FORMAT)
        return [
            self.scheme, fmt(self.region_size), fmt(self.snr_db), str(self.paths), fmt(self.mean_capacity),
            fmt(self.stderr), fmt(self.mean_total_power), fmt(self.mean_strongest_eig_power),
            fmt(self.mean_condition_number), fmt(self.mean_outer_iters), str(self.realizations),
            str(self.failures),
        ]

@dataclass(frozen=True)
class TraceRow:
    iteration: int
    mean_capacity: float
    stderr: float
    realizations: int

@dataclass(frozen=True, eq=False)
class ConvergenceTrace:
    rows: List[TraceRow]
    # Per-realization capacity traces, unpadded, in realization order
    traces: List[List[float]]
    failures: int = 0

def scene_seed(seed, paths, realization):
    return np.random.SeedSequence([seed, paths, realization])

def experiment_scene(cfg, paths, region_size, realization):
    """The scene shared by every scheme and SNR at one realization of a grid point

    Only the regions depend on region_size; the paths and gains are the same for every size.
    """
    return random_scene(
        paths=paths,
        wavelength=cfg.wavelength,
        region_size=region_size * cfg.wavelength,
        min_distance=cfg.min_distance * cfg.wavelength,
        seed=scene_seed(cfg.seed, paths, realization),
    )

def _run_realization(task):
    """Every (scheme, snr_db, metrics) of one realization

    metrics is (capacity, total_power, strongest_eig_power, condition_number,
    outer_iters), or None when the run failed.
    """
    cfg, paths, region_size, realization = task
    scene = experiment_scene(cfg, paths, region_size, realization)
    outcomes = []
    for snr_db in cfg.snr_db:
        solver_cfg = cfg.solver_config(snr_db)
        for scheme in cfg.schemes:
            try:
                result = run_scheme(Scheme(scheme), scene, solver_cfg, cfg.tx_count, cfg.rx_count)
            except REALIZATION_ERRORS as e:
                logging.warning("{} failed at L={} A={} snr={} realization {}: {}".format(
                    scheme, paths, region_size, snr_db, realization, e))
                outcomes.append((scheme, snr_db, None))
                continue
            m = result.metrics
            outcomes.append((scheme, snr_db, (m.capacity, m.total_power, m.strongest_eig_power,
                                              m.condition_number, result.outer_iterations)))
    return outcomes

def _map(function, tasks, workers):
    """Ordered map, in-process for a single worker"""
    if workers <= 1:
        return [function(task) for task in tasks]
    with ProcessPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(function, tasks))

def _mean_and_stderr(values):
    if len(values) == 0:
        return math.nan, math.nan
    array = np.asarray(values, dtype=float)
    if len(array) < 2:
        return float(array.mean()), 0.0
    return float(array.mean()), float(array.std(ddof=1) / math.sqrt(len(array)))

def run_experiment(cfg, workers=None):
    """Aggregate every scheme at every grid point over cfg.realizations scenes

    Rows are ordered by scheme (in config order), then by L, A/lambda and SNR.
    """
    cfg.validate()
    workers = workers or cfg.workers
    tasks = [(cfg, L, A, r) for L in cfg.paths for A in cfg.region_sizes for r in range(cfg.realizations)]
    logging.info("running {} realizations of {} schemes on {} workers".format(
        len(tasks), len(cfg.schemes), workers))
    results = _map(_run_realization, tasks, workers)

    collected = {}
    failures = {}
    for (_, L, A, _), outcomes in zip(tasks, results):
        for scheme, snr_db, metrics in outcomes:
            key = (scheme, L, A, snr_db)
            collected.setdefault(key, [])
            failures.setdefault(key, 0)
            if metrics is None:
                failures[key] += 1
            else:
                collected[key].append(metrics)

    rows = []
    for scheme in cfg.schemes:
        for L, A, snr_db in cfg.grid_points():
            key = (scheme, L, A, snr_db)
            samples = collected.get(key, [])
            columns = list(zip(*samples)) if samples else [[] for _ in range(5)]
            mean_capacity, stderr = _mean_and_stderr(columns[0])
            rows.append(AggregateRow(
                scheme=scheme,
                region_size=A,
                snr_db=snr_db,
                paths=L,
                mean_capacity=mean_capacity,
                stderr=stderr,
                mean_total_power=_mean_and_stderr(columns[1])[0],
                mean_strongest_eig_power=_mean_and_stderr(columns[2])[0],
                mean_condition_number=_mean_and_stderr(columns[3])[0],
                mean_outer_iters=_mean_and_stderr(columns[4])[0],
                realizations=cfg.realizations,
                failures=failures.get(key, 0),
            ))
    return rows

def _trace_realization(task):
    cfg, paths, region_size, realization = task
    scene = experiment_scene(cfg, paths, region_size, realization)
    try:
        tx, rx = initial_layouts(scene, cfg.tx_count, cfg.rx_count)
        return solve(scene, tx, rx, cfg.solver_config(cfg.snr_db[0])).capacity_trace
    except REALIZATION_ERRORS as e:
        logging.warning("trace failed at realization {}: {}".format(realization, e))
        return None

def run_convergence_trace(cfg, workers=None):
    """Mean capacity of the proposed scheme after each outer iteration at a single grid point

    Traces that converge early are padded with their final value.
    """
    cfg.validate()
    if len(cfg.grid_points()) != 1:
        raise ConfigError("a convergence trace needs exactly one value of paths, region_sizes and snr_db")
    L, A, _ = cfg.grid_points()[0]
    tasks = [(cfg, L, A, r) for r in range(cfg.realizations)]
    results = _map(_trace_realization, tasks, workers or cfg.workers)

    traces = [t for t in results if t is not None]
    failures = len(results) - len(traces)
    if not traces:
        raise MacapError("every realization of the convergence trace failed")
    length = max(len(t) for t in traces)
    padded = np.array([t + [t[-1]] * (length - len(t)) for t in traces])
    rows = []
    for iteration in range(length):
        mean, stderr = _mean_and_stderr(padded[:, iteration])
        rows.append(TraceRow(iteration, mean, stderr, len(traces)))
    return ConvergenceTrace(rows, traces, failures)

def format_csv(rows):
    if not rows:
        raise ValueError("no rows to write")
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(CSV_HEADER)
    for row in rows:
        writer.writerow(row.as_csv_row())
    return buffer.getvalue()

def format_trace_csv(trace):
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(TRACE_HEADER)
    for row in trace.rows:
        writer.writerow([row.iteration, format(row.mean_capacity, FLOAT_FORMAT),
                         format(row.stderr, FLOAT_FORMAT), row.realizations])
    return buffer.getvalue()

def _write(text, path):
    try:
        with open(path, 'w', newline='') as f:
            f.write(text)
    except OSError as e:
        raise MacapError("cannot write {}: {}".format(path, e)) from None
    logging.info("wrote {}".format(path))

def emit_csv(rows, path):
    _write(format_csv(rows), path)

def emit_trace_csv(trace, path):
    _write(format_trace_csv(trace), path)
