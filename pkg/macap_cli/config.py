"""Experiment configuration loaded from a JSON file or an inline JSON string.

Lengths (region sizes, minimum distance) are in wavelength units.
"""
import dataclasses
import json
import logging
import os
from dataclasses import dataclass, field
from typing import List, Optional

from macap_cli.benchmarks import Scheme
from macap_cli.errors import ConfigError
from macap_cli.solver import SolverConfig

def _default_schemes():
    return [s.value for s in Scheme]

@dataclass
class ExperimentConfig:
    tx_count: int = 4
    rx_count: int = 4
    paths: List[int] = field(default_factory=lambda: [10])
    region_sizes: List[float] = field(default_factory=lambda: [3.0])
    snr_db: List[float] = field(default_factory=lambda: [5.0])
    min_distance: float = 0.5
    realizations: int = 200
    seed: int = 0
    schemes: List[str] = field(default_factory=_default_schemes)
    eps_inner: float = 1e-3
    eps_outer: float = 1e-3
    max_outer_iters: int = 100
    max_inner_iters: int = 100
    search_spacing: float = 0.125
    workers: int = 1
    output: Optional[str] = None
    wavelength: float = 1.0

    def __post_init__(self):
        for name in ('paths', 'region_sizes', 'snr_db', 'schemes'):
            value = getattr(self, name)
            if not isinstance(value, (list, tuple)):
                value = [value]
            setattr(self, name, list(value))
        self.validate()

    def validate(self):
        """Raise ConfigError on the first invalid field"""
        if self.tx_count < 1 or self.rx_count < 1:
            raise ConfigError("tx_count and rx_count must be at least 1")
        for name in ('paths', 'region_sizes', 'snr_db', 'schemes'):
            if not getattr(self, name):
                raise ConfigError("{} must not be empty".format(name))
        if any(int(L) != L or L < 1 for L in self.paths):
            raise ConfigError("paths must be positive integers, got {}".format(self.paths))
        if any(not a > 0 for a in self.region_sizes):
            raise ConfigError("region_sizes must be positive")
        if self.min_distance < 0:
            raise ConfigError("min_distance must not be negative")
        if self.realizations < 1:
            raise ConfigError("realizations must be at least 1")
        if self.workers < 1:
            raise ConfigError("workers must be at least 1")
        if not self.wavelength > 0:
            raise ConfigError("wavelength must be positive")
        try:
            self.schemes = [Scheme.parse(s).value for s in self.schemes]
        except ValueError as e:
            raise ConfigError(str(e)) from None
        # Reuse the solver's own checks on thresholds and limits
        self.solver_config(self.snr_db[0])

    def solver_config(self, snr_db, mode='full'):
        try:
            return SolverConfig.from_snr_db(
                snr_db, eps_inner=self.eps_inner, eps_outer=self.eps_outer,
                max_outer_iters=self.max_outer_iters, max_inner_iters=self.max_inner_iters,
                search_spacing=self.search_spacing, mode=mode)
        except (TypeError, ValueError) as e:
            raise ConfigError(str(e)) from None

    def grid_points(self):
        """(paths, region_size, snr_db) in nested sweep order"""
        return [(L, A, snr) for L in self.paths for A in self.region_sizes for snr in self.snr_db]

FIELDS = {f.name for f in dataclasses.fields(ExperimentConfig)}

def parse_config_source(source):
    """Return the config dict held in source, a JSON file path or an inline JSON string"""
    if source is None:
        return {}
    try:
        if os.path.exists(source):
            with open(source, 'r') as f:
                options = json.load(f)
        else:
            options = json.loads(source)
    except json.JSONDecodeError as e:
        raise ConfigError("invalid config JSON in {}: {}".format(source, e)) from None
    except OSError as e:
        raise ConfigError("cannot read config file {}: {}".format(source, e)) from None
    if not isinstance(options, dict):
        raise ConfigError("config must be a JSON object")
    return options

def load_config(source=None, **overrides):
    """Build an ExperimentConfig from source with non-None overrides taking precedence"""
    options = parse_config_source(source)
    unknown = sorted(set(options) - FIELDS)
    if unknown:
        raise ConfigError("unknown config keys: {}".format(', '.join(unknown)))
    options.update({k: v for k, v in overrides.items() if v is not None})
    logging.debug("experiment config options {}".format(options))
    try:
        return ExperimentConfig(**options)
    except TypeError as e:
        raise ConfigError(str(e)) from None
