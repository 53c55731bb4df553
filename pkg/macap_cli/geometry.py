"""Antenna regions, layouts and the feasibility rules that bind them.

All lengths are in meters; configs express them in wavelength units with the
wavelength defaulting to 1.0. Regions are centered on the origin by default,
which makes the region center the phase reference of the channel model.
"""
import itertools
import logging
import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from scipy.spatial.distance import pdist

from macap_cli.errors import InfeasibleRegion

@dataclass(frozen=True)
class Position:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError("Position components must be finite, got ({}, {})".format(self.x, self.y))

    @classmethod
    def from_array(cls, value):
        return cls(float(value[0]), float(value[1]))

    def as_array(self):
        return np.array([self.x, self.y], dtype=float)

    def distance_to(self, other):
        return math.hypot(self.x - other.x, self.y - other.y)

class Region:
    """A convex planar region that antennas move in"""

    kind = None

    @property
    def center(self):
        raise NotImplementedError

    def contains(self, p):
        raise NotImplementedError

    def project(self, p):
        """Return the nearest point of the region in Euclidean norm"""
        raise NotImplementedError

    def bounding_box(self):
        raise NotImplementedError

    def shifted(self, dx, dy):
        raise NotImplementedError

@dataclass(frozen=True)
class Rectangle(Region):
    x_low: float
    x_high: float
    y_low: float
    y_high: float

    kind = 'rectangle'

    def __post_init__(self):
        if not (self.x_low < self.x_high and self.y_low < self.y_high):
            raise ValueError("Rectangle bounds must satisfy x_low < x_high and y_low < y_high")

    @classmethod
    def square(cls, size):
        """The size x size square centered on the origin"""
        half = size / 2
        return cls(-half, half, -half, half)

    @property
    def center(self):
        return Position((self.x_low + self.x_high) / 2, (self.y_low + self.y_high) / 2)

    def contains(self, p):
        return self.x_low <= p.x <= self.x_high and self.y_low <= p.y <= self.y_high

    def project(self, p):
        return project_rectangle(p, self)

    def bounding_box(self):
        return self.x_low, self.x_high, self.y_low, self.y_high

    def halfplanes(self):
        """The four bounds as (normal, offset) pairs meaning normal . r >= offset"""
        return [
            (np.array([1.0, 0.0]), self.x_low),
            (np.array([-1.0, 0.0]), -self.x_high),
            (np.array([0.0, 1.0]), self.y_low),
            (np.array([0.0, -1.0]), -self.y_high),
        ]

    def shifted(self, dx, dy):
        return Rectangle(self.x_low + dx, self.x_high + dx, self.y_low + dy, self.y_high + dy)

@dataclass(frozen=True)
class Circle(Region):
    center_point: Position
    radius: float

    kind = 'circle'

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("Circle radius must be positive")

    @property
    def center(self):
        return self.center_point

    def contains(self, p):
        return math.hypot(p.x - self.center_point.x, p.y - self.center_point.y) <= self.radius

    def project(self, p):
        return project_circle(p, self)

    def bounding_box(self):
        c, r = self.center_point, self.radius
        return c.x - r, c.x + r, c.y - r, c.y + r

    def halfplanes(self):
        # Circles are handled by projection rather than linear bounds
        return []

    def shifted(self, dx, dy):
        return Circle(Position(self.center_point.x + dx, self.center_point.y + dy), self.radius)

@dataclass(frozen=True)
class AntennaLayout:
    positions: Tuple[Position, ...]
    min_distance: float

    def __post_init__(self):
        object.__setattr__(self, 'positions', tuple(self.positions))

    @classmethod
    def from_array(cls, array, min_distance):
        array = np.asarray(array, dtype=float).reshape(-1, 2)
        return cls(tuple(Position.from_array(row) for row in array), min_distance)

    @property
    def array(self):
        """Positions as an (count, 2) array"""
        return np.array([[p.x, p.y] for p in self.positions], dtype=float).reshape(-1, 2)

    def __len__(self):
        return len(self.positions)

    def shifted(self, dx, dy):
        return AntennaLayout(tuple(Position(p.x + dx, p.y + dy) for p in self.positions), self.min_distance)

def min_pairwise_distance(positions):
    """Smallest distance between two distinct positions, inf for fewer than two"""
    array = np.asarray(positions, dtype=float).reshape(-1, 2)
    if len(array) < 2:
        return math.inf
    return float(pdist(array).min())

def is_feasible(layout, region):
    """True iff every position is in region and every pair is at least min_distance apart

    Comparisons are exact, no slack is applied.
    """
    if not all(region.contains(p) for p in layout.positions):
        return False
    return min_pairwise_distance(layout.array) >= layout.min_distance

def respects_distance(p, others, min_distance):
    return all(p.distance_to(o) >= min_distance for o in others)

def project_rectangle(p, region):
    x = min(max(p.x, region.x_low), region.x_high)
    y = min(max(p.y, region.y_low), region.y_high)
    return Position(x, y)

def project_circle(p, region):
    c = region.center_point
    dx, dy = p.x - c.x, p.y - c.y
    dist = math.hypot(dx, dy)
    if dist == 0:
        return p
    scale = min(region.radius / dist, 1.0)
    if scale == 1.0:
        return p
    dx, dy = scale * dx, scale * dy
    # Rounding may leave the scaled point a hair outside the boundary
    while math.hypot(dx, dy) > region.radius:
        dx, dy = dx * (1 - np.finfo(float).eps), dy * (1 - np.finfo(float).eps)
    return Position(c.x + dx, c.y + dy)

def _packing_box(region):
    if isinstance(region, Circle):
        # Square inscribed in the circle
        half = region.radius / math.sqrt(2)
        c = region.center_point
        return c.x - half, c.x + half, c.y - half, c.y + half
    return region.bounding_box()

def circle_packing_init(count, region, min_distance):
    """Deterministic initial layout from a g x g grid of equal cells, g = ceil(sqrt(count))

    Antennas sit at the cell centers, first count cells in row-major order (rows
    run along y from the bottom, cells along x from the left).
    """
    if count < 1:
        raise ValueError("count must be at least 1")
    g = math.ceil(math.sqrt(count))
    x_low, x_high, y_low, y_high = _packing_box(region)
    cell_w = (x_high - x_low) / g
    cell_h = (y_high - y_low) / g
    if count > 1 and min(cell_w, cell_h) < min_distance:
        raise InfeasibleRegion(
            "A {0}x{0} grid in this region has spacing {1:.6g} below the minimum distance {2:.6g}"
            .format(g, min(cell_w, cell_h), min_distance))

    cells = itertools.product(range(g), range(g))
    positions = []
    for row, col in itertools.islice(cells, count):
        positions.append(Position(x_low + (col + 0.5) * cell_w, y_low + (row + 0.5) * cell_h))
    layout = AntennaLayout(tuple(positions), min_distance)
    if not is_feasible(layout, region):
        raise InfeasibleRegion("Grid layout of {} antennas is not feasible in {}".format(count, region))
    logging.debug("circle packing init: {0} antennas on a {1}x{1} grid".format(count, g))
    return layout

def grid_nodes(region, step):
    """Nodes of a square grid anchored at the region's lower-left corner, inside the region"""
    x_low, x_high, y_low, y_high = region.bounding_box()
    xs = np.minimum(x_low + step * np.arange(math.floor((x_high - x_low) / step + 1e-9) + 1), x_high)
    ys = np.minimum(y_low + step * np.arange(math.floor((y_high - y_low) / step + 1e-9) + 1), y_high)
    nodes = np.array([[x, y] for y in ys for x in xs])
    inside = [region.contains(Position(x, y)) for x, y in nodes]
    return nodes[inside]

def snap_to_grid(layout, region, step):
    """Move every antenna to its nearest grid node (ties round up)"""
    x_low, x_high, y_low, y_high = region.bounding_box()
    nodes = []
    for p in layout.positions:
        x = x_low + step * math.floor((p.x - x_low) / step + 0.5)
        y = y_low + step * math.floor((p.y - y_low) / step + 0.5)
        nodes.append(Position(min(x, x_high), min(y, y_high)))
    snapped = AntennaLayout(tuple(nodes), layout.min_distance)
    if not is_feasible(snapped, region):
        raise InfeasibleRegion("Layout cannot be snapped to a grid of step {:.6g}".format(step))
    return snapped