"""Successive convex approximation for moving a single antenna.

The objective f(r)^H B f(r) is convex in the field response f(r), so it is
lower-bounded by its linearization at the current point r_i, which reduces
the problem to maximizing g_bar(r) = Re{b^H f(r)} with b = B f(r_i). g_bar is
in turn lower-bounded by a quadratic with curvature -delta, whose maximizer is
a gradient step; when that step leaves the feasible set the min-distance
constraints are linearized and a small QP is solved instead.
"""
import itertools
import logging
import math
from dataclasses import dataclass

import numpy as np

from macap_cli.channel import PathSet, field_response, field_response_matrix
from macap_cli.errors import DegenerateMajorizer, NumericalFailure
from macap_cli.geometry import Position, respects_distance

# Linearized distance constraints are tightened by this relative margin so
# that rounding cannot leave a QP solution just inside the true minimum distance.
DISTANCE_MARGIN = 1e-9
# Candidates may violate a linear constraint by this much before rejection
HALFPLANE_TOL = 1e-12
DEFAULT_MAX_ITERS = 100

@dataclass(frozen=True, eq=False)
class QuadraticFormObjective:
    """f(r)^H matrix f(r) for the field response f over the given paths"""
    matrix: np.ndarray
    paths: PathSet
    wavelength: float

    def __post_init__(self):
        matrix = np.asarray(self.matrix, dtype=complex)
        if matrix.shape != (len(self.paths), len(self.paths)):
            raise ValueError("objective matrix must be {0}x{0}, got {1}".format(len(self.paths), matrix.shape))
        object.__setattr__(self, 'matrix', matrix)

    @classmethod
    def rank_one(cls, vector, paths, wavelength):
        vector = np.asarray(vector, dtype=complex).reshape(-1)
        return cls(np.outer(vector, vector.conj()), paths, wavelength)

    def value(self, p):
        f = field_response(p, self.paths, self.wavelength)
        return float(np.real(f.conj() @ self.matrix @ f))

    def values(self, positions):
        """Objective at every row of an (count, 2) array"""
        F = field_response_matrix(positions, self.paths, self.wavelength)
        return np.real(np.sum(F.conj() * (self.matrix @ F), axis=0))

@dataclass(frozen=True)
class ScaState:
    current: Position
    objective_value: float
    iteration: int

@dataclass(frozen=True)
class LinearizedDistanceConstraint:
    """First-order inner approximation of ||r - anchor|| >= D around reference

    The half-plane u . (r - anchor) >= D with u the unit vector from anchor to
    reference lies inside the true constraint because the norm is convex.
    """
    anchor: Position
    reference: Position
    min_distance: float

    def __post_init__(self):
        if self.reference.distance_to(self.anchor) < self.min_distance:
            raise ValueError("reference must satisfy the distance constraint it linearizes")

    def halfplane(self, margin=0.0):
        """(normal, offset) with normal . r >= offset"""
        anchor = self.anchor.as_array()
        direction = self.reference.as_array() - anchor
        normal = direction / np.linalg.norm(direction)
        return normal, self.min_distance * (1 + margin) + normal @ anchor

def surrogate_coefficients(obj, at):
    return obj.matrix @ field_response(at, obj.paths, obj.wavelength)

def _phases(b, at, paths, wavelength):
    rho = at.x * paths.direction_x + at.y * paths.direction_y
    return 2 * np.pi * rho / wavelength - np.angle(b)

def surrogate_value(b, at, paths, wavelength):
    """g_bar(at) = Re{b^H f(at)}"""
    return float(np.real(b.conj() @ field_response(at, paths, wavelength)))

def surrogate_gradient(b, at, paths, wavelength):
    kappa = _phases(b, at, paths, wavelength)
    weights = np.abs(b) * np.sin(kappa)
    scale = -2 * np.pi / wavelength
    return np.array([
        scale * np.sum(weights * paths.direction_x),
        scale * np.sum(weights * paths.direction_y),
    ])

def surrogate_hessian(b, at, paths, wavelength):
    kappa = _phases(b, at, paths, wavelength)
    weights = np.abs(b) * np.cos(kappa)
    scale = -4 * np.pi ** 2 / wavelength ** 2
    ux, uy = paths.direction_x, paths.direction_y
    xx = scale * np.sum(weights * ux * ux)
    xy = scale * np.sum(weights * ux * uy)
    yy = scale * np.sum(weights * uy * uy)
    return np.array([[xx, xy], [xy, yy]])

def majorizer_delta(b, wavelength):
    """Curvature bound with delta * I >= Hessian of g_bar everywhere"""
    return float(8 * np.pi ** 2 / wavelength ** 2 * np.sum(np.abs(b)))

def unconstrained_step(grad, delta, at):
    if delta == 0:
        raise DegenerateMajorizer("zero curvature bound: surrogate is stationary at ({}, {})".format(at.x, at.y))
    return Position(at.x + grad[0] / delta, at.y + grad[1] / delta)

def quadratic_surrogate(delta, grad, at, r):
    """g_tilde(r) = -(delta/2) r.r + (grad + delta at) . r"""
    r_ = r.as_array()
    return float(-delta / 2 * r_ @ r_ + (grad + delta * at.as_array()) @ r_)

def _line_projection(target, normal, offset):
    return target + (offset - normal @ target) / (normal @ normal) * normal

def _vertex(first, second):
    (n1, o1), (n2, o2) = first, second
    system = np.array([n1, n2])
    if abs(np.linalg.det(system)) < 1e-12:
        return None
    return np.linalg.solve(system, np.array([o1, o2]))

def solve_constrained_qp(delta, grad, at, region, constraints):
    """Maximize the quadratic surrogate over the region and the linearized constraints

    The surrogate has spherical level sets around target = at + grad/delta, so
    the QP is the Euclidean projection of target onto a polygon with at most a
    handful of sides. It is solved exactly by enumerating active sets of size
    zero, one and two; every feasible candidate is scored and the best kept,
    ties going to the lexicographically smallest position. at itself is always
    a candidate, so the result never scores below it.
    """
    if delta <= 0:
        raise DegenerateMajorizer("constrained step needs a positive curvature bound")
    target = at.as_array() + np.asarray(grad, dtype=float) / delta
    halfplanes = list(region.halfplanes()) + [c.halfplane(DISTANCE_MARGIN) for c in constraints]
    anchors = [c.anchor for c in constraints]
    min_distance = constraints[0].min_distance if constraints else 0.0

    raw = [target]
    raw.extend(_line_projection(target, n, o) for n, o in halfplanes)
    for first, second in itertools.combinations(halfplanes, 2):
        vertex = _vertex(first, second)
        if vertex is not None:
            raw.append(vertex)

    candidates = []
    for point in raw:
        if not all(n @ point >= o - HALFPLANE_TOL for n, o in halfplanes):
            continue
        p = region.project(Position.from_array(point))
        if respects_distance(p, anchors, min_distance):
            candidates.append(p)
    candidates.append(at)

    def score(p):
        return (-quadratic_surrogate(delta, grad, at, p), p.x, p.y)

    best = min(candidates, key=score)
    if not math.isfinite(best.x) or not math.isfinite(best.y):
        raise NumericalFailure("constrained QP produced a non-finite position")
    return best

def _admissible(p, region, others, min_distance):
    return region.contains(p) and respects_distance(p, others, min_distance)

def sca_iterations(obj, start, region, others, min_distance, eps=1e-3, max_iters=DEFAULT_MAX_ITERS):
    """Yield one ScaState per SCA iteration, starting with iteration 0 at start

    Stops when the relative objective increase falls below eps, after
    max_iters iterations, or when the surrogate degenerates. The objective
    never decreases: a step that would lower it (possible only through
    rounding) ends the iterations instead.
    """
    if not _admissible(start, region, others, min_distance):
        raise ValueError("SCA start position is not feasible")
    current = start
    value = obj.value(current)
    yield ScaState(current, value, 0)

    for iteration in range(1, max_iters + 1):
        b = surrogate_coefficients(obj, current)
        grad = surrogate_gradient(b, current, obj.paths, obj.wavelength)
        delta = majorizer_delta(b, obj.wavelength)
        try:
            candidate = unconstrained_step(grad, delta, current)
        except DegenerateMajorizer:
            logging.debug("SCA stationary at iteration {}".format(iteration))
            return

        if not _admissible(candidate, region, others, min_distance):
            if others:
                constraints = [LinearizedDistanceConstraint(o, current, min_distance) for o in others]
                candidate = solve_constrained_qp(delta, grad, current, region, constraints)
            else:
                candidate = region.project(candidate)

        new_value = obj.value(candidate)
        if new_value < value:
            logging.debug("SCA step would decrease objective by {:.3g}, stopping".format(value - new_value))
            return
        increase = new_value - value
        current, value = candidate, new_value
        yield ScaState(current, value, iteration)
        if increase <= eps * abs(value):
            return

def sca_optimize_position(obj, start, region, others, min_distance, eps=1e-3, max_iters=DEFAULT_MAX_ITERS):
    state = None
    for state in sca_iterations(obj, start, region, others, min_distance, eps, max_iters):
        pass
    return state.current

def grid_search_position(obj, start, nodes, others, min_distance):
    """Best grid node for the objective among nodes at least min_distance from others

    Returns start unless some node strictly improves on it.
    """
    if len(nodes) == 0:
        return start
    values = obj.values(nodes)
    if others:
        anchors = np.array([[o.x, o.y] for o in others])
        gaps = np.hypot(nodes[:, None, 0] - anchors[None, :, 0], nodes[:, None, 1] - anchors[None, :, 1])
        values = np.where(np.all(gaps >= min_distance, axis=1), values, -np.inf)
    best = int(np.argmax(values))
    if values[best] > obj.value(start):
        return Position.from_array(nodes[best])
    return start

def positions_except(positions, index):
    return positions[:index] + positions[index + 1:]
