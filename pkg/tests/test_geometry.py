import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from macap_cli.errors import InfeasibleRegion
from macap_cli.geometry import (AntennaLayout, Circle, Position, Rectangle, circle_packing_init, grid_nodes,
                                is_feasible, min_pairwise_distance, project_circle, project_rectangle,
                                snap_to_grid)

def test_position_must_be_finite():
    with pytest.raises(ValueError):
        Position(math.nan, 0.0)

def test_square_is_centered_and_closed():
    region = Rectangle.square(2.0)
    assert region.center == Position(0.0, 0.0)
    assert region.contains(Position(1.0, 1.0))
    assert not region.contains(Position(1.0000001, 0.0))

def test_rectangle_projection_clamps():
    region = Rectangle.square(2.0)
    assert region.project(Position(3.0, -0.5)) == Position(1.0, -0.5)
    assert region.project(Position(0.2, 0.3)) == Position(0.2, 0.3)

def test_circle_projection_lands_inside():
    region = Circle(Position(0.0, 0.0), 1.0)
    p = project_circle(Position(3.0, 4.0), region)
    assert region.contains(p)
    assert_allclose([p.x, p.y], [0.6, 0.8], atol=1e-12)

@pytest.mark.parametrize("point, expected", [
    ((0.0, 0.0), (0.0, 0.0)),
    ((2.0, 0.0), (1.0, 0.0)),
    ((-3.0, 5.0), (-1.0, 1.0)),
])
def test_project_rectangle_clamps(point, expected):
    p = project_rectangle(Position(*point), Rectangle(-1.0, 1.0, -1.0, 1.0))
    assert (p.x, p.y) == expected

def test_circle_packing_square():
    layout = circle_packing_init(4, Rectangle.square(3.0), 0.5)
    assert_allclose(layout.array, [[-0.75, -0.75], [0.75, -0.75], [-0.75, 0.75], [0.75, 0.75]])
    assert is_feasible(layout, Rectangle.square(3.0))

def test_circle_packing_single_antenna_at_center():
    layout = circle_packing_init(1, Rectangle.square(1.0), 0.5)
    assert layout.positions == (Position(0.0, 0.0),)

def test_circle_packing_too_small():
    with pytest.raises(InfeasibleRegion):
        circle_packing_init(4, Rectangle.square(0.8), 0.5)

def test_circle_packing_in_circle():
    region = Circle(Position(1.0, 1.0), 2.0)
    layout = circle_packing_init(4, region, 0.5)
    assert is_feasible(layout, region)

def test_feasibility_is_exact():
    region = Rectangle.square(2.0)
    assert is_feasible(AntennaLayout((Position(0, 0), Position(0.5, 0)), 0.5), region)
    assert not is_feasible(AntennaLayout((Position(0, 0), Position(0.4999, 0)), 0.5), region)
    assert not is_feasible(AntennaLayout((Position(0, 0), Position(1.5, 0)), 0.5), region)

def test_min_pairwise_distance():
    assert min_pairwise_distance([[0, 0]]) == math.inf
    assert min_pairwise_distance([[0, 0], [3, 4], [0, 1]]) == pytest.approx(1.0)

def test_grid_nodes_count():
    nodes = grid_nodes(Rectangle.square(4.0), 0.5)
    assert len(nodes) == 81
    assert_allclose(nodes[0], [-2.0, -2.0])
    assert_allclose(nodes[-1], [2.0, 2.0])

def test_snap_to_grid():
    region = Rectangle.square(3.0)
    snapped = snap_to_grid(circle_packing_init(4, region, 0.5), region, 0.5)
    assert_allclose(snapped.array, [[-0.5, -0.5], [1.0, -0.5], [-0.5, 1.0], [1.0, 1.0]])

def test_layout_shift():
    layout = AntennaLayout.from_array(np.array([[0.0, 0.0], [1.0, 0.0]]), 0.5)
    assert_allclose(layout.shifted(1.0, 2.0).array, [[1.0, 2.0], [2.0, 2.0]])

@pytest.mark.parametrize('region', [Rectangle(-1.0, 2.0, -0.5, 1.5), Circle(Position(0.5, -0.5), 1.2)])
def test_projection_is_nearest_region_point(region, rng):
    x_low, x_high, y_low, y_high = region.bounding_box()
    xs, ys = np.meshgrid(np.linspace(x_low, x_high, 301), np.linspace(y_low, y_high, 301))
    dense = np.array([[x, y] for x, y in zip(xs.ravel(), ys.ravel()) if region.contains(Position(x, y))])
    for point in rng.uniform(-4, 4, (25, 2)):
        p = Position(*point)
        projected = region.project(p)
        assert region.contains(projected)
        assert region.project(projected) == projected
        # No sampled region point is closer than the projection
        assert p.distance_to(projected) <= np.hypot(dense[:, 0] - p.x, dense[:, 1] - p.y).min() + 1e-12

@pytest.mark.parametrize('region', [Rectangle.square(2.0), Circle(Position(0.0, 0.0), 1.0)])
def test_shifted_region_moves_membership(region):
    moved = region.shifted(3.0, -1.0)
    assert moved.center == Position(region.center.x + 3.0, region.center.y - 1.0)
    assert moved.contains(Position(3.0, -1.0))
    assert not moved.contains(Position(0.0, 0.0))
    layout = circle_packing_init(4, region, 0.5)
    assert is_feasible(layout.shifted(3.0, -1.0), moved)
