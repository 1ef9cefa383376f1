import numpy as np
import pytest

from haloscope.errors import InvalidLassoError
from haloscope.selection import CircleLasso, PolygonLasso, rasterize_lasso


def point_in_polygon_oracle(px, py, vertices):
    """Even-odd rule by explicit ray crossing count, one point at a time."""
    crossings = 0
    v = np.asarray(vertices, dtype=float)
    for i in range(len(v)):
        ax, ay = v[i]
        bx, by = v[(i + 1) % len(v)]
        if (ay > py) != (by > py):
            x_at = ax + (py - ay) / (by - ay) * (bx - ax)
            if x_at < px:
                crossings += 1
    return crossings % 2 == 1


def test_unit_square_polygon_pixel_count():
    mask = rasterize_lasso(PolygonLasso([(0, 0), (10, 0), (10, 10), (0, 10)]), (200, 200))
    assert mask.set_pixel_count == 100


def test_circle_area_within_one_percent():
    mask = rasterize_lasso(CircleLasso(center=(100.0, 100.0), radius=50.0), (200, 200))
    expected = np.pi * 50.0 ** 2
    assert abs(mask.set_pixel_count - expected) <= 0.01 * expected


def test_two_vertex_polygon_rejected():
    with pytest.raises(InvalidLassoError):
        rasterize_lasso(PolygonLasso([(0, 0), (10, 10)]), (100, 100))


def test_nonpositive_circle_radius_rejected():
    with pytest.raises(InvalidLassoError):
        rasterize_lasso(CircleLasso(center=(5, 5), radius=0.0), (100, 100))


def test_polygon_matches_per_pixel_oracle():
    rng = np.random.default_rng(11)
    vertices = rng.uniform(2, 48, (7, 2))
    mask = rasterize_lasso(PolygonLasso(vertices), (50, 50))
    for j in range(50):
        for i in range(50):
            assert mask.bits[j, i] == point_in_polygon_oracle(i + 0.5, j + 0.5, vertices), (i, j)


def test_circle_matches_per_pixel_distance_oracle():
    mask = rasterize_lasso(CircleLasso(center=(20.3, 17.8), radius=9.4), (40, 40))
    xs = np.arange(40) + 0.5
    ys = np.arange(40) + 0.5
    dist2 = (ys[:, None] - 17.8) ** 2 + (xs[None, :] - 20.3) ** 2
    assert np.array_equal(mask.bits, dist2 <= 9.4 ** 2)


def test_concave_polygon_even_odd():
    # a bowtie self-intersects; the crossing region fills by the even-odd rule
    vertices = [(0, 0), (20, 20), (20, 0), (0, 20)]
    mask = rasterize_lasso(PolygonLasso(vertices), (30, 30))
    for j in range(30):
        for i in range(30):
            assert mask.bits[j, i] == point_in_polygon_oracle(i + 0.5, j + 0.5, vertices)
