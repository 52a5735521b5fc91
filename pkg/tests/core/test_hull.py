# Third Party
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

# First Party
from mdfocus.core.hull import (
    HullPoint,
    hull_face_count,
    hull_vertex_labels,
    hull_vertices,
    is_vertex,
)
from mdfocus.exceptions import InputError


def _points(coords, labels=None):
    labels = range(1, len(coords) + 1) if labels is None else labels
    return [HullPoint(label, c) for label, c in zip(labels, coords)]


def _lifted_walk(rng, n, d):
    steps = rng.normal(size=(n, d))
    sums = np.vstack([np.zeros(d), np.cumsum(steps, axis=0)])
    return np.column_stack([np.arange(n + 1), sums])


def test_collinear_keeps_endpoints():
    assert hull_vertices(_points([(1, 0), (2, 1), (3, 2)])) == [1, 3]


def test_triangle_keeps_all():
    assert hull_vertices(_points([(1, 0), (2, 5), (3, 0)])) == [1, 2, 3]


def test_square_center_is_not_vertex():
    points = _points([(0, 0), (0, 1), (1, 0), (1, 1), (0.5, 0.5)])
    assert not is_vertex(points, 5)
    assert all(is_vertex(points, label) for label in range(1, 5))
    assert hull_vertices(points) == [1, 2, 3, 4]


def test_single_point():
    assert is_vertex(_points([(3.0, 4.0)]), 1)
    assert hull_vertices(_points([(3.0, 4.0)])) == [1]


def test_edge_interior_points_are_dropped():
    square = [(0, 0), (2, 0), (2, 2), (0, 2), (1, 0), (2, 1)]
    assert hull_vertices(_points(square)) == [1, 2, 3, 4]
    assert hull_vertices(_points(square), method="lp") == [1, 2, 3, 4]


def test_duplicates_merge_to_smallest_label():
    points = _points([(0, 0), (1, 1), (0, 0), (2, 0)], labels=[7, 3, 2, 9])
    assert hull_vertices(points) == [2, 3, 9]


def test_input_errors():
    with pytest.raises(InputError):
        hull_vertices([])
    with pytest.raises(InputError):
        hull_vertices(_points([(0, 0), (np.inf, 1)]))
    with pytest.raises(InputError):
        hull_vertices(_points([(0, 0), (1, 1)], labels=[1, 1]))
    with pytest.raises(InputError):
        is_vertex(_points([(0, 0), (1, 1)]), 5)
    with pytest.raises(InputError):
        hull_vertices(_points([(0, 0), (1, 1), (2, 3)]), method="gift")


def test_degenerate_input_uses_affine_span():
    # four coplanar points in 3d, one inside the triangle of the others
    points = _points([(0, 0, 1), (4, 0, 1), (0, 4, 1), (1, 1, 1)])
    assert hull_vertices(points) == [1, 2, 3]
    assert hull_vertices(points, method="lp") == [1, 2, 3]


def test_lifted_walk_matches_vertex_lp(rng):
    coords = _lifted_walk(rng, 19, 2)
    points = _points(coords, labels=range(1, 21))
    brute = [pt.label for pt in points if is_vertex(points, pt.label)]
    assert hull_vertices(points) == brute
    assert hull_vertices(points, method="lp") == brute


def test_d4_agrees_with_is_vertex(rng):
    points = _points(rng.normal(size=(10, 4)))
    found = set(hull_vertices(points))
    for pt in points:
        assert is_vertex(points, pt.label) == (pt.label in found)


def test_idempotent(rng):
    for d in (1, 2, 3):
        coords = _lifted_walk(rng, 60, d)
        points = _points(coords, labels=range(len(coords)))
        first = hull_vertices(points)
        again = hull_vertices([pt for pt in points if pt.label in first])
        assert again == first


def test_first_and_last_labels_survive(rng):
    for d in (1, 2, 3):
        coords = _lifted_walk(rng, 100, d)
        labels = hull_vertex_labels(np.arange(len(coords)), coords)
        assert labels[0] == 0
        assert labels[-1] == len(coords) - 1


def test_pruning_keeps_every_convex_maximum(rng):
    n = 200
    walk = _lifted_walk(rng, n, 2)
    total = walk[n, 1:]
    coords = walk[:n]
    kept = hull_vertex_labels(np.arange(n), coords)
    for direction in rng.normal(size=(20, 3)):
        # a linear functional and the quadratic-over-linear likelihood are both convex in P(tau)
        linear = coords @ direction
        assert linear[kept].max() == pytest.approx(linear.max(), abs=1e-9)
    taus = np.arange(n)
    glr = np.sum((total - coords[:, 1:]) ** 2, axis=1) / (n - taus)
    assert glr[kept].max() == pytest.approx(glr.max(), abs=1e-9)


@settings(max_examples=200, deadline=None)
@given(
    st.lists(
        st.tuples(st.integers(-10, 10), st.integers(-10, 10)), min_size=1, max_size=30, unique=True
    )
)
def test_planar_methods_agree(coords):
    points = _points(coords)
    chain = hull_vertices(points, tol=1e-7, method="chain")
    lp = hull_vertices(points, tol=1e-7, method="lp")
    assert chain == lp


def test_face_count():
    square = np.array([(0, 0), (1, 0), (1, 1), (0, 1), (0.5, 0.5)])
    assert hull_face_count(square) == 4
    tetrahedron = np.array([(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)])
    assert hull_face_count(tetrahedron) == 4
    cube = np.array([(i, j, k) for i in (0, 1) for j in (0, 1) for k in (0, 1)], dtype=float)
    assert hull_face_count(cube) == 12
    with pytest.raises(InputError):
        hull_face_count(np.zeros((6, 4)))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.integers(1, 5))
def test_vertices_survive_affine_maps(seed, d):
    rng = np.random.default_rng(seed)
    coords = rng.normal(size=(20, d))
    labels = np.arange(20)
    q, _ = np.linalg.qr(rng.normal(size=(d, d)))
    linear = q @ np.diag(rng.uniform(0.5, 2.0, size=d))
    shift = rng.uniform(-5.0, 5.0, size=d)
    moved = coords @ linear.T + shift
    assert (
        hull_vertex_labels(labels, moved).tolist() == hull_vertex_labels(labels, coords).tolist()
    )
