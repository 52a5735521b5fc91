# Standard Library
from typing import List, Sequence

# Third Party
import numpy as np
from scipy.optimize import linprog
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import ConvexHull, QhullError, cKDTree

# First Party
from mdfocus.core.config_constants import DEFAULT_HULL_TOL
from mdfocus.core.logger import get_logger
from mdfocus.exceptions import InputError

ALLOWED_METHODS = ["auto", "lp", "qhull", "chain"]

logger = get_logger()


class HullPoint:
    """A labelled point, typically P(tau) = (tau, cumulative natural statistic)."""

    __slots__ = ("label", "coords")

    def __init__(self, label: int, coords):
        self.label = int(label)
        self.coords = np.asarray(coords, dtype=float).reshape(-1)

    def __repr__(self):
        return f"<class HullPoint: label={self.label}, coords={self.coords.tolist()}>"


def _as_arrays(points: Sequence[HullPoint]):
    if len(points) == 0:
        raise InputError("hull input must contain at least one point")
    labels = np.array([pt.label for pt in points], dtype=np.int64)
    coords = np.vstack([pt.coords for pt in points])
    return labels, coords


def _validate(labels, coords):
    if coords.ndim != 2 or coords.shape[0] == 0:
        raise InputError("hull input must contain at least one point")
    if coords.shape[0] != labels.shape[0]:
        raise InputError("hull input has {} labels for {} points".format(len(labels), len(coords)))
    if not np.all(np.isfinite(coords)):
        raise InputError("hull input contains non-finite coordinates")
    if np.unique(labels).shape[0] != labels.shape[0]:
        raise InputError("hull input labels must be distinct")


def _normalize(coords):
    scale = np.max(np.abs(coords), axis=0)
    scale[scale == 0] = 1.0
    return coords / scale


def _deduplicate(labels, x, tol):
    """Indices of points kept after merging points within tol (max-norm); smallest label wins."""
    m = x.shape[0]
    if m == 1:
        return np.arange(1)
    pairs = cKDTree(x).query_pairs(r=tol, p=np.inf, output_type="ndarray")
    if pairs.shape[0] == 0:
        return np.arange(m)
    graph = coo_matrix((np.ones(pairs.shape[0]), (pairs[:, 0], pairs[:, 1])), shape=(m, m))
    _, component = connected_components(graph, directed=False)
    keep = {}
    for i in np.argsort(labels, kind="stable"):
        keep.setdefault(component[i], i)
    return np.sort(np.fromiter(keep.values(), dtype=np.int64))


def _affine_frame(x, tol):
    """Coordinates of x within its affine span, and the span's dimension."""
    m, d = x.shape
    centered = x - x.mean(axis=0)
    _, sing, vt = np.linalg.svd(centered, full_matrices=False)
    rank = int(np.sum(sing > tol * np.sqrt(m)))
    if rank == d:
        return x, rank
    return centered @ vt[:rank].T, rank


def _lp_slack(others, target):
    """Smallest max-norm distance from target to the convex hull of others."""
    m, d = others.shape
    # variables: lambda_1..lambda_m, t
    c = np.zeros(m + 1)
    c[-1] = 1.0
    a_ub = np.vstack(
        [np.hstack([others.T, -np.ones((d, 1))]), np.hstack([-others.T, -np.ones((d, 1))])]
    )
    b_ub = np.concatenate([target, -target])
    a_eq = np.hstack([np.ones((1, m)), np.zeros((1, 1))])
    res = linprog(
        c, A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=[1.0], bounds=(0, None), method="highs"
    )
    if res.status != 0:
        logger.debug(f"vertex LP ended with status {res.status}: {res.message}")
        return np.inf
    return res.fun


def _lp_vertices(y, tol):
    m = y.shape[0]
    out = []
    for i in range(m):
        others = np.delete(y, i, axis=0)
        if _lp_slack(others, y[i]) > tol:
            out.append(i)
    return np.array(out, dtype=np.int64)


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _chain_vertices(y, tol):
    """Andrew's monotone chain; points within tol of an edge are dropped."""
    order = np.lexsort((y[:, 1], y[:, 0]))

    def half(indices):
        chain = []
        for i in indices:
            while len(chain) >= 2:
                o, a = y[chain[-2]], y[chain[-1]]
                if _cross(o, a, y[i]) > tol * np.hypot(*(y[i] - o)):
                    break
                chain.pop()
            chain.append(i)
        return chain

    lower = half(order)
    upper = half(order[::-1])
    return np.unique(np.array(lower[:-1] + upper[:-1], dtype=np.int64))


def _qhull_vertices(y, tol):
    try:
        return np.sort(ConvexHull(y).vertices)
    except QhullError as e:
        logger.debug(f"qhull failed ({e}), falling back to the vertex LP")
        return _lp_vertices(y, tol)


def extreme_indices(labels, coords, tol=DEFAULT_HULL_TOL, method="auto") -> np.ndarray:
    """Row indices of the hull vertices of `coords`, ordered by label."""
    if method not in ALLOWED_METHODS:
        raise InputError("method={} must be one of {}".format(method, ",".join(ALLOWED_METHODS)))
    labels = np.asarray(labels, dtype=np.int64)
    coords = np.asarray(coords, dtype=float)
    if coords.ndim == 1:
        coords = coords[:, None]
    _validate(labels, coords)

    kept = _deduplicate(labels, _normalize(coords), tol)
    x = _normalize(coords[kept])
    m = x.shape[0]
    if m <= 2:
        found = np.arange(m)
    else:
        y, rank = _affine_frame(x, tol)
        if rank == 0:
            found = np.array([np.argmin(labels[kept])])
        elif m <= rank + 1:
            found = np.arange(m)
        elif rank == 1:
            found = np.unique([np.argmin(y[:, 0]), np.argmax(y[:, 0])])
        elif method == "lp":
            found = _lp_vertices(y, tol)
        elif method == "chain" or (method == "auto" and rank == 2):
            if rank != 2:
                raise InputError("the monotone chain only handles planar point sets")
            found = _chain_vertices(y, tol)
        else:
            found = _qhull_vertices(y, tol)
    idx = kept[found]
    return idx[np.argsort(labels[idx], kind="stable")]


def hull_vertex_labels(labels, coords, tol=DEFAULT_HULL_TOL, method="auto") -> np.ndarray:
    labels = np.asarray(labels, dtype=np.int64)
    return labels[extreme_indices(labels, coords, tol=tol, method=method)]


def hull_vertices(points: Sequence[HullPoint], tol=DEFAULT_HULL_TOL, method="auto") -> List[int]:
    """Labels of the points that are vertices of the convex hull, in increasing order.

    A point is a vertex when it is not a convex combination of the other points up to
    max-norm slack tol, measured after scaling each coordinate by its largest magnitude.
    Points on the relative interior of faces are not vertices, points coincident within tol
    are merged into the smallest label, and affinely degenerate inputs are handled within
    their affine span.
    """
    labels, coords = _as_arrays(points)
    return hull_vertex_labels(labels, coords, tol=tol, method=method).tolist()


def is_vertex(points: Sequence[HullPoint], idx: int, tol=DEFAULT_HULL_TOL) -> bool:
    labels, coords = _as_arrays(points)
    _validate(labels, coords)
    where = np.flatnonzero(labels == idx)
    if where.shape[0] == 0:
        raise InputError("label {} is not among the hull input".format(idx))
    kept = _deduplicate(labels, _normalize(coords), tol)
    if where[0] not in kept:
        return False
    if kept.shape[0] == 1:
        return True
    x = _normalize(coords[kept])
    i = int(np.flatnonzero(kept == where[0])[0])
    return bool(_lp_slack(np.delete(x, i, axis=0), x[i]) > tol)


def hull_face_count(coords, tol=DEFAULT_HULL_TOL) -> int:
    """Number of facets (edges for d=2, triangles for d=3) of a full-dimensional point set."""
    coords = np.asarray(coords, dtype=float)
    d = coords.shape[1]
    if d not in (2, 3):
        raise InputError("face counting is only provided for d <= 3")
    x = _normalize(coords)
    if d == 2:
        labels = np.arange(x.shape[0])
        return int(extreme_indices(labels, x, tol=tol).shape[0])
    return int(ConvexHull(x).simplices.shape[0])
