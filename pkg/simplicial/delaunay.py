"""
Incremental Bowyer-Watson Delaunay triangulation of 2-D point sets.

A large super-triangle bootstraps the mesh; every inserted point removes the
triangles whose circumcircle contains it and re-triangulates the cavity.
In-circle tests are floating point with a 1e-12 relative guard, so a point
exactly on a circumcircle keeps the older triangle (insertion order breaks
cocircular ties).
"""

from typing import List, Tuple

import numpy as np

import utils.sc_logging
from simplicial.errors import DatasetError

IN_CIRCLE_EPS = 1e-12
SUPER_SCALE = 1e3


def orientation(a, b, c) -> float:
    """Twice the signed area of (a, b, c); positive when counter-clockwise"""
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def circumcircle(a, b, c) -> Tuple[np.ndarray, float]:
    """(center, squared radius) of the circle through a, b, c"""
    d = 2.0 * orientation(a, b, c)
    if d == 0.0:
        return np.array([np.inf, np.inf]), np.inf
    a2 = a[0] ** 2 + a[1] ** 2
    b2 = b[0] ** 2 + b[1] ** 2
    c2 = c[0] ** 2 + c[1] ** 2
    ux = (a2 * (b[1] - c[1]) + b2 * (c[1] - a[1]) + c2 * (a[1] - b[1])) / d
    uy = (a2 * (c[0] - b[0]) + b2 * (a[0] - c[0]) + c2 * (b[0] - a[0])) / d
    center = np.array([ux, uy])
    return center, float((a[0] - ux) ** 2 + (a[1] - uy) ** 2)


def delaunay_triangulation(points) -> List[Tuple[int, int, int]]:
    """Delaunay triangles of `points` (n x 2) as sorted vertex-index triples"""
    points = np.asarray(points, dtype=float)
    if points.ndim != 2 or points.shape[1] != 2:
        raise DatasetError(f"Expected an n x 2 point array, got shape {points.shape}")
    n = points.shape[0]
    if n < 3:
        return []

    lo, hi = points.min(axis=0), points.max(axis=0)
    span = max(float(np.max(hi - lo)), 1e-12)
    mid = 0.5 * (lo + hi)
    big = SUPER_SCALE * span
    super_vertices = np.array([
        [mid[0] - 2.0 * big, mid[1] - big],
        [mid[0] + 2.0 * big, mid[1] - big],
        [mid[0], mid[1] + 2.0 * big],
    ])
    coords = np.vstack([points, super_vertices])

    triangles: List[Tuple[int, int, int]] = [(n, n + 1, n + 2)]
    center, radius2 = circumcircle(*coords[[n, n + 1, n + 2]])
    centers = [center]
    radii2 = [radius2]

    for p in range(n):
        point = coords[p]
        cc = np.asarray(centers)
        r2 = np.asarray(radii2)
        dist2 = np.sum((cc - point) ** 2, axis=1)
        bad = dist2 < r2 * (1.0 - IN_CIRCLE_EPS)

        # cavity boundary: edges of bad triangles that no other bad triangle shares
        edge_count = {}
        for t_idx in np.flatnonzero(bad):
            a, b, c = triangles[t_idx]
            for edge in ((a, b), (b, c), (c, a)):
                key = (min(edge), max(edge))
                edge_count[key] = edge_count.get(key, 0) + 1

        keep = np.flatnonzero(~bad)
        triangles = [triangles[k] for k in keep]
        centers = [centers[k] for k in keep]
        radii2 = [radii2[k] for k in keep]

        for (u, v), count in edge_count.items():
            if count != 1:
                continue
            center, radius2 = circumcircle(coords[u], coords[v], point)
            if not np.isfinite(radius2):
                continue
            triangles.append((u, v, p))
            centers.append(center)
            radii2.append(radius2)

    result = sorted(tuple(sorted(t)) for t in triangles if max(t) < n)
    utils.sc_logging.update_debug_log(f"Delaunay triangulation: {n} points, {len(result)} triangles")
    return result
