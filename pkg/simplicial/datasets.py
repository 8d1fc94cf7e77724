"""
Experiment complexes.

small_complex(): a 7-node, 10-edge, 2-triangle complex with two harmonic
cycles, standing in for the figure-only synthetic complex.

two_hole_complex(): random points outside two disks, Bowyer-Watson
Delaunay triangulation, then the triangles covering the disks are removed
so the complex has exactly two holes.
"""

from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

import utils.sc_logging
import utils.sc_lib
from simplicial.complex import SimplicialComplex, betti_numbers, build_complex, connected_components
from simplicial.delaunay import circumcircle, delaunay_triangulation, orientation
from simplicial.errors import ConfigError, DatasetError

SMALL_EDGES = ((0, 1), (0, 2), (1, 2), (1, 3), (2, 3), (3, 4), (3, 5), (4, 5), (4, 6), (5, 6))
SMALL_TRIANGLES = ((0, 1, 2), (3, 4, 5))


@dataclass(frozen=True)
class TwoHoleConfig:
    num_points: int = 300
    seed: int = 0
    hole_centers: Tuple[Tuple[float, float], Tuple[float, float]] = ((0.3, 0.5), (0.7, 0.5))
    hole_radii: Tuple[float, float] = (0.1, 0.1)
    bbox: Tuple[float, float, float, float] = field(default=(0.0, 1.0, 0.0, 1.0))

    def validate(self):
        xmin, xmax, ymin, ymax = self.bbox
        if not (xmin < xmax and ymin < ymax):
            raise ConfigError(f"Degenerate bounding box {self.bbox}")
        if self.num_points < 3:
            raise ConfigError(f"Need at least 3 points, got {self.num_points}")
        if len(self.hole_centers) != 2 or len(self.hole_radii) != 2:
            raise ConfigError("Exactly two hole centers and two radii are required")
        for (cx, cy), r in zip(self.hole_centers, self.hole_radii):
            if r < 0:
                raise ConfigError(f"Hole radius must be nonnegative, got {r}")
            if cx - r <= xmin or cx + r >= xmax or cy - r <= ymin or cy + r >= ymax:
                raise ConfigError(f"Hole at ({cx}, {cy}) with radius {r} leaves the bounding box")
        (ax, ay), (bx, by) = self.hole_centers
        ra, rb = self.hole_radii
        if ra > 0 and rb > 0 and np.hypot(ax - bx, ay - by) <= ra + rb:
            raise ConfigError("Hole disks overlap")

    @property
    def expected_holes(self) -> int:
        return sum(1 for r in self.hole_radii if r > 0)

    def to_dict(self) -> dict:
        return {
            "num_points": self.num_points,
            "seed": utils.sc_lib.seed_label(self.seed),
            "hole_centers": [list(c) for c in self.hole_centers],
            "hole_radii": list(self.hole_radii),
            "bbox": list(self.bbox),
        }


def small_complex() -> SimplicialComplex:
    return build_complex(7, SMALL_EDGES, SMALL_TRIANGLES)


def _in_disk(point, center, radius) -> bool:
    return radius > 0 and (point[0] - center[0]) ** 2 + (point[1] - center[1]) ** 2 < radius ** 2


def _sample_points(cfg: TwoHoleConfig, rng: np.random.Generator) -> np.ndarray:
    # uniform over the box minus the hole disks, by rejection
    xmin, xmax, ymin, ymax = cfg.bbox
    accepted = []
    while len(accepted) < cfg.num_points:
        batch = rng.uniform(low=(xmin, ymin), high=(xmax, ymax), size=(cfg.num_points, 2))
        for point in batch:
            if not any(_in_disk(point, c, r) for c, r in zip(cfg.hole_centers, cfg.hole_radii)):
                accepted.append(point)
                if len(accepted) == cfg.num_points:
                    break
    return np.asarray(accepted)


def _covers_hole(tri_points: np.ndarray, center, radius) -> bool:
    if radius <= 0:
        return False
    a, b, c = tri_points
    circ_center, _ = circumcircle(a, b, c)
    if _in_disk(circ_center, center, radius) or _in_disk((a + b + c) / 3.0, center, radius):
        return True
    if any(_in_disk(v, center, radius) for v in tri_points):
        return True
    # triangle containing the hole center
    signs = [orientation(a, b, center), orientation(b, c, center), orientation(c, a, center)]
    return all(s > 0 for s in signs) or all(s < 0 for s in signs)


def two_hole_dataset(cfg: TwoHoleConfig) -> Tuple[SimplicialComplex, np.ndarray]:
    """Two-hole complex together with the node coordinates.

    Points are drawn uniformly from the box minus the hole disks (rejection
    sampling), not from the whole box, so the node count stays close to
    num_points. A triangle is removed when a vertex, its circumcenter or its
    centroid lies in a hole disk, or when it contains a hole center; the
    last two catch large triangles that straddle a small hole with every
    vertex outside it. Edges that border no remaining triangle and nodes
    left isolated are dropped as well.

    Raises DatasetError unless the result is connected with exactly two
    holes; callers retry with another seed.
    """
    cfg.validate()
    rng = utils.sc_lib.make_rng(cfg.seed)
    points = _sample_points(cfg, rng)

    triangles = []
    for tri in delaunay_triangulation(points):
        tri_points = points[list(tri)]
        if not any(_covers_hole(tri_points, c, r) for c, r in zip(cfg.hole_centers, cfg.hole_radii)):
            triangles.append(tri)

    # only edges bordering a remaining triangle survive; the rest lie across the holes
    edges = sorted({face for (i, j, k) in triangles for face in ((i, j), (i, k), (j, k))})

    used = sorted({v for edge in edges for v in edge})
    if len(used) < len(points):
        utils.sc_logging.update_debug_log(f"Dropping {len(points) - len(used)} isolated nodes next to the holes")
        relabel = {old: new for new, old in enumerate(used)}
        points = points[used]
        edges = [(relabel[i], relabel[j]) for i, j in edges]
        triangles = [(relabel[i], relabel[j], relabel[k]) for i, j, k in triangles]

    c = build_complex(len(points), edges, triangles)

    components = connected_components(c)
    if components != 1:
        raise DatasetError(f"Two-hole complex is disconnected ({components} components); adjust radii or seed")
    _, beta1, _ = betti_numbers(c)
    if beta1 != cfg.expected_holes:
        raise DatasetError(f"Complex has {beta1} holes, expected {cfg.expected_holes}; adjust radii or seed")

    utils.sc_logging.update_debug_log(f"Two-hole complex generated with counts {c.counts}")
    return c, points


def two_hole_complex(cfg: Optional[TwoHoleConfig] = None) -> SimplicialComplex:
    c, _ = two_hole_dataset(cfg or TwoHoleConfig())
    return c
