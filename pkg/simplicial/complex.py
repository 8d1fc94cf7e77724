"""
Oriented simplicial complexes up to order 2.
Boundary (incidence) operators B1, B2 and the Hodge Laplacians built from them.

Orientation convention: edge (i, j) with i < j flows from i to j, so
B1[i, e] = -1 (tail) and B1[j, e] = +1 (head). Triangle (i, j, k) with
i < j < k is oriented i -> j -> k and has boundary (i,j) + (j,k) - (i,k).
"""

from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components as _csgraph_components

import utils.sc_logging
import utils.sc_lib
from simplicial.errors import ComplexError

Edge = Tuple[int, int]
Triangle = Tuple[int, int, int]


@dataclass(frozen=True)
class SimplicialComplex:
    num_nodes: int
    edges: Tuple[Edge, ...]
    triangles: Tuple[Triangle, ...]
    b1: np.ndarray = field(repr=False, compare=False)
    b2: np.ndarray = field(repr=False, compare=False)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @property
    def num_triangles(self) -> int:
        return len(self.triangles)

    @property
    def counts(self) -> Tuple[int, int, int]:
        return self.num_nodes, self.num_edges, self.num_triangles

    def edge_index(self) -> Dict[Edge, int]:
        return {edge: idx for idx, edge in enumerate(self.edges)}


@dataclass(frozen=True)
class HodgeLaplacians:
    l0: np.ndarray
    l1: np.ndarray
    l2: np.ndarray
    l_low: np.ndarray
    l_up: np.ndarray


def _readonly(matrix: np.ndarray) -> np.ndarray:
    matrix.setflags(write=False)
    return matrix


def _canonical_simplices(simplices, order: int, canonicalize: bool) -> List[tuple]:
    result = []
    for simplex in simplices:
        simplex = tuple(int(v) for v in simplex)
        if len(simplex) != order + 1:
            raise ComplexError(f"Expected {order + 1} vertices per {order}-simplex, got {simplex}")
        if canonicalize:
            simplex = tuple(sorted(simplex))
        elif any(simplex[k] >= simplex[k + 1] for k in range(order)):
            raise ComplexError(f"Simplex {simplex} is not sorted-canonical (strictly increasing)")
        if len(set(simplex)) != len(simplex):
            raise ComplexError(f"Degenerate simplex {simplex}")
        result.append(simplex)
    if canonicalize:
        result = sorted(set(result))
    return result


def build_complex(nodes: int, edges: Sequence[Sequence[int]], triangles: Sequence[Sequence[int]] = (),
                  canonicalize: bool = False) -> SimplicialComplex:
    """Build a complex and its signed incidence matrices.

    With canonicalize=False every simplex must already be strictly increasing
    and the lists duplicate-free; their order fixes the column order of B1 and B2.
    """
    num_nodes = int(nodes)
    if num_nodes < 0:
        raise ComplexError(f"Node count must be nonnegative, got {num_nodes}")

    edge_list = _canonical_simplices(edges, 1, canonicalize)
    triangle_list = _canonical_simplices(triangles, 2, canonicalize)

    edge_index: Dict[Edge, int] = {}
    for edge in edge_list:
        if edge in edge_index:
            raise ComplexError(f"Duplicate edge {edge}")
        if edge[0] < 0 or edge[1] >= num_nodes:
            raise ComplexError(f"Edge {edge} has a node index out of range [0, {num_nodes})")
        edge_index[edge] = len(edge_index)

    seen_triangles = set()
    for tri in triangle_list:
        if tri in seen_triangles:
            raise ComplexError(f"Duplicate triangle {tri}")
        if tri[0] < 0 or tri[2] >= num_nodes:
            raise ComplexError(f"Triangle {tri} has a node index out of range [0, {num_nodes})")
        seen_triangles.add(tri)

    num_edges = len(edge_list)
    num_triangles = len(triangle_list)

    b1 = np.zeros((num_nodes, num_edges))
    for e, (i, j) in enumerate(edge_list):
        b1[i, e] = -1.0
        b1[j, e] = 1.0

    b2 = np.zeros((num_edges, num_triangles))
    for t, (i, j, k) in enumerate(triangle_list):
        for face, sign in (((i, j), 1.0), ((j, k), 1.0), ((i, k), -1.0)):
            if face not in edge_index:
                raise ComplexError(f"Triangle {(i, j, k)} needs edge {face}, which is not in the edge list")
            b2[edge_index[face], t] = sign

    # Entries are small integers, so the product is exact in floating point
    if np.any(b1 @ b2 != 0.0):
        raise ComplexError("Boundary of a boundary is nonzero: B1 @ B2 != 0")

    return SimplicialComplex(
        num_nodes=num_nodes,
        edges=tuple(edge_list),
        triangles=tuple(triangle_list),
        b1=_readonly(b1),
        b2=_readonly(b2),
    )


def hodge_laplacians(c: SimplicialComplex) -> HodgeLaplacians:
    """L0 = B1 B1^T, L_low = B1^T B1, L_up = B2 B2^T, L1 = L_low + L_up, L2 = B2^T B2"""
    b1, b2 = c.b1, c.b2
    l_low = b1.T @ b1
    l_up = b2 @ b2.T
    return HodgeLaplacians(
        l0=_readonly(b1 @ b1.T),
        l1=_readonly(l_low + l_up),
        l2=_readonly(b2.T @ b2),
        l_low=_readonly(l_low),
        l_up=_readonly(l_up),
    )


def connected_components(c: SimplicialComplex) -> int:
    """Number of connected components of the 1-skeleton (beta_0)"""
    if c.num_nodes == 0:
        return 0
    rows = [i for i, _ in c.edges]
    cols = [j for _, j in c.edges]
    adjacency = coo_matrix((np.ones(len(rows)), (rows, cols)), shape=(c.num_nodes, c.num_nodes))
    count, _ = _csgraph_components(adjacency, directed=False)
    return int(count)


def betti_numbers(c: SimplicialComplex) -> Tuple[int, int, int]:
    """(beta_0, beta_1, beta_2) from the ranks of the incidence matrices"""
    rank_b1 = int(np.linalg.matrix_rank(c.b1)) if c.b1.size else 0
    rank_b2 = int(np.linalg.matrix_rank(c.b2)) if c.b2.size else 0
    return (c.num_nodes - rank_b1,
            c.num_edges - rank_b1 - rank_b2,
            c.num_triangles - rank_b2)


def complex_to_dict(c: SimplicialComplex) -> dict:
    """JSON document form; incidence matrices are derived, never stored"""
    return {
        "num_nodes": c.num_nodes,
        "edges": [list(edge) for edge in c.edges],
        "triangles": [list(tri) for tri in c.triangles],
    }


def complex_from_dict(data: dict, canonicalize: bool = False) -> SimplicialComplex:
    """Rebuild and validate a complex from its JSON document form"""
    try:
        num_nodes = data["num_nodes"]
        edges = data["edges"]
        triangles = data.get("triangles", [])
    except (KeyError, TypeError, AttributeError) as e:
        raise ComplexError(f"Malformed complex document: {e}") from e

    if not isinstance(num_nodes, int) or isinstance(num_nodes, bool):
        raise ComplexError(f"num_nodes must be an integer, got {num_nodes!r}")

    c = build_complex(num_nodes, edges, triangles, canonicalize=canonicalize)
    utils.sc_logging.update_debug_log(f"Complex loaded with counts {c.counts}")
    return c


def complex_hash(c: SimplicialComplex) -> str:
    return utils.sc_lib.stable_hash(complex_to_dict(c))
