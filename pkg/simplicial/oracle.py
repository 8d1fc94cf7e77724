"""
Brute-force reference computations used by the tests.
Each routine takes the slowest, most literal route so it shares no code path
with the main implementation.
"""

import numpy as np

from simplicial.complex import SimplicialComplex, build_complex
from simplicial.errors import DimensionError


def khatri_rao_bruteforce(a, b) -> np.ndarray:
    """Column-wise Kronecker product built with explicit loops"""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[1]:
        raise DimensionError(f"Column counts differ: {a.shape} vs {b.shape}")

    m, k = a.shape
    n = b.shape[0]
    out = np.zeros((m * n, k))
    for j in range(k):
        for r in range(m):
            for s in range(n):
                out[r * n + s, j] = a[r, j] * b[s, j]
    return out


def vec_identity_check(a, b_vec, c) -> float:
    """max |vec(A diag(b) C) - (C^T kr A) b|"""
    a = np.asarray(a, dtype=float)
    b_vec = np.asarray(b_vec, dtype=float).ravel()
    c = np.asarray(c, dtype=float)
    if a.ndim != 2 or c.ndim != 2 or a.shape[1] != len(b_vec) or c.shape[0] != len(b_vec):
        raise DimensionError(f"Not conformable: A {a.shape}, b {b_vec.shape}, C {c.shape}")

    lhs = (a @ np.diag(b_vec) @ c).reshape(-1, order="F")
    rhs = khatri_rao_bruteforce(c.T, a) @ b_vec
    if lhs.size == 0:
        return 0.0
    return float(np.max(np.abs(lhs - rhs)))


def matrix_power_apply(m, x, p: int) -> np.ndarray:
    """Materialize M^p by repeated dense multiplication, then apply it"""
    m = np.asarray(m, dtype=float)
    x = np.asarray(x, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or x.shape != (m.shape[0],):
        raise DimensionError(f"Cannot apply {m.shape} to {x.shape}")
    if p < 0:
        raise DimensionError(f"Power must be nonnegative, got {p}")

    power = np.eye(m.shape[0])
    for _ in range(p):
        power = power @ m
    return power @ x


def aggregation_bruteforce(m, x, p_shifts: int) -> np.ndarray:
    return np.column_stack([matrix_power_apply(m, x, p) for p in range(p_shifts)])


def helmholtz_project_bruteforce(c: SimplicialComplex, x1):
    """Projectors B B^+ built from the incidence matrices with numpy's pinv"""
    x1 = np.asarray(x1, dtype=float)
    n1 = c.num_edges
    grad_op = c.b1.T
    curl_op = c.b2
    p_grad = grad_op @ np.linalg.pinv(grad_op, rcond=1e-10) if grad_op.size else np.zeros((n1, n1))
    p_curl = curl_op @ np.linalg.pinv(curl_op, rcond=1e-10) if curl_op.size else np.zeros((n1, n1))
    gradient = p_grad @ x1
    curl = p_curl @ x1
    return gradient, curl, x1 - gradient - curl


def components_union_find(num_nodes: int, edges) -> int:
    """Connected components by union-find with path halving"""
    parent = list(range(num_nodes))

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for i, j in edges:
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[ri] = rj
    return len({find(v) for v in range(num_nodes)})


def random_complex(num_nodes: int, edge_prob: float, triangle_prob: float, rng) -> SimplicialComplex:
    """Random clique-style complex: random edges, then a random subset of the 3-cliques filled"""
    rng = np.random.default_rng(rng)
    edges = [(i, j) for i in range(num_nodes) for j in range(i + 1, num_nodes) if rng.random() < edge_prob]
    edge_set = set(edges)
    triangles = [
        (i, j, k)
        for i in range(num_nodes) for j in range(i + 1, num_nodes) for k in range(j + 1, num_nodes)
        if (i, j) in edge_set and (j, k) in edge_set and (i, k) in edge_set and rng.random() < triangle_prob
    ]
    return build_complex(num_nodes, edges, triangles)
