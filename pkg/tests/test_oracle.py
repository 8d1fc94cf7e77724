## Main-path routines against their brute-force references on seeded random instances
import numpy as np
import pytest
import scipy.linalg

from simplicial.complex import connected_components, hodge_laplacians
from simplicial.errors import DimensionError
from simplicial.oracle import (
    aggregation_bruteforce, components_union_find, helmholtz_project_bruteforce, khatri_rao_bruteforce,
    matrix_power_apply, random_complex, vec_identity_check,
)
from simplicial.recovery import assemble_system
from simplicial.sampling import aggregate
from simplicial.signals import helmholtz_project

SEEDS = range(100)


def _relative(a, b) -> float:
    scale = max(np.max(np.abs(b)) if b.size else 0.0, 1.0)
    return float(np.max(np.abs(a - b)) / scale) if a.size else 0.0


def _complex(seed):
    rng = np.random.default_rng(seed)
    return random_complex(int(rng.integers(4, 21)), edge_prob=0.4, triangle_prob=0.6, rng=rng), rng


@pytest.mark.parametrize("seed", SEEDS)
def test_khatri_rao(seed):
    rng = np.random.default_rng(seed)
    k = int(rng.integers(1, 8))
    a = rng.standard_normal((int(rng.integers(1, 6)), k))
    b = rng.standard_normal((int(rng.integers(1, 6)), k))
    expected = khatri_rao_bruteforce(a, b)
    assert _relative(scipy.linalg.khatri_rao(a, b), expected) <= 1e-10

    ## assembly with the full row set is the same product
    v = a.T
    system = assemble_system(v, b, tuple(range(b.shape[0]))).system
    assert _relative(system, expected) <= 1e-10


@pytest.mark.parametrize("seed", SEEDS)
def test_vec_identity(seed):
    rng = np.random.default_rng(seed)
    k = int(rng.integers(1, 6))
    a = rng.standard_normal((int(rng.integers(1, 6)), k))
    b = rng.standard_normal(k)
    c = rng.standard_normal((k, int(rng.integers(1, 6))))
    assert vec_identity_check(a, b, c) <= 1e-12


def test_vec_identity_shapes():
    with pytest.raises(DimensionError):
        vec_identity_check(np.ones((2, 3)), np.ones(2), np.ones((3, 2)))
    with pytest.raises(DimensionError):
        khatri_rao_bruteforce(np.ones((2, 3)), np.ones((2, 2)))


@pytest.mark.parametrize("seed", SEEDS)
def test_aggregation_powers(seed):
    c, rng = _complex(seed)
    if c.num_edges == 0:
        pytest.skip("no edges drawn")
    l1 = hodge_laplacians(c).l1
    x1 = rng.standard_normal(c.num_edges)
    p_shifts = int(rng.integers(1, 6))
    fast = aggregate(l1, x1, p_shifts)
    slow = aggregation_bruteforce(l1, x1, p_shifts)
    for p in range(p_shifts):
        assert _relative(fast[:, p], slow[:, p]) <= 1e-10


def test_matrix_power_apply():
    m = np.array([[0.0, 1.0], [1.0, 0.0]])
    assert np.array_equal(matrix_power_apply(m, np.array([1.0, 2.0]), 3), [2.0, 1.0])
    with pytest.raises(DimensionError):
        matrix_power_apply(m, np.ones(2), -1)


@pytest.mark.parametrize("seed", SEEDS)
def test_helmholtz_projection(seed):
    c, rng = _complex(seed)
    if c.num_edges == 0:
        pytest.skip("no edges drawn")
    x1 = rng.standard_normal(c.num_edges)
    fast = helmholtz_project(c, hodge_laplacians(c), x1)
    slow = helmholtz_project_bruteforce(c, x1)
    scale = np.linalg.norm(x1)
    for mine, reference in zip(fast, slow):
        assert np.linalg.norm(mine - reference) <= 1e-10 * scale


@pytest.mark.parametrize("seed", SEEDS)
def test_components(seed):
    c, _ = _complex(seed)
    assert connected_components(c) == components_union_find(c.num_nodes, c.edges)
