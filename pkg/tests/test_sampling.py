import json

import numpy as np
import pytest

from simplicial.errors import DimensionError, SamplingError
from simplicial.complex import hodge_laplacians
from simplicial.oracle import aggregation_bruteforce, random_complex
from simplicial.sampling import (
    SamplingPlan, aggregate, choose_sampling_set, export_observations, observations_from_vector, observe,
    plan_sampling,
)
from simplicial.signals import synthesize_bandlimited
from simplicial.spectral import build_spectral_bases, numerical_rank


def test_aggregate_matches_powers(small_laplacians):
    x1 = np.random.default_rng(0).standard_normal(10)
    y1 = aggregate(small_laplacians.l1, x1, 6)
    assert y1.shape == (10, 6)
    assert np.array_equal(y1[:, 0], x1)
    assert np.allclose(y1, aggregation_bruteforce(small_laplacians.l1, x1, 6), rtol=1e-12, atol=1e-12)


def test_aggregate_single_shift(small_laplacians):
    x1 = np.arange(10.0)
    assert np.array_equal(aggregate(small_laplacians.l1, x1, 1), x1[:, None])


def test_aggregate_errors(small_laplacians):
    with pytest.raises(SamplingError):
        aggregate(small_laplacians.l1, np.zeros(10), 0)
    with pytest.raises(DimensionError):
        aggregate(small_laplacians.l1, np.zeros(9), 3)


def test_full_sampling_set():
    for seed in range(5):
        assert choose_sampling_set(10, 10, seed=seed) == tuple(range(10))


def test_sampling_set_is_seeded():
    first = choose_sampling_set(10, 2, seed=42)
    assert first == choose_sampling_set(10, 2, seed=42)
    assert len(first) == 2
    assert first[0] < first[1]


@pytest.mark.parametrize("size", [0, 11])
def test_sampling_set_size_errors(size):
    with pytest.raises(SamplingError):
        choose_sampling_set(10, size, seed=0)


def test_rank_guard(small_bases):
    guard = small_bases.q1_perp
    for seed in range(20):
        chosen = choose_sampling_set(10, 2, seed=seed, must_be_full_rank_against=guard)
        assert numerical_rank(guard[list(chosen), :]) == 2


def test_rank_guard_exhausted():
    guard = np.zeros((10, 1))
    with pytest.raises(SamplingError, match="rank guard"):
        choose_sampling_set(10, 3, seed=0, must_be_full_rank_against=guard, max_retries=5)


def test_rank_guard_shape():
    with pytest.raises(DimensionError):
        choose_sampling_set(10, 3, seed=0, must_be_full_rank_against=np.ones((9, 2)))


def test_plan_records_retries(small_bases):
    plan = plan_sampling(10, 2, 6, seed=1, must_be_full_rank_against=small_bases.q1_perp)
    assert plan.num_shifts == 6
    assert plan.size == 2
    assert plan.retries >= 0
    assert plan.to_dict()["P"] == 6


@pytest.mark.parametrize("kwargs", [
    {"num_shifts": 0, "sample_set": (0, 1)},
    {"num_shifts": 2, "sample_set": ()},
    {"num_shifts": 2, "sample_set": (3, 1)},
    {"num_shifts": 2, "sample_set": (1, 1)},
    {"num_shifts": 2, "sample_set": (-1, 2)},
])
def test_plan_validation(kwargs):
    with pytest.raises(SamplingError):
        SamplingPlan(**kwargs)


def test_observe_stacks_column_major():
    y1 = np.arange(30.0).reshape(10, 3)
    plan = SamplingPlan(num_shifts=3, sample_set=(2, 7))
    obs = observe(y1, plan)
    assert np.array_equal(obs.z1_matrix, y1[[2, 7], :])
    for p in range(3):
        for i, edge in enumerate(plan.sample_set):
            assert obs.z1_vec[p * plan.size + i] == y1[edge, p]

    again = observations_from_vector(obs.z1_vec, plan)
    assert np.array_equal(again.z1_matrix, obs.z1_matrix)


def test_observe_errors():
    plan = SamplingPlan(num_shifts=3, sample_set=(2, 12))
    with pytest.raises(SamplingError):
        observe(np.zeros((10, 3)), plan)
    with pytest.raises(DimensionError):
        observe(np.zeros((13, 2)), plan)
    with pytest.raises(DimensionError):
        observations_from_vector(np.zeros(5), plan)


def test_export_observations(tmp_path):
    y1 = np.linspace(0.0, 1.0, 20).reshape(10, 2)
    plan = SamplingPlan(num_shifts=2, sample_set=(0, 4, 9), seed=3)
    obs = observe(y1, plan)
    path = tmp_path / "obs.csv"
    export_observations(str(path), obs, plan)

    rows = [[float(v) for v in line.split(",")] for line in path.read_text().splitlines()]
    assert np.array_equal(np.array(rows), obs.z1_matrix)
    sidecar = json.loads((tmp_path / "obs.csv.json").read_text())
    assert sidecar == {"sample_set": [0, 4, 9], "P": 2, "seed": 3, "retries": 0}


@pytest.mark.parametrize("seed", range(30))
def test_shifts_act_on_each_order_separately(seed):
    ## L1^p x1 = L_low^p B1^T x0 + L_up^p B2 x2 + L1^p r1
    rng = np.random.default_rng(500 + seed)
    c = random_complex(int(rng.integers(5, 16)), edge_prob=0.5, triangle_prob=0.6, rng=rng)
    if c.num_edges == 0:
        pytest.skip("no edges drawn")
    laps = hodge_laplacians(c)
    bases = build_spectral_bases(c, laps)
    sig = synthesize_bandlimited(bases, bases.w0, bases.w2, bases.harmonic_dim, rng_seed=seed)

    y1 = aggregate(laps.l1, sig.x1, 6)
    gradient = aggregate(laps.l_low, c.b1.T @ sig.x0, 6)
    curl = aggregate(laps.l_up, c.b2 @ sig.x2, 6)
    harmonic = aggregate(laps.l1, sig.r1, 6)
    for p in range(6):
        scale = max(np.linalg.norm(y1[:, p]), 1.0)
        assert np.linalg.norm(y1[:, p] - gradient[:, p] - curl[:, p] - harmonic[:, p]) <= 1e-9 * scale


def test_harmonic_flow_vanishes_after_one_shift(small_laplacians, small_bases):
    r1 = small_bases.q1_perp @ np.array([0.7, -1.3])
    y1 = aggregate(small_laplacians.l1, r1, 6)
    assert np.array_equal(y1[:, 0], r1)
    assert np.allclose(y1[:, 1:], 0.0, atol=1e-9)


def test_observations_superpose(small_laplacians):
    rng = np.random.default_rng(4)
    x, y = rng.standard_normal(10), rng.standard_normal(10)
    alpha, beta = 1.5, -0.25
    plan = SamplingPlan(num_shifts=5, sample_set=(0, 3, 8))

    def sampled(flow):
        return observe(aggregate(small_laplacians.l1, flow, 5), plan).z1_vec

    combined = sampled(alpha * x + beta * y)
    assert np.allclose(combined, alpha * sampled(x) + beta * sampled(y), rtol=1e-12, atol=1e-10)
