import numpy as np
import pytest

from simplicial.errors import DimensionError
from simplicial.oracle import khatri_rao_bruteforce
from simplicial.recovery import (
    assemble_system, build_vandermonde, check_feasibility, rank_report, recover, relative_errors, result_to_dict,
)
from simplicial.sampling import aggregate, observations_from_vector, observe, plan_sampling
from simplicial.signals import synthesize_bandlimited

W0, W2, R1 = 4, 1, 2


def _feasible_setup(bases, seed, p_shifts, size=R1, attempts=20):
    """Rank-guarded plan, redrawn until the system has full column rank when that is possible"""
    v = build_vandermonde(bases.lambda_low, bases.lambda_up, R1, p_shifts)
    d = bases.dictionary(R1)
    for attempt in range(attempts):
        plan = plan_sampling(10, size, p_shifts, seed=[seed, attempt], must_be_full_rank_against=bases.q1_perp)
        system = assemble_system(v, d, plan.sample_set)
        if system.rank_report.full_column_rank:
            break
    return plan, system


def test_vandermonde_layout():
    v = build_vandermonde([2.0, 3.0], [5.0], 2, 4)
    assert v.shape == (5, 4)
    assert np.array_equal(v[0], [1.0, 2.0, 4.0, 8.0])
    assert np.array_equal(v[2], [1.0, 5.0, 25.0, 125.0])
    assert np.array_equal(v[3:], [[1.0, 0.0, 0.0, 0.0]] * 2)


def test_vandermonde_needs_a_shift():
    with pytest.raises(DimensionError):
        build_vandermonde([1.0], [], 0, 0)


def test_system_entries(small_bases):
    v = build_vandermonde(small_bases.lambda_low, small_bases.lambda_up, R1, 6)
    d = small_bases.dictionary(R1)
    sample_set = (1, 6, 8)
    system = assemble_system(v, d, sample_set)
    assert system.system.shape == (18, 7)
    for p in range(6):
        for i, edge in enumerate(sample_set):
            for j in range(7):
                assert system.system[p * 3 + i, j] == pytest.approx(v[j, p] * d[edge, j], rel=1e-14, abs=1e-14)
    assert np.allclose(system.system, khatri_rao_bruteforce(v.T, d[list(sample_set), :]), rtol=1e-12, atol=0)


def test_system_shape_errors(small_bases):
    v = build_vandermonde(small_bases.lambda_low, small_bases.lambda_up, R1, 6)
    with pytest.raises(DimensionError):
        assemble_system(v, small_bases.dictionary(1), (0, 1))
    with pytest.raises(DimensionError):
        assemble_system(v, small_bases.dictionary(R1), (0, 10))


@pytest.mark.parametrize("seed", range(50))
def test_forward_model_two_routes(small_laplacians, small_bases, seed):
    ## vec(Phi Y1) from the sampling path equals A x_hat from the spectral path
    sig = synthesize_bandlimited(small_bases, W0, W2, R1, rng_seed=seed)
    plan = plan_sampling(10, 3, 6, seed=seed)
    v = build_vandermonde(small_bases.lambda_low, small_bases.lambda_up, R1, 6)
    system = assemble_system(v, small_bases.dictionary(R1), plan.sample_set)

    z1 = observe(aggregate(small_laplacians.l1, sig.x1, 6), plan).z1_vec
    predicted = system.system @ sig.coefficients
    assert np.linalg.norm(z1 - predicted) <= 1e-8 * np.linalg.norm(z1)


@pytest.mark.parametrize("seed", range(20))
def test_perfect_recovery_small(small_laplacians, small_bases, seed):
    p_shifts = W0 + W2 + 1
    plan, system = _feasible_setup(small_bases, seed, p_shifts)
    assert system.rank_report.full_column_rank

    feasibility = check_feasibility(W0, W2, R1, small_bases.lambda_low, small_bases.lambda_up, p_shifts,
                                    plan.sample_set, system.dictionary)
    assert feasibility.overall, feasibility.reasons()

    sig = synthesize_bandlimited(small_bases, W0, W2, R1, rng_seed=100 + seed)
    obs = observe(aggregate(small_laplacians.l1, sig.x1, p_shifts), plan)
    result = recover(system, obs, small_bases)

    for name, error in relative_errors(result, sig).items():
        assert error <= 1e-6, f"{name} not recovered: {error:.3e}"
    assert result.residual_norm <= 1e-8 * np.linalg.norm(obs.z1_vec)
    assert np.allclose(result.coefficients, sig.coefficients, atol=1e-8)


@pytest.mark.parametrize("seed", range(20))
def test_one_shift_short_is_reported(small_bases, seed):
    p_shifts = W0 + W2
    plan, system = _feasible_setup(small_bases, seed, p_shifts, attempts=1)
    feasibility = check_feasibility(W0, W2, R1, small_bases.lambda_low, small_bases.lambda_up, p_shifts,
                                    plan.sample_set, system.dictionary)
    assert not feasibility.p_sufficient
    assert not feasibility.overall
    assert any("W0 + W2 + 1" in reason for reason in feasibility.reasons())


@pytest.mark.parametrize("seed", range(20))
def test_too_few_rows_is_rank_deficient(small_bases, seed):
    ## P |S| = 6 < W1 = 7
    plan, system = _feasible_setup(small_bases, seed, 3, attempts=1)
    assert system.rank_report.rank < 7
    assert not system.rank_report.full_column_rank


def test_feasibility_flags():
    d = np.eye(5)
    report = check_feasibility(2, 1, 2, [1.0, 1.0], [2.0], 4, (0, 1), d)
    assert not report.eigenvalues_distinct
    assert report.p_sufficient and report.s_sufficient
    assert report.phi_rows_full_rank
    ## Phi D has full row rank, yet the sampled harmonic rows of D are zero
    assert report.harmonic_rank == 0
    assert not report.harmonic_rows_full_rank
    assert any("Phi Q1_perp" in reason for reason in report.reasons())

    report = check_feasibility(2, 1, 2, [1.0, 2.0], [3.0], 4, (3,), d)
    assert report.eigenvalues_distinct
    assert not report.s_sufficient
    assert report.to_dict()["overall"] is False


def test_rank_report_values():
    report = rank_report(np.diag([4.0, 2.0, 1.0]))
    assert report.rank == 3 and report.full_column_rank
    assert report.sigma_max == pytest.approx(4.0)
    assert report.sigma_min == pytest.approx(1.0)
    assert report.condition == pytest.approx(4.0)

    wide = rank_report(np.ones((2, 3)))
    assert wide.rank == 1
    assert wide.sigma_min == 0.0
    assert wide.condition == float("inf")


def test_recover_checks_lengths(small_bases):
    plan, system = _feasible_setup(small_bases, 0, 6)
    obs = observe(np.zeros((10, 6)), plan)
    bad = type(obs)(z1_matrix=obs.z1_matrix, z1_vec=obs.z1_vec[:-1])
    with pytest.raises(DimensionError):
        recover(system, bad, small_bases)


def test_result_to_dict(small_laplacians, small_bases):
    plan, system = _feasible_setup(small_bases, 1, 6)
    sig = synthesize_bandlimited(small_bases, W0, W2, R1, rng_seed=1)
    result = recover(system, observe(aggregate(small_laplacians.l1, sig.x1, 6), plan), small_bases)
    data = result_to_dict(result, sig)
    assert set(data) == {"x_hat0", "x_hat2", "r_hat1", "residual_norm", "rank_report", "relative_errors"}
    assert len(data["x_hat0"]) == W0
    assert data["rank_report"]["columns"] == 7
    assert "relative_errors" not in result_to_dict(result)


def test_harmonic_rows_rank():
    ## harmonic block is the last R1 columns of D
    d = np.hstack([np.ones((4, 1)), np.array([[1.0, 0.0], [2.0, 0.0], [0.0, 1.0], [0.0, 0.0]])])
    good = check_feasibility(1, 0, 2, [1.0], [], 2, (0, 2), d)
    assert good.harmonic_rank == 2 and good.harmonic_rows_full_rank
    assert good.overall

    bad = check_feasibility(1, 0, 2, [1.0], [], 2, (0, 1), d)
    ## both sampled rows are independent, but they agree on the harmonic block up to scale
    assert bad.phi_rank == 2 and bad.phi_rows_full_rank
    assert bad.harmonic_rank == 1
    assert not bad.overall
    assert bad.to_dict()["harmonic_rows_full_rank"] is False


def test_recover_is_linear(small_bases):
    plan, system = _feasible_setup(small_bases, 3, 6)
    rng = np.random.default_rng(12)
    z, z_other = rng.standard_normal(12), rng.standard_normal(12)
    alpha, beta = 2.0, -0.5

    def solve(vec):
        return recover(system, observations_from_vector(vec, plan), small_bases)

    combined, first, second = solve(alpha * z + beta * z_other), solve(z), solve(z_other)
    assert np.allclose(combined.coefficients, alpha * first.coefficients + beta * second.coefficients, atol=1e-9)
    assert np.allclose(combined.x0_ls, alpha * first.x0_ls + beta * second.x0_ls, atol=1e-9)
    assert np.allclose(combined.r1_ls, alpha * first.r1_ls + beta * second.r1_ls, atol=1e-9)


def test_zero_observations_recover_zero(small_bases):
    plan, system = _feasible_setup(small_bases, 4, 6)
    result = recover(system, observations_from_vector(np.zeros(12), plan), small_bases)
    assert np.array_equal(result.coefficients, np.zeros(7))
    assert np.array_equal(result.x0_ls, np.zeros(7))
    assert np.array_equal(result.x2_ls, np.zeros(2))
    assert np.array_equal(result.r1_ls, np.zeros(10))
    assert result.residual_norm == 0.0
