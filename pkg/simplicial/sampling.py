"""
Aggregation sampling of edge flows.

The shift operator applies L1 repeatedly, y(p) = L1 y(p-1) with y(0) = x1,
and the observations keep the rows of Y1 = [y(0), ..., y(P-1)] indexed by
the sampling set S. Powers are never materialized.
"""

from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

import utils.sc_io
import utils.sc_logging
import utils.sc_lib
import utils.settings
from simplicial.errors import DimensionError, SamplingError
from simplicial.spectral import numerical_rank


@dataclass(frozen=True)
class SamplingPlan:
    num_shifts: int
    sample_set: Tuple[int, ...]
    seed: object = None
    retries: int = field(default=0, compare=False)

    def __post_init__(self):
        if self.num_shifts < 1:
            raise SamplingError(f"Need at least one shift, got P = {self.num_shifts}")
        if len(self.sample_set) < 1:
            raise SamplingError("Sampling set is empty")
        indices = np.asarray(self.sample_set)
        if np.any(indices < 0):
            raise SamplingError(f"Negative edge index in sampling set {self.sample_set}")
        if np.any(np.diff(indices) <= 0):
            raise SamplingError(f"Sampling set must be strictly increasing, got {self.sample_set}")

    @property
    def size(self) -> int:
        return len(self.sample_set)

    def to_dict(self) -> dict:
        return {
            "sample_set": list(self.sample_set),
            "P": self.num_shifts,
            "seed": utils.sc_lib.seed_label(self.seed),
            "retries": self.retries,
        }


@dataclass(frozen=True)
class Observations:
    z1_matrix: np.ndarray
    z1_vec: np.ndarray


def aggregate(l1, x1, p_shifts: int) -> np.ndarray:
    """Y1 (N1 x P) with column p equal to L1^p x1, computed iteratively"""
    l1 = np.asarray(l1, dtype=float)
    x1 = np.asarray(x1, dtype=float)
    if p_shifts < 1:
        raise SamplingError(f"Need at least one shift, got P = {p_shifts}")
    if l1.ndim != 2 or l1.shape[0] != l1.shape[1] or x1.shape != (l1.shape[0],):
        raise DimensionError(f"Cannot shift a flow of shape {x1.shape} with an operator of shape {l1.shape}")

    y1 = np.empty((l1.shape[0], p_shifts))
    y1[:, 0] = x1
    for p in range(1, p_shifts):
        y1[:, p] = l1 @ y1[:, p - 1]
    return y1


def _draw_guarded(n_edges: int, size: int, seed, guard: Optional[np.ndarray], max_retries: int) -> Tuple[Tuple[int, ...], int]:
    if not 1 <= size <= n_edges:
        raise SamplingError(f"Sampling set size must lie in [1, {n_edges}], got {size}")
    if guard is not None:
        guard = np.asarray(guard, dtype=float)
        if guard.ndim != 2 or guard.shape[0] != n_edges:
            raise DimensionError(f"Rank guard must have {n_edges} rows, got shape {guard.shape}")

    rng = utils.sc_lib.make_rng(seed)
    for attempt in range(max_retries + 1):
        chosen = tuple(int(i) for i in np.sort(rng.choice(n_edges, size=size, replace=False)))
        if guard is None:
            return chosen, attempt
        target = min(size, guard.shape[1])
        if numerical_rank(guard[list(chosen), :]) == target:
            return chosen, attempt

    utils.sc_logging.log_error(f"Rank guard failed after {max_retries} retries (n={n_edges}, size={size})", "SAMPLING")
    raise SamplingError(f"No sampling set of size {size} passed the rank guard within {max_retries} retries")


def choose_sampling_set(n_edges: int, size: int, seed=None, must_be_full_rank_against=None,
                        max_retries: Optional[int] = None) -> Tuple[int, ...]:
    """Uniform random subset of edge indices, redrawn until the guard rows reach full rank"""
    if max_retries is None:
        max_retries = utils.settings.max_retries
    chosen, _ = _draw_guarded(n_edges, size, seed, must_be_full_rank_against, max_retries)
    return chosen


def plan_sampling(n_edges: int, size: int, p_shifts: int, seed=None, must_be_full_rank_against=None,
                  max_retries: Optional[int] = None) -> SamplingPlan:
    """choose_sampling_set packaged as a plan, keeping the retry count"""
    if max_retries is None:
        max_retries = utils.settings.max_retries
    chosen, retries = _draw_guarded(n_edges, size, seed, must_be_full_rank_against, max_retries)
    if retries:
        utils.sc_logging.update_debug_log(f"Sampling set of size {size} needed {retries} redraws")
    return SamplingPlan(num_shifts=p_shifts, sample_set=chosen, seed=seed, retries=retries)


def observe(y1, plan: SamplingPlan) -> Observations:
    """Z1 = Phi Y1 by row selection; z1 is the column-major stacking of Z1"""
    y1 = np.asarray(y1, dtype=float)
    if y1.ndim != 2 or y1.shape[1] != plan.num_shifts:
        raise DimensionError(f"Plan has P = {plan.num_shifts} shifts but Y1 has shape {y1.shape}")
    if plan.sample_set[-1] >= y1.shape[0]:
        raise SamplingError(f"Edge index {plan.sample_set[-1]} out of range for {y1.shape[0]} edges")

    z1_matrix = y1[list(plan.sample_set), :]
    return Observations(z1_matrix=z1_matrix, z1_vec=z1_matrix.reshape(-1, order="F"))


def observations_from_vector(z1_vec, plan: SamplingPlan) -> Observations:
    """Inverse of the column-major stacking, for noisy or externally loaded z1"""
    z1_vec = np.asarray(z1_vec, dtype=float)
    if z1_vec.shape != (plan.size * plan.num_shifts,):
        raise DimensionError(f"z1 must have length {plan.size * plan.num_shifts}, got shape {z1_vec.shape}")
    return Observations(z1_matrix=z1_vec.reshape((plan.size, plan.num_shifts), order="F"), z1_vec=z1_vec.copy())


def export_observations(path: str, obs: Observations, plan: SamplingPlan):
    """Z1 as |S| x P CSV with a JSON sidecar holding the plan"""
    utils.sc_io.export_matrix_with_sidecar(path, obs.z1_matrix, plan.to_dict())
