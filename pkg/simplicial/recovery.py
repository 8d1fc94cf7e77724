"""
Least-squares recovery of multi-order simplicial signals from aggregated,
subsampled edge flows.

The observations satisfy z1 = (V^T kr Phi D) x_hat, with V the Vandermonde
matrix of the lifted eigenvalues (plus indicator rows for the harmonic
block), D = [U_low | U_up | Q1_perp] and kr the Khatri-Rao product.
"""

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
import scipy.linalg

import utils.sc_logging
import utils.settings
from simplicial.errors import DimensionError
from simplicial.sampling import Observations
from simplicial.signals import MultiOrderSignal, relative_error
from simplicial.spectral import DISTINCT_GAP, SpectralBases, numerical_rank, singular_values


@dataclass(frozen=True)
class RankReport:
    rank: int
    columns: int
    sigma_max: float
    sigma_min: float
    condition: float

    @property
    def full_column_rank(self) -> bool:
        return self.rank == self.columns

    def to_dict(self) -> dict:
        return {
            "rank": self.rank,
            "columns": self.columns,
            "full_column_rank": self.full_column_rank,
            "sigma_max": self.sigma_max,
            "sigma_min": self.sigma_min,
            "condition": self.condition,
        }


@dataclass(frozen=True)
class RecoverySystem:
    vandermonde: np.ndarray
    dictionary: np.ndarray
    system: np.ndarray
    sample_set: tuple
    rank_report: RankReport


@dataclass(frozen=True)
class RecoveryResult:
    x_hat0: np.ndarray
    x_hat2: np.ndarray
    r_hat1: np.ndarray
    x0_ls: np.ndarray
    x2_ls: np.ndarray
    r1_ls: np.ndarray
    residual_norm: float
    rank_report: RankReport

    @property
    def coefficients(self) -> np.ndarray:
        return np.concatenate([self.x_hat0, self.x_hat2, self.r_hat1])


@dataclass(frozen=True)
class FeasibilityReport:
    p_required: int
    s_required: int
    p_shifts: int
    sample_size: int
    p_sufficient: bool
    s_sufficient: bool
    eigenvalues_distinct: bool
    min_eigenvalue_gap: float
    phi_rank: int
    phi_rows_full_rank: bool
    harmonic_rank: int
    harmonic_rows_full_rank: bool

    @property
    def overall(self) -> bool:
        return (self.p_sufficient and self.s_sufficient and self.eigenvalues_distinct and self.phi_rows_full_rank
                and self.harmonic_rows_full_rank)

    def reasons(self) -> list:
        failed = []
        if not self.p_sufficient:
            failed.append(f"P = {self.p_shifts} < W0 + W2 + 1 = {self.p_required}")
        if not self.s_sufficient:
            failed.append(f"|S| = {self.sample_size} < R1 = {self.s_required}")
        if not self.eigenvalues_distinct:
            failed.append(f"lifted eigenvalues not distinct (min gap {self.min_eigenvalue_gap:.3e})")
        if not self.phi_rows_full_rank:
            failed.append(f"rank(Phi D) = {self.phi_rank} < R1 = {self.s_required}")
        if not self.harmonic_rows_full_rank:
            failed.append(f"rank(Phi Q1_perp) = {self.harmonic_rank} < R1 = {self.s_required}")
        return failed

    def to_dict(self) -> dict:
        return {
            "p_required": self.p_required,
            "s_required": self.s_required,
            "p_shifts": self.p_shifts,
            "sample_size": self.sample_size,
            "p_sufficient": self.p_sufficient,
            "s_sufficient": self.s_sufficient,
            "eigenvalues_distinct": self.eigenvalues_distinct,
            "min_eigenvalue_gap": self.min_eigenvalue_gap,
            "phi_rank": self.phi_rank,
            "phi_rows_full_rank": self.phi_rows_full_rank,
            "harmonic_rank": self.harmonic_rank,
            "harmonic_rows_full_rank": self.harmonic_rows_full_rank,
            "overall": self.overall,
            "reasons": self.reasons(),
        }


def build_vandermonde(lambda_low, lambda_up, r1_dim: int, p_shifts: int) -> np.ndarray:
    """W1 x P matrix: power rows (1, l, ..., l^(P-1)) for lambda_low then lambda_up, then R1 rows e1^T"""
    if p_shifts < 1:
        raise DimensionError(f"Need at least one shift, got P = {p_shifts}")
    lam = np.concatenate([np.asarray(lambda_low, dtype=float).ravel(), np.asarray(lambda_up, dtype=float).ravel()])
    power_rows = np.vander(lam, p_shifts, increasing=True) if len(lam) else np.zeros((0, p_shifts))
    indicator_rows = np.zeros((r1_dim, p_shifts))
    indicator_rows[:, 0] = 1.0
    return np.vstack([power_rows, indicator_rows])


def rank_report(matrix: np.ndarray, cutoff: Optional[float] = None) -> RankReport:
    if cutoff is None:
        cutoff = utils.settings.svd_cutoff
    sigma = singular_values(matrix)
    columns = matrix.shape[1]
    if len(sigma) == 0:
        return RankReport(rank=0, columns=columns, sigma_max=0.0, sigma_min=0.0, condition=float("inf"))
    # fewer rows than columns leaves trailing singular values at zero
    sigma_min = float(sigma[-1]) if len(sigma) == columns else 0.0
    condition = float(sigma[0] / sigma_min) if sigma_min > 0 else float("inf")
    return RankReport(rank=numerical_rank(matrix, cutoff), columns=columns,
                      sigma_max=float(sigma[0]), sigma_min=sigma_min, condition=condition)


def assemble_system(v, d, sample_set: Sequence[int], cutoff: Optional[float] = None) -> RecoverySystem:
    """A = V^T kr (Phi D); entry (p*|S| + i, j) is V[j, p] * D[S[i], j]"""
    v = np.asarray(v, dtype=float)
    d = np.asarray(d, dtype=float)
    sample_set = tuple(int(i) for i in sample_set)
    if v.ndim != 2 or d.ndim != 2 or v.shape[0] != d.shape[1]:
        raise DimensionError(f"V is {v.shape} but D is {d.shape}; need V: W1 x P and D: N1 x W1")
    if not sample_set or min(sample_set) < 0 or max(sample_set) >= d.shape[0]:
        raise DimensionError(f"Sampling set {sample_set} does not index the {d.shape[0]} rows of D")

    phi_d = d[list(sample_set), :]
    if v.shape[0] == 0:
        system = np.zeros((v.shape[1] * len(sample_set), 0))
    else:
        system = scipy.linalg.khatri_rao(v.T, phi_d)

    report = rank_report(system, cutoff)
    if not report.full_column_rank:
        utils.sc_logging.update_debug_log(
            f"Recovery system is rank deficient: rank {report.rank} < W1 = {report.columns}")

    return RecoverySystem(vandermonde=v, dictionary=d, system=system, sample_set=sample_set, rank_report=report)


def _pinv_solve(a: np.ndarray, z: np.ndarray, cutoff: float) -> np.ndarray:
    # minimum-norm least squares through a truncated SVD
    if a.size == 0:
        return np.zeros(a.shape[1])
    u, sigma, vt = scipy.linalg.svd(a, full_matrices=False)
    keep = sigma >= cutoff * sigma[0] if sigma[0] > 0 else np.zeros_like(sigma, dtype=bool)
    return vt[keep].T @ ((u[:, keep].T @ z) / sigma[keep])


def recover(sys: RecoverySystem, obs: Observations, bases: SpectralBases,
            cutoff: Optional[float] = None) -> RecoveryResult:
    """x_hat = A^+ z1, split into (x_hat0 | x_hat2 | r_hat1) and mapped back through the bases"""
    if cutoff is None:
        cutoff = utils.settings.svd_cutoff
    z1 = np.asarray(obs.z1_vec, dtype=float)
    if z1.shape != (sys.system.shape[0],):
        raise DimensionError(f"z1 has shape {z1.shape}, the system expects {sys.system.shape[0]} rows")

    w0, w2 = bases.w0, bases.w2
    r1_dim = sys.system.shape[1] - w0 - w2
    if r1_dim < 0 or r1_dim > bases.harmonic_dim:
        raise DimensionError(f"System has {sys.system.shape[1]} columns, bases give W0={w0}, W2={w2}")

    x_hat = _pinv_solve(sys.system, z1, cutoff)
    x_hat0, x_hat2, r_hat1 = x_hat[:w0], x_hat[w0:w0 + w2], x_hat[w0 + w2:]

    return RecoveryResult(
        x_hat0=x_hat0,
        x_hat2=x_hat2,
        r_hat1=r_hat1,
        x0_ls=bases.q0_tilde @ x_hat0,
        x2_ls=bases.q2_tilde @ x_hat2,
        r1_ls=bases.q1_perp[:, :r1_dim] @ r_hat1,
        residual_norm=float(np.linalg.norm(sys.system @ x_hat - z1)),
        rank_report=sys.rank_report,
    )


def check_feasibility(w0: int, w2: int, r1_dim: int, lambda_low, lambda_up, p_shifts: int,
                      sample_set: Sequence[int], d, rel_gap: float = DISTINCT_GAP) -> FeasibilityReport:
    """Perfect-recovery conditions: P >= W0+W2+1, |S| >= R1, distinct lifted eigenvalues, rank(Phi D) >= R1.

    rank(Phi D) >= R1 holds for almost any S once |S| >= R1, so the report
    also carries rank(Phi Q1_perp[:, :R1]), which must equal R1 for the
    sampled rows to pin down the harmonic part.

    The Kruskal-rank condition is not computed; these are its checkable
    sufficient pieces.
    """
    lam = np.sort(np.concatenate([np.asarray(lambda_low, dtype=float).ravel()[:w0],
                                  np.asarray(lambda_up, dtype=float).ravel()[:w2]]))
    if len(lam) >= 2:
        min_gap = float(np.min(np.diff(lam)))
        distinct = bool(min_gap > rel_gap * float(np.max(np.abs(lam))))
    else:
        min_gap = float("inf")
        distinct = True

    phi_d = np.asarray(d, dtype=float)[list(sample_set), :]
    phi_rank = numerical_rank(phi_d)
    # the harmonic block of D is Q1_perp[:, :R1]
    harmonic_rank = numerical_rank(phi_d[:, w0 + w2:w0 + w2 + r1_dim])
    sample_size = len(sample_set)

    return FeasibilityReport(
        p_required=w0 + w2 + 1,
        s_required=r1_dim,
        p_shifts=p_shifts,
        sample_size=sample_size,
        p_sufficient=p_shifts >= w0 + w2 + 1,
        s_sufficient=sample_size >= r1_dim,
        eigenvalues_distinct=distinct,
        min_eigenvalue_gap=min_gap,
        phi_rank=phi_rank,
        phi_rows_full_rank=phi_rank >= r1_dim,
        harmonic_rank=harmonic_rank,
        harmonic_rows_full_rank=harmonic_rank == r1_dim,
    )


def relative_errors(result: RecoveryResult, truth: MultiOrderSignal) -> dict:
    return {
        "x0": relative_error(truth.x0, result.x0_ls),
        "x2": relative_error(truth.x2, result.x2_ls),
        "r1": relative_error(truth.r1, result.r1_ls),
    }


def result_to_dict(result: RecoveryResult, truth: Optional[MultiOrderSignal] = None) -> dict:
    data = {
        "x_hat0": result.x_hat0.tolist(),
        "x_hat2": result.x_hat2.tolist(),
        "r_hat1": result.r_hat1.tolist(),
        "residual_norm": result.residual_norm,
        "rank_report": result.rank_report.to_dict(),
    }
    if truth is not None:
        data["relative_errors"] = relative_errors(result, truth)
    return data
