"""
Spectra of the Hodge Laplacians.

Eigendecomposition with a deterministic sign convention, the null/range
split used to define bandlimited signals, and the lifted edge-space bases
U_low = B1^T Q0 and U_up = B2 Q2 (eigenvectors of L_low and L_up that keep
the eigenvalues of L0 and L2).
"""

from dataclasses import dataclass, replace
from typing import Optional, Tuple

import numpy as np
import scipy.linalg

import utils.sc_logging
import utils.settings
from simplicial.complex import HodgeLaplacians, SimplicialComplex, hodge_laplacians
from simplicial.errors import BandwidthError, DimensionError, SpectralError

ASYMMETRY_TOL = 1e-12
DISTINCT_GAP = 1e-8


@dataclass(frozen=True)
class EigenSystem:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def size(self) -> int:
        return len(self.eigenvalues)

    def take(self, columns) -> "EigenSystem":
        columns = np.asarray(columns, dtype=int)
        return EigenSystem(self.eigenvalues[columns], self.eigenvectors[:, columns])


@dataclass(frozen=True)
class SpectralBases:
    q0_tilde: np.ndarray
    q2_tilde: np.ndarray
    q1_perp: np.ndarray
    u_low_tilde: np.ndarray
    u_up_tilde: np.ndarray
    lambda_low: np.ndarray
    lambda_up: np.ndarray
    # full spectra the truncated bases were cut from
    eig0: Optional[EigenSystem] = None
    eig1: Optional[EigenSystem] = None
    eig2: Optional[EigenSystem] = None
    scale: float = 1.0

    @property
    def w0(self) -> int:
        return self.q0_tilde.shape[1]

    @property
    def w2(self) -> int:
        return self.q2_tilde.shape[1]

    @property
    def harmonic_dim(self) -> int:
        return self.q1_perp.shape[1]

    def dictionary(self, r1_dim: Optional[int] = None) -> np.ndarray:
        """Edge-space dictionary D = [U_low | U_up | Q1_perp[:, :r1_dim]]"""
        if r1_dim is None:
            r1_dim = self.harmonic_dim
        if r1_dim > self.harmonic_dim:
            raise BandwidthError(f"R1 = {r1_dim} exceeds dim N(L1) = {self.harmonic_dim}")
        return np.hstack([self.u_low_tilde, self.u_up_tilde, self.q1_perp[:, :r1_dim]])

    def truncated(self, w0: int, w2: int) -> "SpectralBases":
        """Keep the first w0 node and w2 triangle columns"""
        if not 0 <= w0 <= self.w0 or not 0 <= w2 <= self.w2:
            raise BandwidthError(f"Cannot truncate W0={self.w0}, W2={self.w2} bases to W0={w0}, W2={w2}")
        return replace(self,
                       q0_tilde=self.q0_tilde[:, :w0],
                       q2_tilde=self.q2_tilde[:, :w2],
                       u_low_tilde=self.u_low_tilde[:, :w0],
                       u_up_tilde=self.u_up_tilde[:, :w2],
                       lambda_low=self.lambda_low[:w0],
                       lambda_up=self.lambda_up[:w2])


def _sign_fix(vectors: np.ndarray) -> np.ndarray:
    # largest-magnitude entry of every column made positive
    if vectors.size == 0:
        return vectors
    pivots = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[pivots, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def eigendecompose_symmetric(m) -> EigenSystem:
    """Ascending eigenvalues and orthonormal eigenvectors of a symmetric matrix"""
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"Expected a square matrix, got shape {m.shape}")

    n = m.shape[0]
    if n == 0:
        return EigenSystem(np.zeros(0), np.zeros((0, 0)))

    scale = max(1.0, float(np.max(np.abs(m))))
    asymmetry = float(np.max(np.abs(m - m.T)))
    if asymmetry > ASYMMETRY_TOL * scale:
        raise SpectralError(f"Matrix is not symmetric (max asymmetry {asymmetry:.3e})")

    sym = 0.5 * (m + m.T)
    try:
        eigenvalues, eigenvectors = scipy.linalg.eigh(sym)
    except np.linalg.LinAlgError as e:
        utils.sc_logging.log_error(f"Symmetric eigendecomposition failed: {e}", "FATAL")
        raise SpectralError(f"Symmetric eigendecomposition failed: {e}") from e

    return EigenSystem(eigenvalues, _sign_fix(eigenvectors))


def zero_threshold(eigenvalues: np.ndarray, zero_tol: float) -> float:
    lam_max = float(np.max(eigenvalues)) if len(eigenvalues) else 0.0
    return zero_tol * max(lam_max, 1.0)


def split_spectrum(es: EigenSystem, zero_tol: Optional[float] = None) -> Tuple[EigenSystem, EigenSystem]:
    """Split into (null part, range part); lambda is null iff lambda <= zero_tol * max(lambda_max, 1)"""
    if zero_tol is None:
        zero_tol = utils.settings.zero_tol
    threshold = zero_threshold(es.eigenvalues, zero_tol)
    null_mask = es.eigenvalues <= threshold
    return es.take(np.flatnonzero(null_mask)), es.take(np.flatnonzero(~null_mask))


def distinct_columns(eigenvalues: np.ndarray, rel_gap: float = DISTINCT_GAP) -> np.ndarray:
    """Index of the first eigenvalue of every tie cluster (input ascending)"""
    if len(eigenvalues) == 0:
        return np.zeros(0, dtype=int)
    gap = rel_gap * max(float(np.max(np.abs(eigenvalues))), np.finfo(float).tiny)
    keep = [0]
    for idx in range(1, len(eigenvalues)):
        if eigenvalues[idx] - eigenvalues[keep[-1]] > gap:
            keep.append(idx)
    return np.asarray(keep, dtype=int)


def distinct_count(eigenvalues: np.ndarray, rel_gap: float = DISTINCT_GAP) -> int:
    return len(distinct_columns(np.sort(np.asarray(eigenvalues, dtype=float)), rel_gap))


def truncate_range(range_part: EigenSystem, width: Optional[int], distinct: bool = False, label: str = "L") -> EigenSystem:
    """First `width` columns of a range basis (smallest eigenvalues first); None keeps every candidate"""
    candidates = distinct_columns(range_part.eigenvalues) if distinct else np.arange(range_part.size)
    if width is None:
        width = len(candidates)
    if width < 0 or width > len(candidates):
        kind = "distinct nonzero" if distinct else "nonzero"
        raise BandwidthError(f"Bandwidth {width} exceeds the {len(candidates)} {kind} eigenvalues of {label}")
    return range_part.take(candidates[:width])


def lift_bases(c: SimplicialComplex, q0_tilde, q2_tilde, lambda0, lambda2,
               zero_tol: Optional[float] = None) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """U_low = B1^T Q0~, U_up = B2 Q2~ with the source eigenvalues; columns are not renormalized"""
    if zero_tol is None:
        zero_tol = utils.settings.zero_tol

    lambda0 = np.asarray(lambda0, dtype=float).ravel()
    lambda2 = np.asarray(lambda2, dtype=float).ravel()
    q0_tilde = np.asarray(q0_tilde, dtype=float)
    q2_tilde = np.asarray(q2_tilde, dtype=float)

    # explicit shapes: an empty block has no -1 to infer
    if q0_tilde.size != c.num_nodes * len(lambda0) or q2_tilde.size != c.num_triangles * len(lambda2):
        raise DimensionError("Each lifted column needs exactly one eigenvalue")
    q0_tilde = q0_tilde.reshape(c.num_nodes, len(lambda0))
    q2_tilde = q2_tilde.reshape(c.num_triangles, len(lambda2))

    for name, lam in (("L0", lambda0), ("L2", lambda2)):
        if len(lam) and np.any(lam <= zero_threshold(lam, zero_tol)):
            raise SpectralError(f"A supplied {name} eigenvector pairs with a zero eigenvalue; only range vectors lift")

    u_low = c.b1.T @ q0_tilde
    u_up = c.b2 @ q2_tilde
    return u_low, u_up, lambda0.copy(), lambda2.copy()


def build_spectral_bases(c: SimplicialComplex, laplacians: Optional[HodgeLaplacians] = None,
                         w0: Optional[int] = None, w2: Optional[int] = None,
                         zero_tol: Optional[float] = None, distinct: bool = False) -> SpectralBases:
    """Eigendecompose L0, L1, L2, truncate to (W0, W2) and lift to the edge space.

    w0/w2 = None takes the full range. With distinct=True only the first
    eigenvector of every tied eigenvalue is eligible, so the lifted
    eigenvalues stay pairwise distinct within each block.
    """
    if zero_tol is None:
        zero_tol = utils.settings.zero_tol
    if laplacians is None:
        laplacians = hodge_laplacians(c)

    eig0 = eigendecompose_symmetric(laplacians.l0)
    eig1 = eigendecompose_symmetric(laplacians.l1)
    eig2 = eigendecompose_symmetric(laplacians.l2)

    _, range0 = split_spectrum(eig0, zero_tol)
    null1, _ = split_spectrum(eig1, zero_tol)
    _, range2 = split_spectrum(eig2, zero_tol)

    part0 = truncate_range(range0, w0, distinct, "L0")
    part2 = truncate_range(range2, w2, distinct, "L2")

    u_low, u_up, lambda_low, lambda_up = lift_bases(
        c, part0.eigenvectors, part2.eigenvectors, part0.eigenvalues, part2.eigenvalues, zero_tol)

    utils.sc_logging.update_debug_log(
        f"Spectral bases built: W0={part0.size}, W2={part2.size}, dim N(L1)={null1.size}")

    return SpectralBases(
        q0_tilde=part0.eigenvectors,
        q2_tilde=part2.eigenvectors,
        q1_perp=null1.eigenvectors,
        u_low_tilde=u_low,
        u_up_tilde=u_up,
        lambda_low=lambda_low,
        lambda_up=lambda_up,
        eig0=eig0,
        eig1=eig1,
        eig2=eig2,
    )


def max_edge_eigenvalue(bases: SpectralBases) -> float:
    """lambda_max(L1), the spectral-scaling divisor"""
    if bases.eig1 is None or bases.eig1.size == 0:
        return 1.0
    return max(float(np.max(bases.eig1.eigenvalues)), np.finfo(float).tiny)


def scale_spectrum(bases: SpectralBases, factor: float) -> SpectralBases:
    """Bases paired with the operator factor * L1: eigenvalues multiplied by factor"""
    return replace(bases,
                   lambda_low=bases.lambda_low * factor,
                   lambda_up=bases.lambda_up * factor,
                   scale=bases.scale * factor)


def singular_values(m) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    if m.size == 0:
        return np.zeros(0)
    return scipy.linalg.svdvals(m)


def numerical_rank(m, cutoff: Optional[float] = None) -> int:
    """Number of singular values >= cutoff * sigma_max"""
    if cutoff is None:
        cutoff = utils.settings.svd_cutoff
    sigma = singular_values(m)
    if len(sigma) == 0 or sigma[0] == 0.0:
        return 0
    return int(np.count_nonzero(sigma >= cutoff * sigma[0]))
