"""
Multi-order bandlimited simplicial signals.
Synthesis in the truncated spectral bases, the Helmholtz composition
x1 = B1^T x0 + B2 x2 + r1, its orthogonal-projection inverse, and noise.
"""

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
import scipy.linalg

import utils.sc_io
import utils.sc_logging
import utils.sc_lib
import utils.settings
from simplicial.complex import HodgeLaplacians, SimplicialComplex, hodge_laplacians
from simplicial.errors import BandwidthError, DimensionError, SimplicialError
from simplicial.spectral import SpectralBases

HARMONIC_TOL = 1e-8


@dataclass(frozen=True)
class MultiOrderSignal:
    x0: np.ndarray
    x2: np.ndarray
    r1: np.ndarray
    x_hat0: np.ndarray
    x_hat2: np.ndarray
    r_hat1: np.ndarray
    x1: np.ndarray

    @property
    def coefficients(self) -> np.ndarray:
        """Stacked spectral vector (x_hat0 | x_hat2 | r_hat1)"""
        return np.concatenate([self.x_hat0, self.x_hat2, self.r_hat1])

    @property
    def bandwidths(self) -> Tuple[int, int, int]:
        return len(self.x_hat0), len(self.x_hat2), len(self.r_hat1)


def synthesize_bandlimited(bases: SpectralBases, w0: int, w2: int, r1_dim: int, rng_seed=None) -> MultiOrderSignal:
    """Random W0/W2/R1-bandlimited signals with i.i.d. standard normal coefficients.

    Coefficients are drawn in the order x_hat0, x_hat2, r_hat1 from one
    generator. The residual uses the first r1_dim null-space vectors.
    """
    for name, width, available in (("W0", w0, bases.w0), ("W2", w2, bases.w2), ("R1", r1_dim, bases.harmonic_dim)):
        if width < 0 or width > available:
            raise BandwidthError(f"{name} = {width} exceeds the available basis dimension {available}")

    rng = utils.sc_lib.make_rng(rng_seed)
    x_hat0 = rng.standard_normal(w0)
    x_hat2 = rng.standard_normal(w2)
    r_hat1 = rng.standard_normal(r1_dim)

    x0 = bases.q0_tilde[:, :w0] @ x_hat0
    x2 = bases.q2_tilde[:, :w2] @ x_hat2
    r1 = bases.q1_perp[:, :r1_dim] @ r_hat1

    # B1^T Q0~ = U_low~ and B2 Q2~ = U_up~, so x1 needs no incidence matrices here
    x1 = bases.u_low_tilde[:, :w0] @ x_hat0 + bases.u_up_tilde[:, :w2] @ x_hat2 + r1

    return MultiOrderSignal(x0=x0, x2=x2, r1=r1, x_hat0=x_hat0, x_hat2=x_hat2, r_hat1=r_hat1, x1=x1)


def _check_length(name: str, vector: np.ndarray, expected: int):
    if vector.ndim != 1 or vector.shape[0] != expected:
        raise DimensionError(f"{name} must be a vector of length {expected}, got shape {vector.shape}")


def helmholtz_compose(c: SimplicialComplex, x0, x2, r1, check_harmonic: bool = True) -> np.ndarray:
    """x1 = B1^T x0 + B2 x2 + r1"""
    x0 = np.asarray(x0, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    r1 = np.asarray(r1, dtype=float)
    _check_length("x0", x0, c.num_nodes)
    _check_length("x2", x2, c.num_triangles)
    _check_length("r1", r1, c.num_edges)

    if check_harmonic and c.num_edges:
        l1_r1 = c.b1.T @ (c.b1 @ r1) + c.b2 @ (c.b2.T @ r1)
        # ||B1||^2 + ||B2||^2 bounds lambda_max(L1)
        lam_bound = np.linalg.norm(c.b1, 2) ** 2 if c.b1.size else 0.0
        lam_bound += np.linalg.norm(c.b2, 2) ** 2 if c.b2.size else 0.0
        if np.linalg.norm(l1_r1) > HARMONIC_TOL * max(lam_bound, 1.0) * np.linalg.norm(r1):
            utils.sc_logging.update_debug_log(
                f"WARNING: residual is not harmonic, ||L1 r1|| = {np.linalg.norm(l1_r1):.3e}")

    return c.b1.T @ x0 + c.b2 @ x2 + r1


def helmholtz_project(c: SimplicialComplex, laplacians: Optional[HodgeLaplacians], x1) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Orthogonal split of an edge flow into (gradient, curl, harmonic) parts.

    R(L_low) = R(B1^T) and R(L_up) = R(B2), so the projectors are
    L_low L_low^+ and L_up L_up^+.
    """
    x1 = np.asarray(x1, dtype=float)
    _check_length("x1", x1, c.num_edges)
    if laplacians is None:
        laplacians = hodge_laplacians(c)

    if c.num_edges == 0:
        return x1.copy(), x1.copy(), x1.copy()

    gradient = laplacians.l_low @ (scipy.linalg.pinvh(laplacians.l_low, rtol=utils.settings.zero_tol) @ x1)
    curl = laplacians.l_up @ (scipy.linalg.pinvh(laplacians.l_up, rtol=utils.settings.zero_tol) @ x1)
    harmonic = x1 - gradient - curl
    return gradient, curl, harmonic


def add_noise(x, variance: float, rng_seed=None) -> np.ndarray:
    """x + n with n i.i.d. N(0, variance); variance 0 returns x unchanged"""
    x = np.asarray(x, dtype=float)
    if variance < 0:
        raise SimplicialError(f"Noise variance must be nonnegative, got {variance}")
    if variance == 0:
        return x.copy()
    rng = utils.sc_lib.make_rng(rng_seed)
    return x + rng.normal(0.0, np.sqrt(variance), size=x.shape)


def squared_error(truth, estimate) -> float:
    """||x - x_ls||_2^2"""
    diff = np.asarray(truth, dtype=float) - np.asarray(estimate, dtype=float)
    return float(diff @ diff)


def relative_error(truth, estimate) -> float:
    """||x - x_ls|| / ||x||, or the absolute error when x = 0"""
    truth = np.asarray(truth, dtype=float)
    error = float(np.linalg.norm(truth - np.asarray(estimate, dtype=float)))
    norm = float(np.linalg.norm(truth))
    return error / norm if norm > 0 else error


def export_signal(path: str, x, sidecar: dict):
    """CSV with one value per line plus a JSON sidecar (complex hash, bandwidths, seed)"""
    utils.sc_io.export_signal(path, np.asarray(x, dtype=float).ravel(), sidecar)
