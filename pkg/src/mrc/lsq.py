"""Complex least squares with a hard spectral cutoff.

Minimizes ``||b + A c||`` where the norm is the node-averaged one,
``||v||^2 = (1/M) sum |v_m|^2``.
"""
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NumericalError


@dataclass(frozen=True)
class LsqSolution:
    coeffs: np.ndarray
    r_min: float
    kept_rank: int
    singular_values: np.ndarray


def normalized_norm(v):
    """sqrt(mean(|v|^2)); the all-ones vector has norm 1."""
    v = np.asarray(v)
    if v.size == 0:
        raise DomainError("normalized norm of an empty vector")
    return float(np.sqrt(np.vdot(v, v).real / v.size))


def solve_cutoff(A, b, w_min):
    """Truncated-SVD minimizer of ``||b + A c||``.

    Singular directions with ``w_n < w_min`` are discarded. The residual is
    reported for the coefficients actually returned, i.e.
    ``r_min == normalized_norm(b + A @ coeffs)``.
    """
    b = np.asarray(b, dtype=complex)
    A = np.asarray(A, dtype=complex)
    if w_min <= 0:
        raise DomainError("w_min must be positive")
    if A.ndim != 2 or A.shape[0] != b.shape[0]:
        raise DomainError(f"incompatible shapes {A.shape} and {b.shape}")
    n_cols = A.shape[1]
    if n_cols == 0:
        return LsqSolution(np.zeros(0, dtype=complex), normalized_norm(b), 0, np.zeros(0))
    try:
        u, w, vh = np.linalg.svd(A, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(str(exc)) from exc
    keep = w >= w_min
    rank = int(keep.sum())
    if rank == 0:
        return LsqSolution(np.zeros(n_cols, dtype=complex), normalized_norm(b), 0, w)
    proj = u[:, keep].conj().T @ b
    coeffs = -(vh[keep].conj().T @ (proj / w[keep]))
    r_min = normalized_norm(b + A @ coeffs)
    return LsqSolution(coeffs, r_min, rank, w)


def projected_residual(A, b, w_min):
    """Residual from the projection formula, without forming coefficients.

    ``(1/sqrt(M)) sqrt(||b||^2 - sum_{n in P} |<u_n, b>|^2)`` evaluated as the
    norm of the orthogonal complement so it stays accurate for tiny residuals.
    """
    b = np.asarray(b, dtype=complex)
    u, w, _ = np.linalg.svd(np.asarray(A, dtype=complex), full_matrices=False)
    uk = u[:, w >= w_min]
    return normalized_norm(b - uk @ (uk.conj().T @ b))
