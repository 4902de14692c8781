"""Dense-matrix primitives: normalization chain, percentile clipping, SVD
surgery, similarity matrices, and orthogonal Procrustes.

Everything here is a pure function of float64 arrays; inputs are never
mutated.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from .errors import NumericError, ValidationError

METRICS = ("cosine", "dot", "neg_l2", "neg_l1")


def epow(X: np.ndarray, alpha: float) -> np.ndarray:
    """Entrywise power X[i,j] ** alpha."""
    X = np.asarray(X, dtype=np.float64)
    if alpha != int(alpha) and np.any(X < 0):
        raise ValidationError("fractional power of a matrix with negative entries")
    return X**alpha


def unitr(X: np.ndarray) -> np.ndarray:
    """Scale every row to unit l2 norm; all-zero rows stay zero."""
    X = np.asarray(X, dtype=np.float64)
    norms = np.linalg.norm(X, axis=1, keepdims=True)
    norms[norms == 0.0] = 1.0
    return X / norms


def unitr_l1(X: np.ndarray) -> np.ndarray:
    """Scale every row to unit l1 mass; all-zero rows stay zero."""
    X = np.asarray(X, dtype=np.float64)
    mass = np.sum(np.abs(X), axis=1, keepdims=True)
    mass[mass == 0.0] = 1.0
    return X / mass


def centerc(X: np.ndarray) -> np.ndarray:
    """Subtract the column means so every column averages to zero."""
    X = np.asarray(X, dtype=np.float64)
    return X - X.mean(axis=0, keepdims=True)


def normalize(X: np.ndarray) -> np.ndarray:
    """unitr(centerc(unitr(X))), in exactly that order."""
    return unitr(centerc(unitr(X)))


def percentile(values, p: float) -> float:
    """Linear-interpolation percentile with inclusive endpoints."""
    return float(np.percentile(np.asarray(values, dtype=np.float64), p))


def clip_thresholds(X: np.ndarray, p_lo: float = 1.0, p_hi: float = 99.0):
    """Two-stage percentile thresholds: per-row percentiles, then the same
    percentile over the row statistics, so no single row dominates."""
    if not (0.0 <= p_lo < p_hi <= 100.0):
        raise ValidationError(f"need 0 <= p_lo < p_hi <= 100, got ({p_lo}, {p_hi})")
    X = np.asarray(X, dtype=np.float64)
    row_hi = np.percentile(X, p_hi, axis=1)
    row_lo = np.percentile(X, p_lo, axis=1)
    return float(np.percentile(row_lo, p_lo)), float(np.percentile(row_hi, p_hi))


def clip(X: np.ndarray, p_lo: float = 1.0, p_hi: float = 99.0) -> np.ndarray:
    """Limit every entry to the two-stage percentile thresholds."""
    lo, hi = clip_thresholds(X, p_lo, p_hi)
    return np.clip(np.asarray(X, dtype=np.float64), lo, hi)


@dataclass(frozen=True)
class SvdFactors:
    U: np.ndarray  # rows x k, orthonormal columns
    S: np.ndarray  # k, nonincreasing
    Vt: np.ndarray  # k x cols, orthonormal rows


def svd(X: np.ndarray) -> SvdFactors:
    """Thin SVD with a deterministic sign convention: in each column of U
    the largest-magnitude entry (first on ties) is made nonnegative."""
    X = np.asarray(X, dtype=np.float64)
    try:
        U, S, Vt = np.linalg.svd(X, full_matrices=False)
    except np.linalg.LinAlgError as e:
        raise NumericError(f"SVD failed to converge on {X.shape} matrix") from e
    lead = np.abs(U).argmax(axis=0)
    signs = np.sign(U[lead, np.arange(U.shape[1])])
    signs[signs == 0.0] = 1.0
    return SvdFactors(U=U * signs, S=S, Vt=Vt * signs[:, None])


def trunc(X: np.ndarray, r: int) -> np.ndarray:
    """Best rank-r approximation (tail removal)."""
    if r < 0:
        raise ValidationError(f"rank must be >= 0, got {r}")
    f = svd(X)
    r = min(r, f.S.size)
    return (f.U[:, :r] * f.S[:r]) @ f.Vt[:r]


def drop_head(X: np.ndarray, r: int) -> np.ndarray:
    """Remove the top-r singular directions: X minus its rank-r approximation."""
    if r < 0:
        raise ValidationError(f"rank must be >= 0, got {r}")
    X = np.asarray(X, dtype=np.float64)
    if r == 0:
        return X.copy()
    return X - trunc(X, r)


def psd_sqrt_gram(Xv: np.ndarray) -> np.ndarray:
    """Symmetric PSD square root of the gram matrix: U S U^T for Xv = U S Vt."""
    f = svd(Xv)
    return (f.U * f.S) @ f.U.T


def sim_matrix(X: np.ndarray, Z: np.ndarray, metric: str = "cosine") -> np.ndarray:
    """Pairwise row similarities, higher = more similar.

    cosine treats all-zero rows as similarity 0 to everything.
    """
    X = np.asarray(X, dtype=np.float64)
    Z = np.asarray(Z, dtype=np.float64)
    if X.shape[1] != Z.shape[1]:
        raise ValidationError(f"row width mismatch: {X.shape} vs {Z.shape}")
    if metric == "cosine":
        return unitr(X) @ unitr(Z).T
    if metric == "dot":
        return X @ Z.T
    if metric == "neg_l2":
        return -cdist(X, Z, metric="euclidean")
    if metric == "neg_l1":
        return -cdist(X, Z, metric="cityblock")
    raise ValidationError(f"unknown metric {metric!r}, expected one of {METRICS}")


def procrustes(Xs: np.ndarray, Zt: np.ndarray) -> np.ndarray:
    """Orthogonal W minimizing ||Xs @ W - Zt||_F, via SVD of Xs^T Zt."""
    Xs = np.asarray(Xs, dtype=np.float64)
    Zt = np.asarray(Zt, dtype=np.float64)
    if Xs.ndim != 2 or Xs.shape != Zt.shape:
        raise ValidationError(f"paired shapes required, got {Xs.shape} vs {Zt.shape}")
    if 0 in Xs.shape:
        raise ValidationError("empty point sets")
    f = svd(Xs.T @ Zt)
    return f.U @ f.Vt
