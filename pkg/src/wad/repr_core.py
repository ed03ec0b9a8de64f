"""Vector primitives for the representation space.

All similarity in this package is plain cosine of unit vectors, i.e. the
inner product after L2 normalization. No temperature or scaling is applied.
Outputs are clamped to [-1, 1] so downstream sqrt/ratio formulas never see
1 + eps drift.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionMismatch, ZeroVector

ZERO_NORM_EPS = 1e-12
UNIT_NORM_TOL = 1e-6


def normalize(v: np.ndarray) -> np.ndarray:
    """Return v scaled to unit Euclidean norm (direction preserved).

    Raises ZeroVector when ||v|| < 1e-12.
    """
    v = np.asarray(v, dtype=np.float64)
    norm = float(np.linalg.norm(v))
    if norm < ZERO_NORM_EPS:
        raise ZeroVector(f"cannot normalize vector with norm {norm:.3e}")
    return v / norm


def normalize_rows(m: np.ndarray) -> np.ndarray:
    """Row-wise normalize a (n, d) matrix; any zero row raises ZeroVector."""
    m = np.asarray(m, dtype=np.float64)
    norms = np.linalg.norm(m, axis=1)
    if np.any(norms < ZERO_NORM_EPS):
        bad = int(np.argmin(norms))
        raise ZeroVector(f"row {bad} has norm {norms[bad]:.3e}")
    return m / norms[:, None]


def is_unit(v: np.ndarray, tol: float = UNIT_NORM_TOL) -> bool:
    return abs(float(np.linalg.norm(v)) - 1.0) <= tol


def require_unit_rows(m: np.ndarray, tol: float = UNIT_NORM_TOL) -> None:
    """Validate that every row of m sits on the unit sphere (dataset-load check)."""
    norms = np.linalg.norm(np.asarray(m, dtype=np.float64), axis=1)
    err = np.abs(norms - 1.0)
    if np.any(err > tol):
        bad = int(np.argmax(err))
        raise ZeroVector(
            f"row {bad} is not unit norm: ||v|| = {norms[bad]:.8f} (tol {tol:g})"
        )


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    """Cosine similarity of two unit embeddings, clamped to [-1, 1]."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise DimensionMismatch(f"shapes {a.shape} vs {b.shape}")
    return float(cosine_matrix(a[None, :], b[None, :])[0, 0])


def cosine_matrix(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Pairwise cosine of unit rows: (n, d) x (m, d) -> (n, m), clamped.

    Accumulated coordinate by coordinate in index order rather than via a
    BLAS matmul: BLAS reassociates sums depending on operand shape, so the
    same pair could score differently in scalar, single-row and batched
    calls. Fixed-order accumulation makes every call path bit-identical
    (and reproducible by a plain left-to-right scan).
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[1]:
        raise DimensionMismatch(f"shapes {a.shape} vs {b.shape}")
    acc = np.zeros((a.shape[0], b.shape[0]))
    for k in range(a.shape[1]):
        acc += a[:, k, None] * b[None, :, k]
    return np.clip(acc, -1.0, 1.0)
