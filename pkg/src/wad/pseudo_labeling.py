"""Pseudo-label assignment by maximum cosine against the labeled pool.

Each unlabeled embedding inherits the label of the labeled instance it is
most similar to. Alongside the pseudo label we keep the two quantities the
weighting step needs: the winning similarity (p_tilde) and the best
similarity achieved by any instance of a *different* class (q_tilde).

Ties at the maximum are broken by lowest labeled-pool index so reruns are
deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, EmptyPool, SingleClassPool
from .repr_core import cosine_matrix


@dataclass(frozen=True)
class LabeledPool:
    """Read-only snapshot of the labeled data in representation space.

    embeddings: (m, d) unit rows; labels: (m,) ints in [0, n_classes);
    every class must have at least one member so q_tilde is defined.
    """

    embeddings: np.ndarray
    labels: np.ndarray
    n_classes: int

    def __post_init__(self):
        emb = np.asarray(self.embeddings, dtype=np.float64)
        lab = np.asarray(self.labels, dtype=np.int64)
        object.__setattr__(self, "embeddings", emb)
        object.__setattr__(self, "labels", lab)
        if emb.ndim != 2 or len(lab) != emb.shape[0]:
            raise DimensionMismatch(
                f"embeddings {emb.shape} vs labels {lab.shape}"
            )
        if emb.shape[0] == 0:
            raise EmptyPool("labeled pool is empty")

    @property
    def size(self) -> int:
        return int(self.embeddings.shape[0])


@dataclass(frozen=True)
class PmiAssignment:
    """Per-instance pseudo-label record."""

    pseudo_label: int
    p_tilde: float
    q_tilde: float
    argmax_index: int


def similarity_profile(z_u: np.ndarray, pool: LabeledPool) -> np.ndarray:
    """Cosine of z_u against every pool member, in pool order."""
    z_u = np.asarray(z_u, dtype=np.float64)
    if z_u.shape != (pool.embeddings.shape[1],):
        raise DimensionMismatch(
            f"embedding dim {z_u.shape} vs pool dim ({pool.embeddings.shape[1]},)"
        )
    return cosine_matrix(z_u[None, :], pool.embeddings)[0]


def assign_pseudo_label(z_u: np.ndarray, pool: LabeledPool) -> PmiAssignment:
    """Assign the label of the most similar labeled instance.

    Returns the pseudo label, the maximum similarity p_tilde, the best
    similarity among other-class instances q_tilde, and the winning pool
    index. Single-class pools are rejected: q_tilde would be undefined.
    """
    labels, p, q, idx = assign_pseudo_labels_batch(
        np.asarray(z_u, dtype=np.float64)[None, :], pool
    )
    return PmiAssignment(int(labels[0]), float(p[0]), float(q[0]), int(idx[0]))


def assign_pseudo_labels_batch(
    z_batch: np.ndarray, pool: LabeledPool
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized assignment for a (n, d) batch of unlabeled embeddings.

    Returns (pseudo_labels, p_tilde, q_tilde, argmax_index), each of length n.
    """
    if len(np.unique(pool.labels)) < 2:
        raise SingleClassPool(
            "q_tilde needs at least one labeled instance of a competing class"
        )
    sims = cosine_matrix(np.asarray(z_batch, dtype=np.float64), pool.embeddings)
    # np.argmax returns the first (lowest-index) maximum, which is the tie rule.
    idx = np.argmax(sims, axis=1)
    rows = np.arange(sims.shape[0])
    p_tilde = sims[rows, idx]
    pseudo = pool.labels[idx]
    masked = np.where(pool.labels[None, :] == pseudo[:, None], -np.inf, sims)
    q_tilde = np.max(masked, axis=1)
    return pseudo.astype(np.int64), p_tilde, q_tilde, idx.astype(np.int64)
