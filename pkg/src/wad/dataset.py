"""The evolving labeled/unlabeled/test partition of one dataset.

Training code sees only embeddings, roles, and visible labels. Ground-truth
labels and target/unknown flags ride along for diagnostics but are kept
behind explicit `hidden_*` accessors; nothing on the training path calls
them.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import MissingGroundTruth, StaleSelection
from .pseudo_labeling import LabeledPool

ROLE_LABELED = "labeled"
ROLE_UNLABELED = "unlabeled"
ROLE_TEST = "test"


@dataclass
class DatasetState:
    """One dataset universe: (n, d) unit embeddings plus the partition.

    labeled_idx order is significant (it is the pseudo-labeling tie order):
    initial labeled instances first, promoted instances appended in
    promotion order. visible_labels is -1 wherever the role is unlabeled.
    """

    embeddings: np.ndarray
    k_target: int
    labeled_idx: np.ndarray
    unlabeled_idx: np.ndarray
    test_idx: np.ndarray
    visible_labels: np.ndarray
    ground_truth: np.ndarray | None = None
    is_target: np.ndarray | None = None
    initial_role: np.ndarray = field(default=None)  # frozen copy of roles at t=0

    def __post_init__(self):
        self.embeddings = np.asarray(self.embeddings, dtype=np.float64)
        self.labeled_idx = np.asarray(self.labeled_idx, dtype=np.int64)
        self.unlabeled_idx = np.asarray(self.unlabeled_idx, dtype=np.int64)
        self.test_idx = np.asarray(self.test_idx, dtype=np.int64)
        self.visible_labels = np.asarray(self.visible_labels, dtype=np.int64)
        if self.ground_truth is not None:
            self.ground_truth = np.asarray(self.ground_truth, dtype=np.int64)
        if self.is_target is not None:
            self.is_target = np.asarray(self.is_target, dtype=np.int8)
        if self.initial_role is None:
            roles = np.empty(len(self.embeddings), dtype=object)
            roles[self.labeled_idx] = ROLE_LABELED
            roles[self.unlabeled_idx] = ROLE_UNLABELED
            roles[self.test_idx] = ROLE_TEST
            self.initial_role = roles

    @property
    def n_instances(self) -> int:
        return int(self.embeddings.shape[0])

    @property
    def dim(self) -> int:
        return int(self.embeddings.shape[1])

    def labeled_pool(self) -> LabeledPool:
        return LabeledPool(
            embeddings=self.embeddings[self.labeled_idx],
            labels=self.visible_labels[self.labeled_idx],
            n_classes=self.k_target,
        )

    def test_set(self) -> tuple[np.ndarray, np.ndarray]:
        return self.embeddings[self.test_idx], self.visible_labels[self.test_idx]

    def copy(self) -> "DatasetState":
        return DatasetState(
            embeddings=self.embeddings.copy(),
            k_target=self.k_target,
            labeled_idx=self.labeled_idx.copy(),
            unlabeled_idx=self.unlabeled_idx.copy(),
            test_idx=self.test_idx.copy(),
            visible_labels=self.visible_labels.copy(),
            ground_truth=None if self.ground_truth is None else self.ground_truth.copy(),
            is_target=None if self.is_target is None else self.is_target.copy(),
            initial_role=self.initial_role.copy(),
        )

    # --- diagnostics-only surfaces ---

    @property
    def has_ground_truth(self) -> bool:
        return self.ground_truth is not None and self.is_target is not None

    def hidden_ground_truth(self) -> np.ndarray:
        if self.ground_truth is None:
            raise MissingGroundTruth("dataset carries no ground-truth labels")
        return self.ground_truth

    def hidden_is_target(self) -> np.ndarray:
        if self.is_target is None:
            raise MissingGroundTruth("dataset carries no target/unknown flags")
        return self.is_target

    # --- curriculum mutation ---

    def promote(self, selection: np.ndarray, pseudo_labels: np.ndarray) -> None:
        """Move `selection` (universe indices) from unlabeled to labeled.

        The instances join the labeled pool carrying their pseudo labels as
        visible labels. Raises StaleSelection if any index is not currently
        unlabeled.
        """
        selection = np.asarray(selection, dtype=np.int64)
        if len(selection) == 0:
            return
        current = set(self.unlabeled_idx.tolist())
        stale = [int(i) for i in selection if int(i) not in current]
        if stale:
            raise StaleSelection(f"indices no longer unlabeled: {stale[:5]}")
        self.visible_labels[selection] = np.asarray(pseudo_labels, dtype=np.int64)
        self.labeled_idx = np.concatenate([self.labeled_idx, selection])
        keep = ~np.isin(self.unlabeled_idx, selection)
        self.unlabeled_idx = self.unlabeled_idx[keep]
