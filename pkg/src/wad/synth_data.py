"""Controllable class-distribution-mismatch scenarios on the unit sphere.

Each class is a unit-vector center; instances are the center rotated by a
random angle drawn from N(0, angular_noise_std^2) toward a random tangent
direction, so `angular_noise_std` is literally the standard deviation of
the angular offset in radians. Centers are rejection-sampled to keep a
minimum pairwise angular separation.

Only unlabeled data is contaminated: the labeled pool and the test set are
drawn from target classes alone. Unknown-class instances carry ground-truth
ids k_target..k_target+k_unknown-1 and is_target = 0, visible to
diagnostics only.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import DatasetState
from .errors import CenterSamplingFailed, ConfigError

_MAX_CENTER_ATTEMPTS = 10_000


@dataclass
class ScenarioConfig:
    k_target: int = 2
    k_unknown: int = 8
    dim: int = 16
    labeled_per_class: int = 40
    n_unlabeled: int = 2000
    mismatch_proportion: float = 0.6
    n_test_per_class: int = 250
    angular_noise_std: float = 0.6
    min_center_separation: float = 1.25
    near_miss_unknowns: bool = True  # invaders between target pairs, half floor
    seed: int = 0

    def __post_init__(self):
        if self.k_target < 2:
            raise ConfigError("k_target: must be >= 2")
        if self.k_unknown < 0:
            raise ConfigError("k_unknown: must be >= 0")
        if self.dim < 2:
            raise ConfigError("dim: must be >= 2")
        if self.labeled_per_class < 1:
            raise ConfigError("labeled_per_class: must be >= 1")
        if self.n_unlabeled < 0:
            raise ConfigError("n_unlabeled: must be >= 0")
        if not 0.0 <= self.mismatch_proportion <= 1.0:
            raise ConfigError("mismatch_proportion: must be in [0, 1]")
        if self.n_test_per_class < 1:
            raise ConfigError("n_test_per_class: must be >= 1")
        if self.angular_noise_std < 0:
            raise ConfigError("angular_noise_std: must be >= 0")
        if self.min_center_separation <= 0:
            raise ConfigError("min_center_separation: must be > 0")
        if self.mismatch_proportion > 0 and self.k_unknown == 0:
            raise ConfigError(
                "k_unknown: must be >= 1 when mismatch_proportion > 0"
            )


def split_counts(config: ScenarioConfig) -> tuple[int, int]:
    """(n_unlabeled_target, n_unlabeled_unknown) per the mismatch proportion."""
    n_unknown = int(round(config.mismatch_proportion * config.n_unlabeled))
    return config.n_unlabeled - n_unknown, n_unknown


def _per_class_counts(total: int, k: int) -> np.ndarray:
    """Even split of `total` across k classes, remainder to lowest class ids."""
    base, rem = divmod(total, k)
    counts = np.full(k, base, dtype=np.int64)
    counts[:rem] += 1
    return counts


def _sample_centers(config: ScenarioConfig, rng: np.random.Generator) -> np.ndarray:
    """Class centers on the unit sphere, pairwise angle >= the separation floor.

    Target centers and plain unknown centers are rejection-sampled uniformly
    against the full floor. Near-miss unknown centers are instead proposed
    around the geodesic midpoint of a random target pair and accept a
    relaxed floor (half separation) against every other center: they sit in
    the ambiguous region between two target classes, which is the invader
    population the weighting is meant to suppress.
    """
    k_total = config.k_target + config.k_unknown
    min_cos = np.cos(config.min_center_separation)
    relaxed_cos = np.cos(config.min_center_separation / 2.0)
    centers: list[np.ndarray] = []
    attempts = 0
    while len(centers) < k_total:
        attempts += 1
        if attempts > _MAX_CENTER_ATTEMPTS:
            raise CenterSamplingFailed(
                f"placed {len(centers)}/{k_total} centers after "
                f"{_MAX_CENTER_ATTEMPTS} attempts (dim={config.dim}, "
                f"min_center_separation={config.min_center_separation})"
            )
        unknown_index = len(centers) - config.k_target
        if config.near_miss_unknowns and unknown_index >= 0:
            # alternate which target of the pair the invader leans toward,
            # so each cluster picks up a consistent (wrong) pseudo label
            # while the overall scenario stays class-balanced
            a = unknown_index % config.k_target
            b = (a + 1 + int(rng.integers(config.k_target - 1))) % config.k_target
            ca, cb = centers[a], centers[b]
            span = float(np.arccos(np.clip(ca @ cb, -1.0, 1.0)))
            t = rng.uniform(0.32, 0.45)  # closer to target a than to b
            geo = (
                np.sin((1.0 - t) * span) * ca + np.sin(t * span) * cb
            ) / np.sin(span)
            e2 = cb - (cb @ ca) * ca
            e2 /= np.linalg.norm(e2)
            u = rng.normal(size=config.dim)
            u -= (u @ ca) * ca + (u @ e2) * e2
            u /= np.linalg.norm(u)
            phi = abs(rng.normal(0.0, 0.45))
            c = np.cos(phi) * geo + np.sin(phi) * u
            limit = relaxed_cos
        else:
            c = rng.normal(size=config.dim)
            c /= np.linalg.norm(c)
            limit = min_cos
        if all(float(np.dot(c, other)) <= limit for other in centers):
            centers.append(c)
    return np.stack(centers)


def _perturb(
    center: np.ndarray, n: int, std: float, rng: np.random.Generator
) -> np.ndarray:
    """n unit vectors at angle ~N(0, std^2) from `center`, random tangent."""
    d = len(center)
    g = rng.normal(size=(n, d))
    g -= (g @ center)[:, None] * center[None, :]
    norms = np.linalg.norm(g, axis=1)
    norms[norms < 1e-12] = 1.0
    tangent = g / norms[:, None]
    theta = rng.normal(0.0, std, size=n) if std > 0 else np.zeros(n)
    out = np.cos(theta)[:, None] * center[None, :] + np.sin(theta)[:, None] * tangent
    return out / np.linalg.norm(out, axis=1)[:, None]


def generate(config: ScenarioConfig) -> DatasetState:
    """Build a DatasetState for the configured mismatch scenario."""
    rng = np.random.default_rng(config.seed)
    centers = _sample_centers(config, rng)

    n_u_target, n_u_unknown = split_counts(config)
    labeled_counts = np.full(config.k_target, config.labeled_per_class, dtype=np.int64)
    test_counts = np.full(config.k_target, config.n_test_per_class, dtype=np.int64)
    u_target_counts = _per_class_counts(n_u_target, config.k_target)
    u_unknown_counts = (
        _per_class_counts(n_u_unknown, config.k_unknown)
        if n_u_unknown > 0
        else np.zeros(max(config.k_unknown, 1), dtype=np.int64)
    )

    blocks: list[np.ndarray] = []
    gt: list[np.ndarray] = []
    roles: list[str] = []

    def emit(class_id: int, count: int, role: str):
        if count == 0:
            return
        blocks.append(
            _perturb(centers[class_id], count, config.angular_noise_std, rng)
        )
        gt.append(np.full(count, class_id, dtype=np.int64))
        roles.extend([role] * count)

    for k in range(config.k_target):
        emit(k, int(labeled_counts[k]), "labeled")
    for k in range(config.k_target):
        emit(k, int(u_target_counts[k]), "unlabeled")
    for k in range(config.k_unknown):
        emit(config.k_target + k, int(u_unknown_counts[k]), "unlabeled")
    for k in range(config.k_target):
        emit(k, int(test_counts[k]), "test")

    embeddings = np.concatenate(blocks, axis=0)
    ground_truth = np.concatenate(gt)
    role_arr = np.asarray(roles, dtype=object)
    is_target = (ground_truth < config.k_target).astype(np.int8)

    labeled_idx = np.flatnonzero(role_arr == "labeled")
    unlabeled_idx = np.flatnonzero(role_arr == "unlabeled")
    test_idx = np.flatnonzero(role_arr == "test")

    visible = np.full(len(embeddings), -1, dtype=np.int64)
    visible[labeled_idx] = ground_truth[labeled_idx]
    visible[test_idx] = ground_truth[test_idx]

    return DatasetState(
        embeddings=embeddings,
        k_target=config.k_target,
        labeled_idx=labeled_idx,
        unlabeled_idx=unlabeled_idx,
        test_idx=test_idx,
        visible_labels=visible,
        ground_truth=ground_truth,
        is_target=is_target,
    )
