"""The training driver: distill labels and weights each epoch, train the
student on the combined loss, and periodically promote the most reliable
pseudo-labeled instances into the labeled pool while the promotion budget
alpha decays polynomially to zero.

Run modes
---------
wad                      full loop: per-epoch annotation refresh, promotions
baseline                 labeled data only (unlabeled ignored entirely)
pseudo_only              pseudo labels with weight 1, no promotions
pseudo_and_fixed_weight  pseudo labels with weights frozen at epoch 0
                         (or an overriding constant), no promotions

All modes take the same number of optimizer steps per epoch and share the
labeled-side random streams, so baseline runs are step-for-step comparable
with the others.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .dataset import DatasetState
from .errors import ConfigError, InvalidIndex
from .pseudo_labeling import assign_pseudo_labels_batch
from .student import (
    PROB_CLAMP,
    StudentParams,
    TrainConfig,
    cross_entropy,
    evaluate,
    forward,
    init_student,
    train_step,
)
from .weighting import WeightFunctionSpec, compute_weights_batch

RUN_MODES = ("wad", "baseline", "pseudo_only", "pseudo_and_fixed_weight")

# Promotion budgets are quantized to 12 decimals: the mathematically exact
# schedule values (0.1, 0.08, ...) would otherwise pick up 1-ulp float
# drift, which can flip floor(alpha * n) at exact integer boundaries.
_ALPHA_DECIMALS = 12


@dataclass
class CurriculumConfig:
    alpha0: float = 0.1
    total_updates: int = 5
    decay_power: float = 1.0
    update_epochs: tuple[int, ...] | None = None  # default: evenly spaced
    refresh_period: int = 1

    def __post_init__(self):
        # alpha0 = 0 is admitted so the no-promotion reduction can run.
        if not 0.0 <= self.alpha0 <= 1.0:
            raise ConfigError("alpha0: must be in [0, 1]")
        if self.total_updates < 0:
            raise ConfigError("total_updates: must be >= 0")
        if self.decay_power < 0:
            raise ConfigError("decay_power: must be >= 0")
        if self.refresh_period < 1:
            raise ConfigError("refresh_period: must be >= 1")
        if self.update_epochs is not None:
            eps = tuple(int(e) for e in self.update_epochs)
            if any(b <= a for a, b in zip(eps, eps[1:])):
                raise ConfigError("update_epochs: must be strictly increasing")
            if eps and eps[0] < 0:
                raise ConfigError("update_epochs: must be >= 0")
            self.update_epochs = eps
            self.total_updates = len(eps)


def resolve_update_epochs(config: CurriculumConfig, epochs: int) -> tuple[int, ...]:
    """The update-epoch set G: explicit, or S epochs evenly spaced in [0, epochs)."""
    if config.update_epochs is not None:
        if config.update_epochs and config.update_epochs[-1] >= epochs:
            raise ConfigError("update_epochs: must lie within [0, epochs)")
        return config.update_epochs
    s_total = config.total_updates
    if s_total == 0:
        return ()
    return tuple(
        (s + 1) * epochs // (s_total + 1) for s in range(s_total)
    )


def decay_alpha(alpha0: float, s: int, total: int, power: float = 1.0) -> float:
    """Polynomial decay alpha_s = alpha0 * (1 - s/total)^power; alpha_total = 0."""
    if not 0 <= s <= total:
        raise InvalidIndex(f"update index {s} outside [0, {total}]")
    frac = (total - s) / total
    return round(alpha0 * frac**power, _ALPHA_DECIMALS)


@dataclass
class AnnotationSet:
    """Pseudo labels, similarity pair, and weights for the current D_u."""

    universe_idx: np.ndarray
    pseudo_labels: np.ndarray
    p_tilde: np.ndarray
    q_tilde: np.ndarray
    weights: np.ndarray

    def __len__(self) -> int:
        return len(self.universe_idx)


def annotate(
    state: DatasetState,
    weight_spec: WeightFunctionSpec,
    fixed_weight: float | None = None,
) -> AnnotationSet:
    """Distill pseudo labels and weights for every current unlabeled instance."""
    pool = state.labeled_pool()
    z = state.embeddings[state.unlabeled_idx]
    labels, p, q, _ = assign_pseudo_labels_batch(z, pool)
    if fixed_weight is None:
        w = compute_weights_batch(p, q, weight_spec)
    else:
        w = np.full(len(labels), float(fixed_weight))
    return AnnotationSet(
        universe_idx=state.unlabeled_idx.copy(),
        pseudo_labels=labels,
        p_tilde=p,
        q_tilde=q,
        weights=w,
    )


def reliability(params: StudentParams, x: np.ndarray, pseudo_label: int) -> float:
    """Cross-entropy of the current prediction against the pseudo label."""
    return cross_entropy(forward(params, np.asarray(x, dtype=np.float64)), pseudo_label)


def reliability_batch(
    params: StudentParams, x: np.ndarray, pseudo_labels: np.ndarray
) -> np.ndarray:
    probs = forward(params, np.asarray(x, dtype=np.float64))
    labels = np.asarray(pseudo_labels, dtype=np.int64)
    picked = probs[np.arange(len(labels)), labels]
    return -np.log(np.maximum(picked, PROB_CLAMP))


def select_reliable(
    reliabilities: np.ndarray, universe_idx: np.ndarray, alpha: float
) -> np.ndarray:
    """Universe indices of the floor(alpha * n) most reliable instances.

    Reliability is ascending cross-entropy; ties break toward the lowest
    universe index. alpha * n < 1 selects nothing.
    """
    n = len(reliabilities)
    count = int(math.floor(alpha * n))
    if count <= 0:
        return np.empty(0, dtype=np.int64)
    order = np.lexsort((universe_idx, reliabilities))
    return np.asarray(universe_idx)[order[:count]]


def promote(
    state: DatasetState, selection: np.ndarray, annotations: AnnotationSet
) -> DatasetState:
    """Move the selected instances into the labeled pool with their pseudo labels."""
    selection = np.asarray(selection, dtype=np.int64)
    if len(selection) == 0:
        return state
    pos = {int(u): i for i, u in enumerate(annotations.universe_idx)}
    pseudo = np.asarray(
        [annotations.pseudo_labels[pos[int(u)]] for u in selection], dtype=np.int64
    )
    state.promote(selection, pseudo)
    return state


@dataclass
class RunHistory:
    """Per-epoch records, the per-step loss trajectory, and the promotion log."""

    epochs: list[dict] = field(default_factory=list)
    step_losses: list[float] = field(default_factory=list)
    promotions: list[dict] = field(default_factory=list)
    final_state: DatasetState | None = None

    def to_records(self):
        """Line-delimited record stream: one dict per epoch, promotions inline."""
        by_epoch = {}
        for p in self.promotions:
            by_epoch.setdefault(p["epoch"], []).append(p)
        for rec in self.epochs:
            out = dict(rec)
            out["promotions"] = by_epoch.get(rec["epoch"], [])
            yield out


class _LabeledCycler:
    """Cycles shuffled labeled indices, always yielding full batches."""

    def __init__(self, indices: np.ndarray, rng: np.random.Generator):
        self._indices = np.asarray(indices, dtype=np.int64)
        self._rng = rng
        self._queue = self._rng.permutation(self._indices)
        self._pos = 0

    def next_batch(self, size: int) -> np.ndarray:
        out: list[np.ndarray] = []
        need = size
        while need > 0:
            avail = len(self._queue) - self._pos
            if avail == 0:
                self._queue = self._rng.permutation(self._indices)
                self._pos = 0
                continue
            take = min(need, avail)
            out.append(self._queue[self._pos : self._pos + take])
            self._pos += take
            need -= take
        return np.concatenate(out)


def _group_means(ann: AnnotationSet, state: DatasetState):
    if not state.has_ground_truth or ann is None:
        return None, None
    flags = state.is_target[ann.universe_idx]
    target_w = ann.weights[flags == 1]
    unknown_w = ann.weights[flags == 0]
    mean_t = float(target_w.mean()) if len(target_w) else None
    mean_u = float(unknown_w.mean()) if len(unknown_w) else None
    return mean_t, mean_u


def run_wad(
    data: DatasetState,
    curriculum: CurriculumConfig,
    train: TrainConfig,
    weights: WeightFunctionSpec = WeightFunctionSpec(),
    mode: str = "wad",
    fixed_weight_value: float | None = None,
) -> tuple[StudentParams, RunHistory]:
    """Run the full training loop and return (final params, history).

    The caller's DatasetState is left untouched; promotions happen on an
    internal copy. Deterministic for a given train.seed: parameter init,
    labeled batching/noise and unlabeled batching/noise consume three
    independent child streams, so modes that never touch unlabeled data
    replay the identical labeled stream.
    """
    if mode not in RUN_MODES:
        raise ConfigError(f"mode: {mode!r} not one of {RUN_MODES}")
    state = data.copy()
    if len(state.labeled_idx) == 0:
        raise ConfigError("dataset has no labeled instances")

    ss = np.random.SeedSequence(train.seed)
    rng_init, rng_label, rng_unlabel = (
        np.random.default_rng(child) for child in ss.spawn(3)
    )

    params = init_student(
        state.dim, train.hidden_widths, state.k_target, train.activation, rng_init
    )
    cycler = _LabeledCycler(state.labeled_idx, rng_label)
    history = RunHistory()
    update_epochs = set(resolve_update_epochs(curriculum, train.epochs)) if mode == "wad" else set()
    use_unlabeled = mode != "baseline"
    refresh_each = mode == "wad"
    batch = train.batch_size
    test_x, test_y = state.test_set()

    annotations: AnnotationSet | None = None
    update_index = 0

    for epoch in range(train.epochs):
        if use_unlabeled and len(state.unlabeled_idx):
            stale = annotations is None or len(annotations) != len(state.unlabeled_idx)
            due = refresh_each and epoch % curriculum.refresh_period == 0
            if stale or due:
                if mode == "pseudo_only":
                    annotations = annotate(state, weights, fixed_weight=1.0)
                elif mode == "pseudo_and_fixed_weight":
                    annotations = annotate(state, weights, fixed_weight=fixed_weight_value) \
                        if fixed_weight_value is not None else annotate(state, weights)
                else:
                    annotations = annotate(state, weights)

        n_unl = len(state.unlabeled_idx)
        steps = max(1, math.ceil(n_unl / batch)) if n_unl else max(
            1, math.ceil(len(state.labeled_idx) / batch)
        )
        if use_unlabeled and n_unl:
            order = rng_unlabel.permutation(n_unl)
        epoch_losses = []
        for step in range(steps):
            lab_idx = cycler.next_batch(batch)
            labeled_batch = (
                state.embeddings[lab_idx],
                state.visible_labels[lab_idx],
            )
            unlabeled_batch = None
            if use_unlabeled and n_unl:
                rows = order[step * batch : (step + 1) * batch]
                unlabeled_batch = (
                    state.embeddings[annotations.universe_idx[rows]],
                    annotations.pseudo_labels[rows],
                    annotations.weights[rows],
                )
            params, loss = train_step(
                params,
                labeled_batch,
                unlabeled_batch,
                train,
                rng=rng_label,
                unlabeled_rng=rng_unlabel,
            )
            epoch_losses.append(loss)
            history.step_losses.append(loss)

        mean_t, mean_u = _group_means(annotations, state) if use_unlabeled else (None, None)
        history.epochs.append(
            {
                "epoch": epoch,
                "n_labeled": int(len(state.labeled_idx)),
                "n_unlabeled": int(n_unl),
                "steps": steps,
                "mean_loss": float(np.mean(epoch_losses)),
                "test_accuracy": evaluate(params, test_x, test_y)
                if len(test_x)
                else None,
                "mean_weight_target": mean_t,
                "mean_weight_unknown": mean_u,
            }
        )

        if epoch in update_epochs and len(state.unlabeled_idx):
            alpha = decay_alpha(
                curriculum.alpha0, update_index, curriculum.total_updates,
                curriculum.decay_power,
            )
            rel = reliability_batch(
                params,
                state.embeddings[annotations.universe_idx],
                annotations.pseudo_labels,
            )
            selection = select_reliable(rel, annotations.universe_idx, alpha)
            n_target_sel = n_unknown_sel = None
            if state.has_ground_truth and len(selection):
                sel_flags = state.is_target[selection]
                n_target_sel = int(np.sum(sel_flags == 1))
                n_unknown_sel = int(np.sum(sel_flags == 0))
            promote(state, selection, annotations)
            history.promotions.append(
                {
                    "epoch": epoch,
                    "update_index": update_index,
                    "alpha": alpha,
                    "n_selected": int(len(selection)),
                    "n_target_selected": n_target_sel,
                    "n_unknown_selected": n_unknown_sel,
                }
            )
            update_index += 1
            if len(selection):
                # re-distill from the grown pool next epoch
                annotations = None
                cycler = _LabeledCycler(state.labeled_idx, rng_label)

    history.final_state = state
    return params, history
