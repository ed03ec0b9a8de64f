"""Empirical error decomposition, risk-bound evaluation, weight statistics.

The SSL error of a trained student splits into a pseudo-labeling term (loss
gap between ground-truth target instances and the target instances as
actually annotated) and an invasion term (loss mass contributed by
unknown-category instances). Both are measured here against the hidden
ground truth, with every per-instance loss clamped at the bound H.

The closed-form risk bound

    sqrt(4 - 4 xi) * (lambda_l + lambda_mu * H * K)
      + w_bar * |U| * H / |T_hat|
      + sqrt(2 H^2 log(1/gamma) / |T|)

is evaluated as stated; the Lipschitz constants lambda_l / lambda_mu are
user-supplied configuration, not estimated from data, so the report states
whether the empirical decomposition falls below the bound but never asserts
it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .curriculum import AnnotationSet, annotate
from .dataset import DatasetState
from .errors import EmptyAnnotations, InvalidInputs, MissingGroundTruth
from .student import PROB_CLAMP, StudentParams, forward
from .weighting import WeightFunctionSpec

# The probability clamp implies a hard ceiling on any cross-entropy value.
H_DEFAULT = -math.log(PROB_CLAMP)

XI_FLOOR = 1e-6  # keeps the reported xi inside (0, 1]


@dataclass(frozen=True)
class ErrorDecomposition:
    pseudo_labeling_error: float
    invasion_error: float
    ssl_error_bound: float  # sum of the two terms
    training_error: float
    test_risk: float


@dataclass(frozen=True)
class BoundInputs:
    xi: float
    lambda_l: float = 1.0
    lambda_mu: float = 1.0
    H: float = H_DEFAULT
    K: int = 2
    w_bar: float = 0.0
    U_size: int = 0
    That_size: int = 1
    T_size: int = 1
    gamma: float = 0.05

    def __post_init__(self):
        if not 0.0 < self.xi <= 1.0:
            raise InvalidInputs(f"xi must be in (0, 1], got {self.xi}")
        if self.lambda_l <= 0 or self.lambda_mu <= 0:
            raise InvalidInputs("lambda_l and lambda_mu must be > 0")
        if self.H <= 0:
            raise InvalidInputs("H must be > 0")
        if self.K < 1:
            raise InvalidInputs("K must be >= 1")
        if self.w_bar < 0:
            raise InvalidInputs("w_bar must be >= 0")
        if self.That_size < 1 or self.T_size < 1:
            raise InvalidInputs("|T_hat| and |T| must be >= 1")
        if not 0 <= self.U_size <= self.That_size:
            raise InvalidInputs("|U| must be in [0, |T_hat|]")
        if not 0.0 < self.gamma < 1.0:
            raise InvalidInputs(f"gamma must be in (0, 1), got {self.gamma}")


def theorem1_bound(b: BoundInputs) -> float:
    """Evaluate the three-term SSL-error bound at the given inputs."""
    pseudo_term = math.sqrt(4.0 - 4.0 * b.xi) * (b.lambda_l + b.lambda_mu * b.H * b.K)
    invasion_term = b.w_bar * b.U_size * b.H / b.That_size
    concentration = math.sqrt(2.0 * b.H**2 * math.log(1.0 / b.gamma) / b.T_size)
    return pseudo_term + invasion_term + concentration


def empirical_xi(p_tilde: np.ndarray) -> float:
    """Worst-case assignment confidence: min p_tilde, clamped into (0, 1]."""
    p = np.asarray(p_tilde, dtype=np.float64)
    if p.size == 0:
        raise EmptyAnnotations("xi needs at least one annotation")
    return float(np.clip(p.min(), XI_FLOOR, 1.0))


def _clamped_ce(
    params: StudentParams, x: np.ndarray, labels: np.ndarray, loss_bound: float
) -> np.ndarray:
    probs = forward(params, x)
    picked = probs[np.arange(len(labels)), np.asarray(labels, dtype=np.int64)]
    return np.minimum(-np.log(np.maximum(picked, PROB_CLAMP)), loss_bound)


def decompose_ssl_error(
    params: StudentParams,
    state: DatasetState,
    loss_bound: float = H_DEFAULT,
    annotations: AnnotationSet | None = None,
) -> ErrorDecomposition:
    """Measure the decomposition over the training universe (D_l and D_u).

    Requires hidden ground truth. Pseudo labels for the current unlabeled
    pool are taken from `annotations` or re-distilled from the labeled pool.
    """
    if not state.has_ground_truth:
        raise MissingGroundTruth("decomposition needs ground truth and flags")
    if annotations is None:
        annotations = annotate(state, WeightFunctionSpec())

    universe = np.concatenate([state.labeled_idx, state.unlabeled_idx])
    current_labels = state.visible_labels.copy()
    current_labels[annotations.universe_idx] = annotations.pseudo_labels

    flags = state.is_target[universe]
    gt = state.ground_truth[universe]
    x = state.embeddings[universe]
    labels_hat = current_labels[universe]

    that_size = len(universe)
    target_mask = flags == 1
    unknown_mask = flags == 0

    loss_hat = _clamped_ce(params, x, labels_hat, loss_bound)
    loss_true_t = _clamped_ce(
        params, x[target_mask], gt[target_mask], loss_bound
    )

    t_size = int(target_mask.sum())
    if t_size == 0:
        raise MissingGroundTruth("no target-category instances in the universe")

    mean_true = float(loss_true_t.mean())
    sum_hat_minus_u = float(loss_hat[target_mask].sum())
    pseudo_err = abs(mean_true - sum_hat_minus_u / that_size)
    invasion_err = float(loss_hat[unknown_mask].sum()) / that_size

    test_x, test_y = state.test_set()
    test_risk = (
        float(_clamped_ce(params, test_x, test_y, loss_bound).mean())
        if len(test_x)
        else float("nan")
    )
    return ErrorDecomposition(
        pseudo_labeling_error=pseudo_err,
        invasion_error=invasion_err,
        ssl_error_bound=pseudo_err + invasion_err,
        training_error=float(loss_hat.mean()),
        test_risk=test_risk,
    )


def weight_group_stats(
    weights: np.ndarray, is_target: np.ndarray, bins: int = 20
) -> dict:
    """Mean/median/histogram of weights for the target and unknown groups.

    Histograms share one bin range so the two groups are directly
    comparable. Empty groups are flagged with null statistics.
    """
    w = np.asarray(weights, dtype=np.float64)
    flags = np.asarray(is_target)
    if flags is None or len(flags) != len(w):
        raise MissingGroundTruth("weight stats need per-instance target flags")
    lo = float(min(0.0, w.min())) if len(w) else 0.0
    hi = float(max(w.max(), lo + 1e-9)) if len(w) else 1.0
    edges = np.linspace(lo, hi, bins + 1)

    def group(mask):
        vals = w[mask]
        if len(vals) == 0:
            return {"count": 0, "mean": None, "median": None, "histogram": None}
        counts, _ = np.histogram(vals, bins=edges)
        return {
            "count": int(len(vals)),
            "mean": float(vals.mean()),
            "median": float(np.median(vals)),
            "histogram": counts.tolist(),
        }

    return {
        "bin_edges": edges.tolist(),
        "target": group(flags == 1),
        "unknown": group(flags == 0),
    }


def bound_inputs_from_run(
    state: DatasetState,
    annotations: AnnotationSet,
    lambda_l: float = 1.0,
    lambda_mu: float = 1.0,
    loss_bound: float = H_DEFAULT,
    gamma: float = 0.05,
) -> BoundInputs:
    """Assemble empirical bound inputs from a finished run's state."""
    if not state.has_ground_truth:
        raise MissingGroundTruth("bound inputs need target flags for |U| and |T|")
    universe = np.concatenate([state.labeled_idx, state.unlabeled_idx])
    flags = state.is_target[universe]
    return BoundInputs(
        xi=empirical_xi(annotations.p_tilde),
        lambda_l=lambda_l,
        lambda_mu=lambda_mu,
        H=loss_bound,
        K=state.k_target,
        w_bar=float(annotations.weights.mean()) if len(annotations) else 0.0,
        U_size=int(np.sum(flags == 0)),
        That_size=int(len(universe)),
        T_size=int(np.sum(flags == 1)),
        gamma=gamma,
    )


def diagnostics_report(
    params: StudentParams,
    state: DatasetState,
    annotations: AnnotationSet,
    initial_state: DatasetState | None = None,
    weight_spec: WeightFunctionSpec = WeightFunctionSpec(),
    lambda_l: float = 1.0,
    lambda_mu: float = 1.0,
    loss_bound: float = H_DEFAULT,
    gamma: float = 0.05,
) -> dict:
    """Full JSON-ready diagnostics document for one finished run.

    `weight_stats` describes the weights of the instances still unlabeled
    at the end of the run. When the pre-promotion `initial_state` is
    supplied, `weight_stats_initial` additionally describes the full
    unlabeled pool against the original labeled data, which is the natural
    per-group weight-distribution picture.
    """
    decomp = decompose_ssl_error(params, state, loss_bound, annotations)
    inputs = bound_inputs_from_run(
        state, annotations, lambda_l, lambda_mu, loss_bound, gamma
    )
    bound = theorem1_bound(inputs)
    mean_p = float(np.mean(annotations.p_tilde)) if len(annotations) else None
    flags = state.is_target[annotations.universe_idx]
    report = {
        "error_decomposition": decomp.__dict__,
        "bound_inputs": inputs.__dict__,
        "theorem_bound": bound,
        "xi_min": inputs.xi,
        "p_tilde_mean": mean_p,
        "empirical_below_bound": bool(decomp.ssl_error_bound <= bound),
        "weight_stats": weight_group_stats(annotations.weights, flags),
    }
    if initial_state is not None and initial_state.has_ground_truth:
        ann0 = annotate(initial_state, weight_spec)
        flags0 = initial_state.is_target[ann0.universe_idx]
        report["weight_stats_initial"] = weight_group_stats(ann0.weights, flags0)
    return report
