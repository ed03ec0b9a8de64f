"""The trainable target classifier: a small feed-forward softmax network.

The network consumes representation-space vectors, so it stays deliberately
small (default: one hidden layer of 64 units). Gradients are derived
analytically and parameters are updated with an adaptive-moment optimizer
(bias-corrected first/second moments). Training-time augmentation is plain
Gaussian input noise.

The combined objective is the sum of a labeled term and a weighted
unlabeled term, each a mean over its own batch:

    L = mean_l CE(h(x), y) + mean_u w * CE(h(x), y_hat)

A missing side simply contributes zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DimensionMismatch,
    EmptyTestSet,
    LabelOutOfRange,
    NonFiniteGradient,
)

PROB_CLAMP = 1e-12  # floor on probabilities before log; bounds the loss

_ACTIVATIONS = ("relu", "tanh")


@dataclass
class TrainConfig:
    learning_rate: float = 5e-4
    batch_size: int = 32
    epochs: int = 100
    input_noise_std: float = 0.15
    seed: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    adam_eps: float = 1e-8
    hidden_widths: tuple[int, ...] = (64,)
    activation: str = "relu"

    def __post_init__(self):
        # learning_rate 0 is tolerated here so a no-op step can be exercised;
        # the CLI config validator insists on > 0.
        if self.learning_rate < 0:
            raise ValueError("learning_rate must be >= 0")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if self.input_noise_std < 0:
            raise ValueError("input_noise_std must be >= 0")
        if self.activation not in _ACTIVATIONS:
            raise ValueError(f"activation must be one of {_ACTIVATIONS}")
        self.hidden_widths = tuple(int(w) for w in self.hidden_widths)


@dataclass
class StudentParams:
    """Layer parameters plus optimizer state.

    weights[l] has shape (out, in); biases[l] has shape (out,). The moment
    buffers mirror the parameter shapes; step counts completed optimizer steps.
    """

    weights: list[np.ndarray]
    biases: list[np.ndarray]
    activation: str = "relu"
    m_w: list[np.ndarray] = field(default_factory=list)
    v_w: list[np.ndarray] = field(default_factory=list)
    m_b: list[np.ndarray] = field(default_factory=list)
    v_b: list[np.ndarray] = field(default_factory=list)
    step: int = 0

    def __post_init__(self):
        if self.activation not in _ACTIVATIONS:
            raise ValueError(f"activation must be one of {_ACTIVATIONS}")
        if not self.m_w:
            self.m_w = [np.zeros_like(w) for w in self.weights]
            self.v_w = [np.zeros_like(w) for w in self.weights]
            self.m_b = [np.zeros_like(b) for b in self.biases]
            self.v_b = [np.zeros_like(b) for b in self.biases]

    @property
    def input_dim(self) -> int:
        return int(self.weights[0].shape[1])

    @property
    def n_classes(self) -> int:
        return int(self.weights[-1].shape[0])

    def copy(self) -> "StudentParams":
        return StudentParams(
            weights=[w.copy() for w in self.weights],
            biases=[b.copy() for b in self.biases],
            activation=self.activation,
            m_w=[m.copy() for m in self.m_w],
            v_w=[v.copy() for v in self.v_w],
            m_b=[m.copy() for m in self.m_b],
            v_b=[v.copy() for v in self.v_b],
            step=self.step,
        )


def init_student(
    input_dim: int,
    hidden_widths: tuple[int, ...],
    n_classes: int,
    activation: str = "relu",
    rng: np.random.Generator | None = None,
) -> StudentParams:
    """Create a fresh student [input_dim -> hidden... -> n_classes].

    He initialization for relu, Xavier for tanh; biases start at zero.
    """
    if rng is None:
        rng = np.random.default_rng(0)
    sizes = [int(input_dim), *[int(h) for h in hidden_widths], int(n_classes)]
    weights, biases = [], []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        gain = 2.0 if activation == "relu" else 1.0
        std = math.sqrt(gain / fan_in)
        weights.append(rng.normal(0.0, std, size=(fan_out, fan_in)))
        biases.append(np.zeros(fan_out))
    return StudentParams(weights=weights, biases=biases, activation=activation)


def _activate(z: np.ndarray, tag: str) -> np.ndarray:
    if tag == "relu":
        return np.maximum(z, 0.0)
    return np.tanh(z)


def _activate_grad(z: np.ndarray, tag: str) -> np.ndarray:
    if tag == "relu":
        return (z > 0.0).astype(np.float64)
    t = np.tanh(z)
    return 1.0 - t * t


def _softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - np.max(logits, axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / np.sum(e, axis=1, keepdims=True)


def _forward_cached(params: StudentParams, x2d: np.ndarray):
    """Forward pass keeping pre-activations and activations for backprop."""
    acts = [x2d]
    pre = []
    a = x2d
    n_layers = len(params.weights)
    for l, (w, b) in enumerate(zip(params.weights, params.biases)):
        z = a @ w.T + b
        pre.append(z)
        a = _activate(z, params.activation) if l < n_layers - 1 else z
        acts.append(a)
    probs = _softmax(acts[-1])
    return probs, pre, acts


def forward(params: StudentParams, x: np.ndarray) -> np.ndarray:
    """Class probabilities for a single vector (d,) or a batch (B, d)."""
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    x2d = x[None, :] if single else x
    if x2d.shape[1] != params.input_dim:
        raise DimensionMismatch(
            f"input dim {x2d.shape[1]} vs network dim {params.input_dim}"
        )
    probs, _, _ = _forward_cached(params, x2d)
    return probs[0] if single else probs


def cross_entropy(probs: np.ndarray, label: int) -> float:
    """-log p[label] with the probability floored at 1e-12."""
    probs = np.asarray(probs, dtype=np.float64)
    if not 0 <= label < probs.shape[-1]:
        raise LabelOutOfRange(f"label {label} outside [0, {probs.shape[-1]})")
    return float(-np.log(max(float(probs[label]), PROB_CLAMP)))


def _ce_batch(probs: np.ndarray, labels: np.ndarray) -> np.ndarray:
    if labels.size and (labels.min() < 0 or labels.max() >= probs.shape[1]):
        bad = labels[(labels < 0) | (labels >= probs.shape[1])][0]
        raise LabelOutOfRange(f"label {bad} outside [0, {probs.shape[1]})")
    picked = probs[np.arange(len(labels)), labels]
    return -np.log(np.maximum(picked, PROB_CLAMP))


def _sides(labeled_batch, unlabeled_batch, input_dim: int):
    """Yield (X, labels, per-sample loss coefficients) per non-empty side.

    The two sides are kept as separate matrices on purpose: the labeled
    term of a run that ignores unlabeled data must be computed by the very
    same array operations, so that its loss trajectory stays bit-identical
    to a run whose unlabeled weights are all zero.
    """
    out = []
    if labeled_batch is not None:
        xl, yl = labeled_batch
        xl = np.asarray(xl, dtype=np.float64)
        if len(xl):
            coeff = np.full(len(xl), 1.0 / len(xl))
            out.append((xl, np.asarray(yl, dtype=np.int64), coeff))
    if unlabeled_batch is not None:
        xu, yu, wu = unlabeled_batch
        xu = np.asarray(xu, dtype=np.float64)
        if len(xu):
            coeff = np.asarray(wu, dtype=np.float64) / len(xu)
            out.append((xu, np.asarray(yu, dtype=np.int64), coeff))
    for x, _, _ in out:
        if x.ndim != 2 or x.shape[1] != input_dim:
            raise DimensionMismatch(
                f"input dim {x.shape[1:]} vs network dim {input_dim}"
            )
    return out


def wad_loss(params: StudentParams, labeled_batch=None, unlabeled_batch=None) -> float:
    """Labeled mean CE plus weighted unlabeled mean CE (missing side = 0)."""
    loss = 0.0
    for x, labels, coeffs in _sides(labeled_batch, unlabeled_batch, params.input_dim):
        probs, _, _ = _forward_cached(params, x)
        loss += float(np.sum(coeffs * _ce_batch(probs, labels)))
    return loss


def wad_loss_and_grads(
    params: StudentParams, labeled_batch=None, unlabeled_batch=None
):
    """Loss plus analytic gradients d loss / d (weights, biases)."""
    total = 0.0
    grads_w = None
    grads_b = None
    for x, labels, coeffs in _sides(labeled_batch, unlabeled_batch, params.input_dim):
        probs, pre, acts = _forward_cached(params, x)
        total += float(np.sum(coeffs * _ce_batch(probs, labels)))

        # d CE / d logits = probs - onehot, except where the picked
        # probability was clamped: there the loss is locally constant and
        # the sample contributes no gradient.
        rows = np.arange(len(labels))
        delta = probs.copy()
        delta[rows, labels] -= 1.0
        clamped = probs[rows, labels] <= PROB_CLAMP
        delta[clamped] = 0.0
        delta *= coeffs[:, None]

        side_w = [np.empty(0)] * len(params.weights)
        side_b = [np.empty(0)] * len(params.biases)
        for l in range(len(params.weights) - 1, -1, -1):
            side_w[l] = delta.T @ acts[l]
            side_b[l] = delta.sum(axis=0)
            if l > 0:
                delta = (delta @ params.weights[l]) * _activate_grad(
                    pre[l - 1], params.activation
                )
        if grads_w is None:
            grads_w, grads_b = side_w, side_b
        else:
            grads_w = [a + b for a, b in zip(grads_w, side_w)]
            grads_b = [a + b for a, b in zip(grads_b, side_b)]
    if grads_w is None:
        grads_w = [np.zeros_like(w) for w in params.weights]
        grads_b = [np.zeros_like(b) for b in params.biases]
    return total, grads_w, grads_b


def adam_update(
    value: np.ndarray,
    grad: np.ndarray,
    m: np.ndarray,
    v: np.ndarray,
    step: int,
    config: TrainConfig,
):
    """One bias-corrected adaptive-moment update; returns (value, m, v)."""
    m = config.beta1 * m + (1.0 - config.beta1) * grad
    v = config.beta2 * v + (1.0 - config.beta2) * grad * grad
    m_hat = m / (1.0 - config.beta1**step)
    v_hat = v / (1.0 - config.beta2**step)
    value = value - config.learning_rate * m_hat / (np.sqrt(v_hat) + config.adam_eps)
    return value, m, v


def train_step(
    params: StudentParams,
    labeled_batch,
    unlabeled_batch,
    config: TrainConfig,
    rng: np.random.Generator | None = None,
    unlabeled_rng: np.random.Generator | None = None,
) -> tuple[StudentParams, float]:
    """One optimizer step on the combined loss with Gaussian input noise.

    Noise for the labeled and unlabeled sides is drawn from separate
    generators so a run that never touches unlabeled data consumes an
    identical labeled stream. Returns fresh params; the input is untouched.
    """
    if rng is None:
        rng = np.random.default_rng(config.seed)
    if unlabeled_rng is None:
        unlabeled_rng = rng

    if labeled_batch is not None and len(labeled_batch[0]):
        xl, yl = labeled_batch
        xl = np.asarray(xl, dtype=np.float64)
        if config.input_noise_std > 0:
            xl = xl + rng.normal(0.0, config.input_noise_std, size=xl.shape)
        labeled_batch = (xl, yl)
    if unlabeled_batch is not None and len(unlabeled_batch[0]):
        xu, yu, wu = unlabeled_batch
        xu = np.asarray(xu, dtype=np.float64)
        if config.input_noise_std > 0:
            xu = xu + unlabeled_rng.normal(
                0.0, config.input_noise_std, size=xu.shape
            )
        unlabeled_batch = (xu, yu, wu)

    loss, grads_w, grads_b = wad_loss_and_grads(params, labeled_batch, unlabeled_batch)
    for g in (*grads_w, *grads_b):
        if not np.all(np.isfinite(g)):
            raise NonFiniteGradient(
                f"non-finite gradient at step {params.step + 1} (loss {loss})"
            )

    step = params.step + 1
    new_w, new_b = [], []
    new_mw, new_vw, new_mb, new_vb = [], [], [], []
    for l in range(len(params.weights)):
        w, mw, vw = adam_update(
            params.weights[l], grads_w[l], params.m_w[l], params.v_w[l], step, config
        )
        b, mb, vb = adam_update(
            params.biases[l], grads_b[l], params.m_b[l], params.v_b[l], step, config
        )
        new_w.append(w)
        new_b.append(b)
        new_mw.append(mw)
        new_vw.append(vw)
        new_mb.append(mb)
        new_vb.append(vb)

    out = StudentParams(
        weights=new_w,
        biases=new_b,
        activation=params.activation,
        m_w=new_mw,
        v_w=new_vw,
        m_b=new_mb,
        v_b=new_vb,
        step=step,
    )
    for t in (*out.weights, *out.biases):
        if not np.all(np.isfinite(t)):
            raise NonFiniteGradient(f"non-finite parameters after step {step}")
    return out, loss


def evaluate(params: StudentParams, x: np.ndarray, y: np.ndarray) -> float:
    """Fraction of argmax-correct predictions (ties -> lowest class id)."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if len(x) == 0:
        raise EmptyTestSet("evaluation requires at least one instance")
    probs = forward(params, x)
    pred = np.argmax(probs, axis=1)
    return float(np.mean(pred == y))
