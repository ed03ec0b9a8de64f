"""Per-instance distillation weights from the (p_tilde, q_tilde) pair.

w = g1(p) * g2(1 - q/p) with monotone increasing component functions.
High p (strong affinity to some target class) and low q/p (a clear winner
over the runner-up class) both push the weight up; ambiguous or unrelated
instances are pushed toward zero. With identity components the weight
reduces algebraically to p - q.

Weights are not clamped to [0, 1]: q may be negative, so identity
components give w in [0, 2].
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidPair

# Below this maximum similarity the instance has no positive association
# with any target class and the ratio q/p is meaningless; weight is 0.
P_TILDE_EPS = 1e-6

_G_FUNCTIONS = {
    "identity": lambda x: x,
    "exp": np.exp,
}


@dataclass(frozen=True)
class WeightFunctionSpec:
    """Tags naming the monotone components g1 and g2 (identity | exp)."""

    g1: str = "identity"
    g2: str = "identity"

    def __post_init__(self):
        for tag in (self.g1, self.g2):
            if tag not in _G_FUNCTIONS:
                raise ValueError(f"unknown weight function tag {tag!r}")


def compute_weight(
    p_tilde: float, q_tilde: float, spec: WeightFunctionSpec = WeightFunctionSpec()
) -> float:
    """Evaluate the weight for one (p_tilde, q_tilde) pair."""
    if q_tilde > p_tilde + 1e-9:
        raise InvalidPair(f"q_tilde {q_tilde} exceeds p_tilde {p_tilde}")
    return float(
        compute_weights_batch(
            np.asarray([p_tilde]), np.asarray([q_tilde]), spec
        )[0]
    )


def compute_weights_batch(
    p_tilde: np.ndarray,
    q_tilde: np.ndarray,
    spec: WeightFunctionSpec = WeightFunctionSpec(),
) -> np.ndarray:
    """Vectorized weight evaluation; pairs with p_tilde <= eps get weight 0."""
    p = np.asarray(p_tilde, dtype=np.float64)
    q = np.asarray(q_tilde, dtype=np.float64)
    if np.any(q > p + 1e-9):
        bad = int(np.argmax(q - p))
        raise InvalidPair(f"q_tilde {q[bad]} exceeds p_tilde {p[bad]} at index {bad}")
    g1 = _G_FUNCTIONS[spec.g1]
    g2 = _G_FUNCTIONS[spec.g2]
    positive = p > P_TILDE_EPS
    safe_p = np.where(positive, p, 1.0)
    w = g1(p) * g2(1.0 - q / safe_p)
    return np.where(positive, w, 0.0)
