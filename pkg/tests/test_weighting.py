import numpy as np
import pytest

from wad.errors import InvalidPair
from wad.weighting import WeightFunctionSpec, compute_weight, compute_weights_batch


def test_examples():
    assert compute_weight(1.0, 0.0) == pytest.approx(1.0, abs=1e-12)
    assert compute_weight(0.8, 0.6) == pytest.approx(0.2, abs=1e-12)
    assert compute_weight(0.5, 0.5) == pytest.approx(0.0, abs=1e-12)


def test_identity_reduces_to_difference():
    rng = np.random.default_rng(0)
    q = rng.uniform(-1.0, 1.0, size=10_000)
    p = q + rng.uniform(0.0, 1.0, size=10_000)
    p = np.clip(p, 1e-3, 1.0)
    q = np.minimum(q, p)
    w = compute_weights_batch(p, q)
    assert np.max(np.abs(w - (p - q))) < 1e-9


def test_monotone_decreasing_in_q():
    rng = np.random.default_rng(1)
    for spec in (WeightFunctionSpec(), WeightFunctionSpec("exp", "exp"),
                 WeightFunctionSpec("identity", "exp")):
        for _ in range(200):
            p = rng.uniform(0.05, 1.0)
            q1, q2 = sorted(rng.uniform(-1.0, p, size=2))
            assert compute_weight(p, q1, spec) >= compute_weight(p, q2, spec)


def test_zero_at_ambiguity_boundary():
    rng = np.random.default_rng(2)
    for _ in range(100):
        p = rng.uniform(0.01, 1.0)
        assert compute_weight(p, p) == pytest.approx(0.0, abs=1e-12)


def test_nonpositive_p_gives_zero_weight():
    assert compute_weight(0.0, -0.5) == 0.0
    assert compute_weight(1e-7, -0.5) == 0.0
    assert compute_weight(-0.2, -0.9) == 0.0


def test_exp_components_direct_evaluation():
    spec = WeightFunctionSpec("exp", "exp")
    p, q = 0.8, 0.6
    assert compute_weight(p, q, spec) == pytest.approx(
        np.exp(p) * np.exp(1.0 - q / p), rel=1e-12
    )


def test_invalid_pair_rejected():
    with pytest.raises(InvalidPair):
        compute_weight(0.5, 0.7)
    with pytest.raises(InvalidPair):
        compute_weights_batch(np.array([0.5, 0.9]), np.array([0.4, 0.95]))


def test_unknown_tag_rejected():
    with pytest.raises(ValueError):
        WeightFunctionSpec("identity", "sqrt")


def test_weights_bounded_for_identity():
    rng = np.random.default_rng(3)
    q = rng.uniform(-1.0, 1.0, size=5000)
    p = np.clip(q + rng.uniform(0.0, 2.0, size=5000), -1.0, 1.0)
    w = compute_weights_batch(p, q)
    assert np.all(w >= 0.0)
    assert np.all(w <= 2.0 + 1e-12)


def test_mean_weight_separates_groups_on_synth_defaults():
    from wad.curriculum import annotate
    from wad.synth_data import ScenarioConfig, generate

    state = generate(ScenarioConfig(seed=5))
    ann = annotate(state, WeightFunctionSpec())
    flags = state.is_target[ann.universe_idx]
    mean_target = ann.weights[flags == 1].mean()
    mean_unknown = ann.weights[flags == 0].mean()
    assert mean_unknown < mean_target
