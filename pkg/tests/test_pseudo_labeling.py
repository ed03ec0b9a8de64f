import numpy as np
import pytest

from wad.errors import DimensionMismatch, EmptyPool, SingleClassPool
from wad.pseudo_labeling import (
    LabeledPool,
    assign_pseudo_label,
    assign_pseudo_labels_batch,
    similarity_profile,
)
from wad.repr_core import normalize_rows


def make_pool(embeddings, labels, k=None):
    labels = np.asarray(labels)
    return LabeledPool(
        embeddings=np.asarray(embeddings, dtype=np.float64),
        labels=labels,
        n_classes=int(labels.max()) + 1 if k is None else k,
    )


def plain_cosine(u, v):
    # left-to-right accumulation, clamped: deliberately written from scratch
    s = 0.0
    for k in range(len(u)):
        s += float(u[k]) * float(v[k])
    return min(1.0, max(-1.0, s))


def brute_force(z_u, pool):
    """Independent full-scan oracle with the same lowest-index tie rule."""
    best_idx, best_sim = 0, -np.inf
    for j in range(pool.size):
        s = plain_cosine(z_u, pool.embeddings[j])
        if s > best_sim:
            best_sim, best_idx = s, j
    label = int(pool.labels[best_idx])
    runner_up = -np.inf
    for j in range(pool.size):
        if int(pool.labels[j]) == label:
            continue
        runner_up = max(runner_up, plain_cosine(z_u, pool.embeddings[j]))
    return label, best_sim, runner_up, best_idx


def test_similarity_profile_orthonormal_pool():
    pool = make_pool([[1.0, 0.0], [0.0, 1.0]], [0, 1])
    assert np.allclose(similarity_profile(np.array([1.0, 0.0]), pool), [1.0, 0.0])
    assert np.allclose(
        similarity_profile(np.array([0.6, 0.8]), pool), [0.6, 0.8]
    )


def test_similarity_profile_errors():
    pool = make_pool([[1.0, 0.0], [0.0, 1.0]], [0, 1])
    with pytest.raises(DimensionMismatch):
        similarity_profile(np.array([1.0, 0.0, 0.0]), pool)
    with pytest.raises(EmptyPool):
        make_pool(np.empty((0, 2)), np.empty(0, dtype=int), k=2)


def test_assignment_basic():
    pool = make_pool([[1.0, 0.0], [0.0, 1.0]], [0, 1])
    a = assign_pseudo_label(np.array([0.6, 0.8]), pool)
    assert a.pseudo_label == 1
    assert a.p_tilde == pytest.approx(0.8, abs=1e-12)
    assert a.q_tilde == pytest.approx(0.6, abs=1e-12)
    assert a.argmax_index == 1


def test_assignment_identity_case():
    # z_u equal to a class-0 member, the competing class orthogonal
    pool = make_pool([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]], [0, 1])
    a = assign_pseudo_label(np.array([1.0, 0.0, 0.0]), pool)
    assert a.pseudo_label == 0
    assert a.p_tilde == pytest.approx(1.0)
    assert a.q_tilde == pytest.approx(0.0, abs=1e-12)


def test_single_class_pool_rejected():
    pool = make_pool([[1.0, 0.0], [0.6, 0.8]], [0, 0], k=1)
    with pytest.raises(SingleClassPool):
        assign_pseudo_label(np.array([1.0, 0.0]), pool)


def test_matches_brute_force_oracle():
    rng = np.random.default_rng(42)
    for _ in range(1000):
        d = int(rng.integers(2, 9))
        m = int(rng.integers(2, 51))
        k = int(rng.integers(2, min(m, 5) + 1))
        emb = normalize_rows(rng.normal(size=(m, d)))
        labels = np.concatenate(
            [np.arange(k), rng.integers(0, k, size=m - k)]
        )
        pool = make_pool(emb, labels, k)
        z_u = normalize_rows(rng.normal(size=(1, d)))[0]
        a = assign_pseudo_label(z_u, pool)
        label, p, q, idx = brute_force(z_u, pool)
        assert a.pseudo_label == label
        assert a.argmax_index == idx
        assert a.p_tilde == p
        assert a.q_tilde == q
        assert a.q_tilde <= a.p_tilde


def test_tie_breaks_to_lowest_index():
    # duplicate winning embedding under two different labels
    pool = make_pool([[1.0, 0.0], [1.0, 0.0], [0.0, 1.0]], [1, 0, 1])
    a = assign_pseudo_label(np.array([1.0, 0.0]), pool)
    assert a.argmax_index == 0
    assert a.pseudo_label == 1


def test_argmax_invariant_under_monotone_transforms():
    rng = np.random.default_rng(7)
    pool = make_pool(
        normalize_rows(rng.normal(size=(30, 6))), rng.integers(0, 3, 30), 3
    )
    for _ in range(50):
        z_u = normalize_rows(rng.normal(size=(1, 6)))[0]
        a = assign_pseudo_label(z_u, pool)
        sims = similarity_profile(z_u, pool)
        for f in (lambda x: 2 * x + 1, np.exp, lambda x: x**3):
            assert int(np.argmax(f(sims))) == a.argmax_index


def test_pool_permutation_changes_only_argmax_index():
    rng = np.random.default_rng(8)
    emb = normalize_rows(rng.normal(size=(25, 5)))
    labels = rng.integers(0, 3, 25)
    pool = make_pool(emb, labels, 3)
    for _ in range(50):
        z_u = normalize_rows(rng.normal(size=(1, 5)))[0]
        base = assign_pseudo_label(z_u, pool)
        sims = similarity_profile(z_u, pool)
        if np.sum(sims == sims.max()) > 1:
            continue  # the guarantee only covers a unique maximum
        perm = rng.permutation(25)
        shuffled = make_pool(emb[perm], labels[perm], 3)
        moved = assign_pseudo_label(z_u, shuffled)
        assert moved.pseudo_label == base.pseudo_label
        assert moved.p_tilde == base.p_tilde
        assert moved.q_tilde == base.q_tilde
        assert perm[moved.argmax_index] == base.argmax_index


def test_batch_agrees_with_single():
    rng = np.random.default_rng(9)
    pool = make_pool(
        normalize_rows(rng.normal(size=(40, 4))), rng.integers(0, 4, 40), 4
    )
    batch = normalize_rows(rng.normal(size=(64, 4)))
    labels, p, q, idx = assign_pseudo_labels_batch(batch, pool)
    for i in range(64):
        a = assign_pseudo_label(batch[i], pool)
        assert (a.pseudo_label, a.argmax_index) == (labels[i], idx[i])
        assert a.p_tilde == p[i] and a.q_tilde == q[i]
