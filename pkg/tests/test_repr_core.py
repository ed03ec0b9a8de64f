import numpy as np
import pytest

from wad.errors import DimensionMismatch, ZeroVector
from wad.repr_core import (
    cosine,
    cosine_matrix,
    is_unit,
    normalize,
    normalize_rows,
    require_unit_rows,
)


def test_normalize_34():
    assert np.allclose(normalize([3.0, 4.0]), [0.6, 0.8])


def test_normalize_already_unit():
    assert np.allclose(normalize([1.0, 0.0]), [1.0, 0.0])


def test_normalize_zero_vector_rejected():
    with pytest.raises(ZeroVector):
        normalize([0.0, 0.0])
    with pytest.raises(ZeroVector):
        normalize([1e-13, 0.0])


def test_normalize_idempotent():
    rng = np.random.default_rng(0)
    for _ in range(100):
        v = rng.normal(size=rng.integers(1, 9))
        once = normalize(v)
        assert np.linalg.norm(normalize(once) - once) < 1e-6


def test_normalize_rows_matches_single():
    rng = np.random.default_rng(1)
    m = rng.normal(size=(20, 5))
    rows = normalize_rows(m)
    for i in range(20):
        assert np.allclose(rows[i], normalize(m[i]))
    with pytest.raises(ZeroVector):
        normalize_rows(np.vstack([m, np.zeros(5)]))


def test_cosine_trivial_cases():
    assert cosine([1.0, 0.0], [1.0, 0.0]) == 1.0
    assert cosine([1.0, 0.0], [0.0, 1.0]) == 0.0
    assert cosine([0.6, 0.8], [1.0, 0.0]) == pytest.approx(0.6, abs=1e-12)


def test_cosine_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        cosine([1.0, 0.0], [1.0, 0.0, 0.0])
    with pytest.raises(DimensionMismatch):
        cosine_matrix(np.eye(3), np.eye(2))


def test_cosine_symmetry_and_bounds():
    rng = np.random.default_rng(2)
    for _ in range(300):
        d = int(rng.integers(2, 10))
        a = normalize(rng.normal(size=d))
        b = normalize(rng.normal(size=d))
        ab = cosine(a, b)
        assert ab == cosine(b, a)
        assert abs(ab) <= 1.0
        assert abs(cosine(a, a) - 1.0) <= 1e-6


def test_cosine_matrix_agrees_with_scalar():
    rng = np.random.default_rng(3)
    a = normalize_rows(rng.normal(size=(7, 4)))
    b = normalize_rows(rng.normal(size=(5, 4)))
    m = cosine_matrix(a, b)
    assert m.shape == (7, 5)
    for i in range(7):
        for j in range(5):
            assert m[i, j] == pytest.approx(cosine(a[i], b[j]), abs=1e-12)
    assert np.all(np.abs(m) <= 1.0)


def test_unit_validation_helpers():
    assert is_unit(np.array([0.6, 0.8]))
    assert not is_unit(np.array([0.6, 0.9]))
    require_unit_rows(np.array([[1.0, 0.0], [0.6, 0.8]]))
    with pytest.raises(ZeroVector):
        require_unit_rows(np.array([[1.0, 0.5]]))
