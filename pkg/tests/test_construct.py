import os
import sys

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

sys.path.append(os.path.abspath("."))

from src.frames.construct import (
    construct,
    construct_base2,
    enumerate_triangular_solutions,
    expected_diagonal,
    orthocomplement_vector,
    uniqueness_check,
)
from src.frames.core import verify
from src.frames.errors import (
    InvalidShapeError,
    RowsNotOrthonormalError,
    SeedTooLongError,
    UnsupportedDimensionError,
)


def _random_seed(rng, n, max_norm=0.999):
    direction = rng.standard_normal(n)
    return rng.uniform(0.0, max_norm) * direction / np.linalg.norm(direction)


def test_base2_closed_forms():
    tpf = construct_base2([0.5, 0.5])
    cols = tpf.frame.columns
    np.testing.assert_allclose(cols[:, 0], [0.8164966, 0.0], atol=1e-7)
    np.testing.assert_allclose(cols[:, 1], [-0.2886751, 0.8660254], atol=1e-7)
    np.testing.assert_allclose(cols[:, 2], [0.5, 0.5])
    np.testing.assert_allclose(cols @ cols.T, np.eye(2), atol=1e-14)


def test_base2_zero_and_too_long():
    cols = construct_base2([0.0, 0.0]).frame.columns
    np.testing.assert_allclose(cols[:, :2], np.eye(2))
    with pytest.raises(SeedTooLongError):
        construct_base2([0.8, 0.6])
    with pytest.raises(InvalidShapeError):
        construct_base2([0.1, 0.2, 0.3])


def test_orthocomplement_examples():
    np.testing.assert_allclose(orthocomplement_vector(np.array([[0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])), [1.0, 0.0, 0.0])
    np.testing.assert_allclose(orthocomplement_vector(np.array([[0.0, 1.0]])), [1.0, 0.0])

    m = construct_base2([0.5, 0.5]).frame.columns
    for method in ("cofactor", "nullspace"):
        y = orthocomplement_vector(m, method=method)
        np.testing.assert_allclose(m @ y, 0.0, atol=1e-14)
        assert np.linalg.norm(y) == pytest.approx(1.0)


def test_orthocomplement_routes_agree(rng):
    for n in (3, 5, 8):
        m = construct(_random_seed(rng, n - 1)).frame.columns
        np.testing.assert_allclose(
            orthocomplement_vector(m, method="cofactor"),
            orthocomplement_vector(m, method="nullspace"),
            atol=1e-12,
        )


def test_orthocomplement_rejects_bad_tables():
    with pytest.raises(InvalidShapeError):
        orthocomplement_vector(np.eye(3))
    with pytest.raises(RowsNotOrthonormalError):
        orthocomplement_vector(np.array([[1.0, 1.0, 0.0], [0.0, 0.0, 1.0]]))


def test_construct_three_dimensional():
    tpf = construct([0.5, 0.5, 0.5])
    np.testing.assert_allclose(tpf.diagonal, [0.7071068, 0.8164966, 0.8660254], atol=1e-7)
    np.testing.assert_allclose(tpf.frame.columns[:, 3], [0.5, 0.5, 0.5])
    assert np.allclose(np.tril(tpf.basis, -1), 0.0)
    assert verify(tpf.frame, 1e-12).is_parseval
    assert [level.dimension for level in tpf.trace.levels] == [2, 3]


def test_construct_zero_seed():
    cols = construct(np.zeros(4)).frame.columns
    np.testing.assert_allclose(cols[:, :4], np.eye(4))
    np.testing.assert_allclose(cols[:, 4], 0.0)


def test_construct_matches_base2():
    np.testing.assert_allclose(construct([0.5, 0.5]).frame.columns, construct_base2([0.5, 0.5]).frame.columns)


def test_construct_rejects_short_and_long_seeds():
    with pytest.raises(InvalidShapeError):
        construct([0.5])
    with pytest.raises(SeedTooLongError) as exc:
        construct([0.6, 0.0, 0.8])
    assert exc.value.norm == pytest.approx(1.0)


def test_construct_nullspace_route_matches_cofactor():
    w = [0.1, -0.2, 0.15, 0.3, -0.05]
    np.testing.assert_allclose(
        construct(w, method="nullspace").frame.columns,
        construct(w, method="cofactor").frame.columns,
        atol=1e-12,
    )


@given(n=st.integers(min_value=2, max_value=10), seed=st.integers(min_value=0, max_value=2**32 - 1))
def test_construct_properties(n, seed):
    w = _random_seed(np.random.default_rng(seed), n)
    tpf = construct(w)
    cols = tpf.frame.columns
    np.testing.assert_allclose(cols @ cols.T, np.eye(n), atol=1e-10)
    np.testing.assert_allclose(tpf.diagonal, expected_diagonal(w), atol=1e-10)
    assert abs(np.linalg.det(tpf.basis)) == pytest.approx(np.sqrt(1.0 - w @ w), abs=1e-10)
    assert np.all(tpf.diagonal > 0)
    np.testing.assert_array_equal(cols[:, n], w)


@given(n=st.integers(min_value=2, max_value=10), seed=st.integers(min_value=0, max_value=2**32 - 1))
def test_construction_trace_levels(n, seed):
    w = _random_seed(np.random.default_rng(seed), n)
    tpf = construct(w)
    assert [level.dimension for level in tpf.trace.levels] == list(range(2, n + 1))

    for level in tpf.trace.levels:
        dim = level.dimension
        tail = w[n - dim :]
        a = tail[0]
        lam = (-1.0) ** (dim + 1) * a / np.sqrt(1.0 - tail @ tail + a * a)

        assert np.linalg.norm(level.y) == pytest.approx(1.0, abs=1e-10)
        assert abs(level.lam) < 1.0
        assert level.x1**2 + level.lam**2 == pytest.approx(1.0, abs=1e-12)
        assert level.lam == pytest.approx(lam, abs=1e-10)
        assert level.diag == pytest.approx(tpf.diagonal[n - dim], abs=1e-10)


def test_expected_diagonal_examples():
    np.testing.assert_allclose(expected_diagonal([0.5, 0.5]), [0.8164966, 0.8660254], atol=1e-7)
    np.testing.assert_allclose(expected_diagonal(np.zeros(5)), np.ones(5))
    np.testing.assert_allclose(expected_diagonal([0.0, 0.0, 0.6]), [1.0, 1.0, 0.8])


def test_degeneration_along_a_ray():
    direction = np.array([0.6, -0.5, 0.2, 0.4])
    direction /= np.linalg.norm(direction)
    previous = np.inf
    for norm in (0.5, 0.9, 0.99, 0.9999):
        a11 = construct(norm * direction).diagonal[0]
        assert a11 < previous
        previous = a11
    assert construct((1.0 - 1e-11) * direction).diagonal[0] < 1e-5


def test_uniqueness_examples():
    assert uniqueness_check([0.5, 0.5])
    assert uniqueness_check([0.3, -0.4, 0.2])
    assert uniqueness_check([0.0, 0.0])
    with pytest.raises(UnsupportedDimensionError):
        uniqueness_check([0.1, 0.1, 0.1, 0.1])


def test_uniqueness_property(rng, property_count):
    for _ in range(property_count):
        assert uniqueness_check(_random_seed(rng, int(rng.integers(2, 4))))


def test_enumeration_finds_every_sign_branch():
    solutions = list(enumerate_triangular_solutions([0.3, -0.4, 0.2]))
    assert len(solutions) == 8
    assert len(list(enumerate_triangular_solutions([0.3, -0.4, 0.2], trials=3))) == 3
