import os
import sys

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

sys.path.append(os.path.abspath("."))

from src.frames.construct import construct
from src.frames.core import gram_and_angles, normalize_columns, random_parseval, scale_columns, verify
from src.frames.errors import (
    DegeneratePairError,
    NotUnitNormError,
    ShapeMismatchError,
    TrivialFrameError,
    WrongCountError,
)
from src.frames.models import AngleTable, FrameMatrix, ScalabilityReason, ScalingWeights
from src.frames.scaling import (
    closed_form_weights,
    decide_scalability,
    length_bounds_check,
    oracle_scale,
    pair_identity_residual,
    ratio_consistency,
    sign_pattern_consistent,
)


def _normalized_construction():
    frame = construct([0.5, 0.5]).frame
    return normalize_columns(frame)


def test_closed_form_mercedes(unit_mercedes):
    angles = gram_and_angles(unit_mercedes)
    for i in range(3):
        assert closed_form_weights(angles, i) == pytest.approx(2.0 / 3.0, abs=1e-14)


def test_closed_form_orthonormal_pair(orthonormal_pair_frame):
    assert closed_form_weights(gram_and_angles(orthonormal_pair_frame), 0) == pytest.approx(1.0)


def test_closed_form_degenerate_pair():
    # three mutually orthogonal vectors: every denominator vanishes
    angles = AngleTable.from_angles(np.full((3, 3), np.pi / 2) - np.diag(np.full(3, np.pi / 2)))
    with pytest.raises(DegeneratePairError):
        closed_form_weights(angles, 0)


def test_pair_identity_residual_examples(unit_mercedes):
    angles = gram_and_angles(unit_mercedes)
    assert pair_identity_residual(ScalingWeights.from_squares([2 / 3] * 3), angles) == pytest.approx(0.0, abs=1e-15)
    assert pair_identity_residual(ScalingWeights(np.ones(3)), angles) == pytest.approx(0.25)

    unit, lengths = _normalized_construction()
    assert pair_identity_residual(ScalingWeights(lengths), gram_and_angles(unit)) <= 1e-12

    with pytest.raises(ShapeMismatchError):
        pair_identity_residual(ScalingWeights(np.ones(2)), angles)


def test_ratio_consistency_examples(unit_mercedes, tetrahedral_frame, rng):
    assert ratio_consistency(gram_and_angles(unit_mercedes)).max_spread == pytest.approx(0.0, abs=1e-15)

    q, _ = np.linalg.qr(rng.standard_normal((3, 3)))
    unit, _ = normalize_columns(random_parseval(3, 4, 3))
    assert ratio_consistency(gram_and_angles(FrameMatrix(q @ unit.columns))).max_spread <= 1e-10

    theta = np.array(gram_and_angles(tetrahedral_frame).theta)
    theta[0, 1] += 0.1
    theta[1, 0] += 0.1
    assert ratio_consistency(AngleTable.from_angles(theta)).max_spread > 1e-3


def test_sign_pattern():
    consistent = np.array([[1.0, -0.5, -0.5], [-0.5, 1.0, -0.5], [-0.5, -0.5, 1.0]])
    assert sign_pattern_consistent(consistent)
    # all positive cosines need s_i s_j = -1 on every pair of a triangle
    assert not sign_pattern_consistent(np.array([[1.0, 0.5, 0.5], [0.5, 1.0, 0.5], [0.5, 0.5, 1.0]]))


def test_length_bounds_examples():
    assert length_bounds_check(ScalingWeights.from_squares([2 / 3] * 3))
    assert not length_bounds_check(ScalingWeights(np.array([0.25, 0.9, 0.9])))
    assert length_bounds_check(ScalingWeights.from_squares([2 / 3, 5 / 6, 1 / 2]))
    assert not length_bounds_check(ScalingWeights.from_squares([0.5, 0.5, 0.9]))


def test_length_bounds_small_seed_vector():
    frame = construct([0.1, 0.1]).frame
    squares = frame.lengths() ** 2
    assert verify(frame).is_parseval and frame.is_nontrivial()
    assert squares[2] == pytest.approx(0.02)
    assert length_bounds_check(ScalingWeights(frame.lengths()))


def test_decide_mercedes(unit_mercedes):
    verdict = decide_scalability(unit_mercedes)
    assert verdict.scalable
    np.testing.assert_allclose(verdict.weights, np.sqrt(2.0 / 3.0), atol=1e-12)
    assert verdict.reason is None


def test_decide_orthonormal_pair(orthonormal_pair_frame):
    verdict = decide_scalability(orthonormal_pair_frame)
    assert not verdict.scalable
    assert verdict.reason == ScalabilityReason.CONTAINS_ORTHONORMAL_PAIR
    assert verdict.weights is None

    spatial = FrameMatrix.from_vectors(
        [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], np.array([1.0, 1.0, 1.0]) / np.sqrt(3.0), np.array([1.0, -1.0, 1.0]) / np.sqrt(3.0)]
    )
    assert decide_scalability(spatial).reason == ScalabilityReason.CONTAINS_ORTHONORMAL_PAIR


def test_decide_accepts_near_unit_weight():
    frame = random_parseval(3, 4, seed=int(np.random.default_rng([1, 1537]).integers(2**32)))
    assert verify(frame, 1e-12).is_parseval
    lengths = frame.lengths()
    # one vector within about 5e-10 of unit length, so its cosines are of order 3e-5
    assert np.min(1.0 - lengths**2) < 1e-8

    unit, _ = normalize_columns(frame)
    verdict = decide_scalability(unit)
    assert verdict.scalable, verdict.reason
    np.testing.assert_allclose(verdict.weights, lengths, atol=1e-6)
    assert oracle_scale(unit) is not None


def test_decide_recovers_construction_lengths():
    unit, lengths = _normalized_construction()
    verdict = decide_scalability(unit)
    assert verdict.scalable
    np.testing.assert_allclose(verdict.weights, lengths, atol=1e-8)
    np.testing.assert_allclose(lengths, [0.8164966, 0.9128709, 0.7071068], atol=1e-7)


def test_decide_sign_pattern_inconsistent():
    # unit vectors inside a 60 degree cone: every cosine is positive, yet the
    # candidate weights (2/3, 2/5, 2/3) satisfy every pair identity
    phis = np.array([0.0, np.pi / 6, np.pi / 3])
    frame = FrameMatrix.from_vectors(np.stack([np.cos(phis), np.sin(phis)], axis=1))
    verdict = decide_scalability(frame)
    assert not verdict.scalable
    assert verdict.reason == ScalabilityReason.SIGN_PATTERN_INCONSISTENT
    np.testing.assert_allclose(verdict.candidate_squares, [2 / 3, 2 / 5, 2 / 3], atol=1e-12)
    assert verdict.max_identity_residual <= 1e-12
    assert oracle_scale(frame) is None


def test_decide_preconditions(unit_mercedes):
    with pytest.raises(WrongCountError):
        decide_scalability(random_parseval(2, 5, 0))
    with pytest.raises(NotUnitNormError):
        decide_scalability(construct([0.5, 0.5]).frame)
    with pytest.raises(TrivialFrameError):
        decide_scalability(FrameMatrix.from_vectors([[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0]]))


def test_decide_tetrahedral(tetrahedral_frame):
    verdict = decide_scalability(tetrahedral_frame)
    assert verdict.scalable
    np.testing.assert_allclose(np.asarray(verdict.weights) ** 2, 0.75, atol=1e-12)


@given(n=st.integers(min_value=2, max_value=8), seed=st.integers(min_value=0, max_value=2**32 - 1))
def test_decide_round_trip(n, seed):
    frame = random_parseval(n, n + 1, seed)
    unit, lengths = normalize_columns(frame)
    verdict = decide_scalability(unit)
    assert verdict.scalable, verdict.reason
    np.testing.assert_allclose(verdict.weights, lengths, atol=1e-8)
    assert verify(scale_columns(unit, np.asarray(verdict.weights)), 1e-8).is_parseval
    assert float(np.sum(np.asarray(verdict.weights) ** 2)) == pytest.approx(n, abs=1e-9)
    assert length_bounds_check(verdict.scaling_weights)


def test_oracle_examples(unit_mercedes, orthonormal_pair_frame):
    weights = oracle_scale(unit_mercedes)
    assert weights is not None
    np.testing.assert_allclose(weights.squared, 2.0 / 3.0, atol=1e-9)
    assert oracle_scale(orthonormal_pair_frame) is None


def test_oracle_matches_closed_form(rng, property_count):
    for k in range(property_count):
        n = 2 + k % 4
        unit, _ = normalize_columns(random_parseval(n, n + 1, int(rng.integers(2**32))))
        verdict = decide_scalability(unit)
        oracle = oracle_scale(unit)
        assert oracle is not None
        np.testing.assert_allclose(oracle.weights, verdict.weights, atol=1e-6)


def test_oracle_rejects_generic_frames_in_r3(rng):
    for _ in range(10):
        vectors = rng.standard_normal((4, 3))
        frame = FrameMatrix.from_vectors(vectors / np.linalg.norm(vectors, axis=1, keepdims=True))
        assert oracle_scale(frame) is None
        assert not decide_scalability(frame).scalable
