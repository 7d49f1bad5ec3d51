"""Scalability of unit-norm (n+1)-frames in R^n."""
from __future__ import annotations

import itertools
import logging
from typing import Optional

import numpy as np

from src.frames.core import DEFAULT_TOL, gram_and_angles, scale_columns, verify
from src.frames.errors import (
    DegeneratePairError,
    InvalidShapeError,
    NotUnitNormError,
    ShapeMismatchError,
    TrivialFrameError,
    WrongCountError,
)
from src.frames.models import (
    AngleTable,
    FrameMatrix,
    RatioReport,
    ScalabilityReason,
    ScalabilityVerdict,
    ScalingWeights,
)

logger = logging.getLogger(__name__)

ADMISSIBLE_DENOMINATOR = 1e-14
UNIT_NORM_TOL = 1e-10
BOUNDARY_TOL = 1e-12

ORACLE_MAX_ITER = 10_000
ORACLE_STEP_TOL = 1e-12
ORACLE_THRESHOLD = 1e-9


def _pairs_excluding(count: int, i: int):
    return itertools.combinations([x for x in range(count) if x != i], 2)


def _ratio(c: np.ndarray, i: int, j: int, k: int) -> tuple[float, float]:
    """Numerator and denominator of |cos t_kj| / (|cos t_kj| + |cos t_ki cos t_ji|)."""
    num = c[k, j]
    return num, num + c[k, i] * c[j, i]


def closed_form_weights(angles: AngleTable, i: int) -> float:
    """ell_i^2 from the lexicographically smallest admissible pair (j, k)."""
    if angles.N < 3:
        raise InvalidShapeError(f"Closed-form weights need at least 3 vectors, got {angles.N}")
    c = np.abs(angles.cosines)
    for j, k in _pairs_excluding(angles.N, i):
        num, denom = _ratio(c, i, j, k)
        if denom > ADMISSIBLE_DENOMINATOR:
            return float(num / denom)
    raise DegeneratePairError(i)


def ratio_consistency(angles: AngleTable) -> RatioReport:
    if angles.N < 3:
        raise InvalidShapeError(f"Ratio consistency needs N >= 3, got {angles.N}")
    c = np.abs(angles.cosines)
    spreads: list[float] = []
    degenerate: list[int] = []
    for i in range(angles.N):
        values = []
        for j, k in _pairs_excluding(angles.N, i):
            num, denom = _ratio(c, i, j, k)
            if denom > ADMISSIBLE_DENOMINATOR:
                values.append(num / denom)
        if not values:
            degenerate.append(i)
            spreads.append(0.0)
            continue
        spreads.append(float(max(values) - min(values)))
    if degenerate:
        logger.debug(f"Indices without admissible pairs: {degenerate}")
    return RatioReport(max_spread=max(spreads), spreads=spreads, degenerate_indices=degenerate)


def _identity_residual(squares: np.ndarray, cosines: np.ndarray) -> float:
    one_minus = 1.0 - squares
    residual = np.abs(np.outer(one_minus, one_minus) - np.outer(squares, squares) * cosines**2)
    np.fill_diagonal(residual, 0.0)
    return float(np.max(residual))


def pair_identity_residual(weights: ScalingWeights, angles: AngleTable) -> float:
    """max over i < j of |(1 - l_i^2)(1 - l_j^2) - l_i^2 l_j^2 cos^2 t_ij|."""
    if len(weights) != angles.N:
        raise ShapeMismatchError(f"{len(weights)} weights for {angles.N} vectors")
    return _identity_residual(weights.squared, angles.cosines)


def sign_pattern_consistent(cosines: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    """
    Whether signs s exist with s_i s_j = -sign(cos t_ij) on every pair with
    |cos t_ij| > tol, i.e. whether the lifted vectors (s_i sqrt(1 - l_i^2), l_i v_i)
    can be pairwise orthogonal.
    """
    count = cosines.shape[0]
    signs = np.zeros(count)
    for start in range(count):
        if signs[start]:
            continue
        signs[start] = 1.0
        stack = [start]
        while stack:
            i = stack.pop()
            for j in range(count):
                if j == i or abs(cosines[i, j]) <= tol:
                    continue
                want = -signs[i] * np.sign(cosines[i, j])
                if signs[j] == 0:
                    signs[j] = want
                    stack.append(j)
                elif signs[j] != want:
                    return False
    return True


def length_bounds_check(weights: ScalingWeights, tol: float = BOUNDARY_TOL) -> bool:
    """
    l_i^2 + l_j^2 >= 1 for every pair i != j, hence l_j^2 <= 1/2 for at most
    one j (the boundary value counts as that exception).

    The pair bound is what the identity (1 - l_i^2)(1 - l_j^2) = l_i^2 l_j^2 cos^2
    forces. A uniform lower bound 1/(n+1) does not hold: the triangular frame
    of the seed (0.1, 0.1) is Parseval and nontrivial with l_3^2 = 0.02.
    """
    squares = weights.squared
    if squares.size < 2:
        return False
    pair_sums = squares[:, None] + squares[None, :]
    np.fill_diagonal(pair_sums, np.inf)
    return bool(np.min(pair_sums) >= 1.0 - tol and np.count_nonzero(squares <= 0.5 + tol) <= 1)


def _check_preconditions(frame: FrameMatrix, unit_tol: float) -> None:
    if frame.N != frame.n + 1:
        raise WrongCountError(f"Scalability decision needs N = n+1 = {frame.n + 1}, got N = {frame.N}")
    deviation = float(np.max(np.abs(frame.lengths() - 1.0)))
    if deviation > unit_tol:
        raise NotUnitNormError(f"Columns deviate from unit norm by {deviation:.3g}")
    if not frame.is_nontrivial():
        raise TrivialFrameError("Frame contains parallel vectors")


def decide_scalability(frame: FrameMatrix, tol: float = DEFAULT_TOL, unit_tol: float = UNIT_NORM_TOL) -> ScalabilityVerdict:
    _check_preconditions(frame, unit_tol)
    angles = gram_and_angles(frame)
    cos = angles.cosines

    try:
        squares = np.array([closed_form_weights(angles, i) for i in range(frame.N)])
    except DegeneratePairError as e:
        logger.info(f"Closed form undefined: {e}")
        return ScalabilityVerdict(
            scalable=False,
            max_identity_residual=float("inf"),
            reason=ScalabilityReason.DEGENERATE_ANGLES,
        )

    spread = ratio_consistency(angles).max_spread
    residual = _identity_residual(squares, cos)

    def reject(reason: ScalabilityReason) -> ScalabilityVerdict:
        logger.debug(f"Not scalable: {reason.value}")
        return ScalabilityVerdict(
            scalable=False,
            candidate_squares=squares.tolist(),
            max_identity_residual=residual,
            ratio_spread=spread,
            reason=reason,
        )

    # a unit weight must be orthogonal to every other vector; near-unit weights
    # have cosines of order sqrt(1 - l_i^2), so only an exact orthogonal partner counts
    for i in range(frame.N):
        row = np.abs(np.delete(cos[i], i))
        if squares[i] >= 1.0 - tol and np.any(row <= tol) and np.any(row > np.sqrt(tol)):
            return reject(ScalabilityReason.CONTAINS_ORTHONORMAL_PAIR)
    if spread > tol:
        return reject(ScalabilityReason.RATIO_INCONSISTENT)
    if residual > tol:
        return reject(ScalabilityReason.IDENTITY_VIOLATED)
    if not sign_pattern_consistent(cos, tol):
        return reject(ScalabilityReason.SIGN_PATTERN_INCONSISTENT)
    if np.any(squares <= 0.0) or np.any(squares > 1.0 + tol):
        return reject(ScalabilityReason.WEIGHT_OUT_OF_RANGE)
    weights = ScalingWeights.from_squares(np.minimum(squares, 1.0))
    if not length_bounds_check(weights, tol):
        return reject(ScalabilityReason.WEIGHT_OUT_OF_RANGE)
    if not verify(scale_columns(frame, weights.weights), 10 * tol).is_parseval:
        return reject(ScalabilityReason.SCALED_NOT_PARSEVAL)

    return ScalabilityVerdict(
        scalable=True,
        weights=weights.weights.tolist(),
        candidate_squares=squares.tolist(),
        max_identity_residual=residual,
        ratio_spread=spread,
    )


def _design_matrix(frame: FrameMatrix) -> tuple[np.ndarray, np.ndarray]:
    """Least-squares form of sum_j c_j v_j v_j^T = I; off-diagonals weighted so the norm is Frobenius."""
    iu = np.triu_indices(frame.n)
    weight = np.where(iu[0] == iu[1], 1.0, np.sqrt(2.0))
    a = np.stack([np.outer(v, v)[iu] * weight for v in frame.columns.T], axis=1)
    b = np.eye(frame.n)[iu] * weight
    return a, b


def _projected_gradient(a: np.ndarray, b: np.ndarray, start: np.ndarray, max_iter: int, step_tol: float) -> np.ndarray:
    h = a.T @ a
    g = a.T @ b
    step = 1.0 / float(np.linalg.eigvalsh(h)[-1])
    c = np.maximum(start, 0.0)
    for _ in range(max_iter):
        updated = np.maximum(c - step * (h @ c - g), 0.0)
        moved = float(np.max(np.abs(updated - c)))
        c = updated
        if moved <= step_tol:
            break
    support = c > 0
    if np.any(support):
        sub, *_ = np.linalg.lstsq(a[:, support], b, rcond=None)
        if np.all(sub > 0):
            polished = np.zeros_like(c)
            polished[support] = sub
            if np.linalg.norm(a @ polished - b) <= np.linalg.norm(a @ c - b):
                c = polished
    return c


def oracle_scale(
    frame: FrameMatrix,
    max_iter: int = ORACLE_MAX_ITER,
    step_tol: float = ORACLE_STEP_TOL,
    threshold: float = ORACLE_THRESHOLD,
    unit_tol: float = UNIT_NORM_TOL,
) -> Optional[ScalingWeights]:
    """
    Nonnegative least squares min ||sum_j c_j v_j v_j^T - I||_F over c >= 0,
    independent of the closed form. Returns sqrt(c) iff the optimum is below
    `threshold` with every c_j above it.
    """
    _check_preconditions(frame, unit_tol)
    a, b = _design_matrix(frame)
    c, *_ = np.linalg.lstsq(a, b, rcond=None)
    unconstrained = float(np.linalg.norm(a @ c - b))
    if unconstrained > threshold:
        # the constrained optimum can only be worse
        return None
    if np.any(c < 0):
        c = _projected_gradient(a, b, c, max_iter, step_tol)
    objective = float(np.linalg.norm(a @ c - b))
    # squares at the threshold level are numerically zero weights
    if objective > threshold or np.any(c <= threshold):
        return None
    return ScalingWeights(np.sqrt(c))
