"""
Frame representation helpers: Gram/angle tables, the frame operator,
tight/Parseval verification, random Parseval generation and canonical forms
up to rotation and per-vector reflection.
"""
from __future__ import annotations

import logging
from typing import Optional

import numpy as np

from src.frames.errors import (
    InvalidShapeError,
    ShapeMismatchError,
    SingularBasisError,
    ZeroColumnError,
)
from src.frames.models import (
    ZERO_NORM,
    AngleTable,
    CanonicalForm,
    FrameMatrix,
    TightnessReport,
)

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-9
SINGULAR_DET = 1e-12

SQRT3_2 = np.sqrt(3.0) / 2.0


def _nonzero_lengths(frame: FrameMatrix) -> np.ndarray:
    lengths = frame.lengths()
    zero = np.flatnonzero(lengths <= ZERO_NORM)
    if zero.size:
        raise ZeroColumnError(int(zero[0]))
    return lengths


def gram_and_angles(frame: FrameMatrix) -> AngleTable:
    lengths = _nonzero_lengths(frame)
    cos = frame.gram() / np.outer(lengths, lengths)
    cos = np.clip(0.5 * (cos + cos.T), -1.0, 1.0)
    np.fill_diagonal(cos, 1.0)
    theta = np.arccos(cos)
    np.fill_diagonal(theta, 0.0)
    return AngleTable(theta=theta, cosines=cos)


def frame_operator(frame: FrameMatrix | np.ndarray) -> np.ndarray:
    """S = sum_j v_j v_j^T. Accepts a FrameMatrix or a raw (n, N) column array."""
    cols = frame.columns if isinstance(frame, FrameMatrix) else np.atleast_2d(np.asarray(frame, dtype=np.float64))
    s = cols @ cols.T
    return 0.5 * (s + s.T)


def verify(frame: FrameMatrix, tol: float = DEFAULT_TOL) -> TightnessReport:
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")
    s = frame_operator(frame)
    eig = np.linalg.eigvalsh(s)
    lower = max(float(eig[0]), 0.0)
    upper = max(float(eig[-1]), lower)
    is_tight = upper - lower <= tol
    max_dev = float(np.max(np.abs(s - np.eye(frame.n))))
    is_parseval = max_dev <= tol
    residual = float(np.linalg.norm(s - lower * np.eye(frame.n)))
    trace_residual = abs(float(np.sum(frame.lengths() ** 2)) - frame.n * lower)
    return TightnessReport(
        lower_bound=lower,
        upper_bound=upper,
        is_tight=is_tight,
        is_parseval=is_parseval,
        residual=residual,
        trace_residual=trace_residual,
    )


def random_parseval(n: int, N: int, seed: int) -> FrameMatrix:
    """
    Deterministic random Parseval N-frame in R^n.

    Orthonormalizes an N x N Gaussian table and keeps the first n coordinates
    of every orthonormal column, so the n rows of the result are orthonormal.
    """
    if n < 1 or N < n:
        raise InvalidShapeError(f"random_parseval needs N >= n >= 1, got n={n}, N={N}")
    rng = np.random.default_rng(seed)
    q, r = np.linalg.qr(rng.standard_normal((N, N)))
    q = q * np.where(np.diag(r) < 0, -1.0, 1.0)
    return FrameMatrix(q[:n, :])


def mercedes_benz(scale: float = 1.0) -> FrameMatrix:
    return FrameMatrix.from_vectors(
        scale * np.array([[1.0, 0.0], [-0.5, SQRT3_2], [-0.5, -SQRT3_2]])
    )


def normalize_columns(frame: FrameMatrix) -> tuple[FrameMatrix, np.ndarray]:
    lengths = _nonzero_lengths(frame)
    return FrameMatrix(frame.columns / lengths), lengths


def scale_columns(frame: FrameMatrix, weights: np.ndarray) -> FrameMatrix:
    weights = np.asarray(weights, dtype=np.float64)
    if weights.shape != (frame.N,):
        raise ShapeMismatchError(f"Expected {frame.N} weights, got shape {weights.shape}")
    return FrameMatrix(frame.columns * weights)


def canonicalize(frame: FrameMatrix, sign_tol: float = DEFAULT_TOL) -> CanonicalForm:
    """
    Rotate the frame so (v_1..v_n) is right triangular with nonnegative diagonal.

    The rotation alone fixes the first n columns. Each trailing column is
    reflected so that its first entry above `sign_tol` is positive.
    """
    n, count = frame.n, frame.N
    basis = frame.columns[:, :n]
    det = float(np.linalg.det(basis))
    if abs(det) <= SINGULAR_DET:
        raise SingularBasisError(f"First {n} columns are dependent (|det| = {abs(det):.3g})")

    q, r = np.linalg.qr(basis)
    # zero diagonal keeps +1
    d = np.where(np.diag(r) < 0, -1.0, 1.0)
    rotation = (q * d).T
    canonical = rotation @ frame.columns
    canonical[:, :n] = np.triu(canonical[:, :n])

    signs = np.ones(count)
    for j in range(n, count):
        col = canonical[:, j]
        significant = np.flatnonzero(np.abs(col) > sign_tol)
        if significant.size and col[significant[0]] < 0:
            signs[j] = -1.0
    canonical = canonical * signs
    return CanonicalForm(frame=FrameMatrix(canonical), rotation=rotation, signs=signs)


def _align_signs(g1: np.ndarray, g2: np.ndarray, tol: float) -> Optional[np.ndarray]:
    """Find s in {+1,-1}^N with g2 = diag(s) g1 diag(s), propagating over non-orthogonal pairs."""
    count = g1.shape[0]
    signs = np.zeros(count)
    for start in range(count):
        if signs[start]:
            continue
        signs[start] = 1.0
        stack = [start]
        while stack:
            i = stack.pop()
            for j in range(count):
                if j == i or min(abs(g1[i, j]), abs(g2[i, j])) <= tol:
                    continue
                want = signs[i] * np.sign(g1[i, j]) * np.sign(g2[i, j])
                if signs[j] == 0:
                    signs[j] = want
                    stack.append(j)
                elif signs[j] != want:
                    return None
    return signs


def equivalent(f1: FrameMatrix, f2: FrameMatrix, tol: float = DEFAULT_TOL) -> bool:
    if (f1.n, f1.N) != (f2.n, f2.N):
        raise ShapeMismatchError(f"Frames differ in shape: {(f1.n, f1.N)} vs {(f2.n, f2.N)}")
    g1, g2 = f1.gram(), f2.gram()
    if float(np.max(np.abs(np.abs(g1) - np.abs(g2)))) > tol:
        return False
    signs = _align_signs(g1, g2, tol)
    if signs is None:
        logger.debug("Gram magnitudes agree but no consistent reflection pattern exists")
        return False
    c1 = canonicalize(f1, sign_tol=tol).frame.columns
    c2 = canonicalize(FrameMatrix(f2.columns * signs), sign_tol=tol).frame.columns
    per_column = np.minimum(np.max(np.abs(c1 - c2), axis=0), np.max(np.abs(c1 + c2), axis=0))
    return bool(np.max(per_column) <= tol)


def matches_mercedes_benz(frame: FrameMatrix, tol: float = DEFAULT_TOL) -> bool:
    """True iff frame is an equal-norm tight 3-frame in R^2, i.e. a dilated Mercedes-Benz frame."""
    if (frame.n, frame.N) != (2, 3):
        return False
    lengths = frame.lengths()
    if np.ptp(lengths) > tol or not verify(frame, tol).is_tight:
        return False
    try:
        return equivalent(frame, mercedes_benz(float(lengths[0])), tol)
    except SingularBasisError:
        return False
