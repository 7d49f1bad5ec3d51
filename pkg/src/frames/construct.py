"""
Unique triangular Parseval (n+1)-frame completing a seed vector w, ||w|| < 1.

The construction runs the induction bottom-up: start from the closed-form
planar frame for the last two seed entries, then repeatedly lift dimension
m-1 to m by prepending one seed entry. Each lift takes the unit vector y
orthogonal to the rows built so far, solves lambda * y[-1] = alpha and adds
the new top row (sqrt(1 - lambda^2), lambda * y).
"""
from __future__ import annotations

import itertools
import logging
from typing import Iterator, Literal, Optional, Sequence

import numpy as np
from scipy.linalg import solve_triangular

from src.frames.errors import (
    InvalidShapeError,
    RowsNotOrthonormalError,
    SeedTooLongError,
    UnsupportedDimensionError,
)
from src.frames.models import (
    ZERO_NORM,
    ConstructionTrace,
    FrameMatrix,
    LevelRecord,
    SeedVector,
    TriangularParsevalFrame,
)

logger = logging.getLogger(__name__)

EPS_STRICT = 1e-12
ORTHONORMAL_TOL = 1e-10
COFACTOR_MAX_DIM = 8
UNIQUENESS_TOL = 1e-8

Method = Literal["auto", "cofactor", "nullspace"]


def as_seed(w: SeedVector | Sequence[float] | np.ndarray) -> SeedVector:
    return w if isinstance(w, SeedVector) else SeedVector(np.asarray(w, dtype=np.float64))


def _check_seed(seed: SeedVector, eps_strict: float) -> None:
    if seed.norm >= 1.0 - eps_strict:
        raise SeedTooLongError(seed.norm, eps_strict)


def expected_diagonal(w: SeedVector | Sequence[float], eps_strict: float = EPS_STRICT) -> np.ndarray:
    """a_jj = sqrt(1 - sum_{k>=j} alpha_k^2) / sqrt(1 - sum_{k>j} alpha_k^2); empty sums are 0."""
    seed = as_seed(w)
    _check_seed(seed, eps_strict)
    squares = seed.entries**2
    tail = np.cumsum(squares[::-1])[::-1]
    tail_after = np.append(tail[1:], 0.0)
    return np.sqrt(1.0 - tail) / np.sqrt(1.0 - tail_after)


def construct_base2(w: SeedVector | Sequence[float], eps_strict: float = EPS_STRICT) -> TriangularParsevalFrame:
    seed = as_seed(w)
    if seed.n != 2:
        raise InvalidShapeError(f"construct_base2 needs a seed in R^2, got n={seed.n}")
    _check_seed(seed, eps_strict)
    a1, a2 = (float(x) for x in seed.entries)

    a22 = np.sqrt(1.0 - a2 * a2)
    a12 = -a1 * a2 / a22
    a11 = np.sqrt(1.0 - a1 * a1 - a2 * a2) / a22
    columns = np.array([[a11, a12, a1], [0.0, a22, a2]])

    # lift from R^1: y is the cofactor vector of the row (a22, a2)
    y = np.array([a2, -a22])
    lam = a1 / y[-1]
    level = LevelRecord(dimension=2, y=y, lam=float(lam), x1=float(np.sqrt(1.0 - lam * lam)), diag=float(a11))
    return TriangularParsevalFrame(
        frame=FrameMatrix(columns),
        seed=seed,
        trace=ConstructionTrace(levels=(level,)),
    )


def _cofactor_vector(m: np.ndarray) -> np.ndarray:
    """Formal expansion of det([e_1 ... e_cols; m]) along its symbolic first row."""
    cols = m.shape[1]
    y = np.empty(cols)
    for k in range(cols):
        minor = np.delete(m, k, axis=1)
        y[k] = (-1.0) ** k * np.linalg.det(minor)
    return y


def _nullspace_vector(m: np.ndarray) -> np.ndarray:
    cols = m.shape[1]
    q, _ = np.linalg.qr(m.T, mode="complete")
    y = q[:, -1].copy()
    # orient like the cofactor vector: last entry carries (-1)^(cols+1) det(m[:, :-1])
    reference = (-1.0) ** (cols - 1) * np.linalg.det(m[:, :-1])
    if abs(reference) > ZERO_NORM and np.sign(y[-1]) != np.sign(reference):
        y = -y
    return y


def orthocomplement_vector(m: np.ndarray, method: Method = "auto", tol: float = ORTHONORMAL_TOL) -> np.ndarray:
    """
    Unit vector orthogonal to every row of an (n-1) x n matrix with orthonormal rows.

    "cofactor" evaluates the generalized cross product; "nullspace" takes the
    last column of a complete QR of m^T and orients it like the cofactor
    vector. "auto" uses the cofactor route up to COFACTOR_MAX_DIM columns.
    """
    m = np.atleast_2d(np.asarray(m, dtype=np.float64))
    rows, cols = m.shape
    if cols != rows + 1:
        raise InvalidShapeError(f"Expected an (n-1) x n table, got {m.shape}")
    deviation = float(np.max(np.abs(m @ m.T - np.eye(rows))))
    if deviation > tol:
        raise RowsNotOrthonormalError(f"Rows deviate from orthonormal by {deviation:.3g}")

    if method == "auto":
        method = "cofactor" if cols <= COFACTOR_MAX_DIM else "nullspace"
    if method == "cofactor":
        return _cofactor_vector(m)
    if method == "nullspace":
        return _nullspace_vector(m)
    raise ValueError(f"Unknown orthocomplement method: {method}")


def construct(
    w: SeedVector | Sequence[float],
    eps_strict: float = EPS_STRICT,
    method: Method = "auto",
) -> TriangularParsevalFrame:
    seed = as_seed(w)
    n = seed.n
    if n < 2:
        raise InvalidShapeError(f"construct needs n >= 2, got n={n}")
    _check_seed(seed, eps_strict)
    alpha = seed.entries

    base = construct_base2(alpha[-2:], eps_strict=eps_strict)
    table = np.array(base.frame.columns)
    levels = list(base.trace.levels)

    for dim in range(3, n + 1):
        a = float(alpha[n - dim])
        y = orthocomplement_vector(table, method=method)
        # |y[-1]| = prod of the diagonal so far = sqrt(1 - ||tail||^2) > 0
        lam = a / y[-1]
        if lam * lam >= 1.0:
            raise SeedTooLongError(seed.norm, eps_strict)
        x1 = np.sqrt(1.0 - lam * lam)

        lifted = np.zeros((dim, dim + 1))
        lifted[0, 0] = x1
        lifted[0, 1:dim] = lam * y[:-1]
        lifted[0, dim] = a
        lifted[1:, 1:] = table
        table = lifted
        levels.append(LevelRecord(dimension=dim, y=y, lam=float(lam), x1=float(x1), diag=float(x1)))

    if not np.any(alpha):
        logger.debug("Zero seed: construction returns the identity basis")
    return TriangularParsevalFrame(
        frame=FrameMatrix(table),
        seed=seed,
        trace=ConstructionTrace(levels=tuple(levels)),
    )


def _solve_branch(alpha: np.ndarray, signs: Sequence[float], tol: float) -> Optional[np.ndarray]:
    """Back-substitute the row-orthonormality equations of [V | alpha] for one diagonal sign choice."""
    n = alpha.size
    v = np.zeros((n, n))
    for i in range(n - 1, -1, -1):
        if i < n - 1:
            rhs = -alpha[i] * alpha[i + 1 :]
            v[i, i + 1 :] = solve_triangular(v[i + 1 :, i + 1 :], rhs, lower=False)
        square = 1.0 - alpha[i] ** 2 - float(np.sum(v[i, i + 1 :] ** 2))
        if square < -tol:
            return None
        v[i, i] = signs[i] * np.sqrt(max(square, 0.0))
        if i > 0 and abs(v[i, i]) <= ZERO_NORM:
            return None
    return v


def enumerate_triangular_solutions(
    w: SeedVector | Sequence[float],
    trials: Optional[int] = None,
    tol: float = UNIQUENESS_TOL,
) -> Iterator[np.ndarray]:
    """
    Yield every right-triangular V with [V | w] row-orthonormal, one per
    diagonal sign branch. `trials` caps the branches examined.
    """
    seed = as_seed(w)
    alpha = seed.entries
    branches = itertools.product((1.0, -1.0), repeat=seed.n)
    if trials is not None:
        branches = itertools.islice(branches, trials)
    for signs in branches:
        v = _solve_branch(alpha, signs, tol)
        if v is None:
            continue
        rows = np.hstack([v, alpha[:, None]])
        if float(np.max(np.abs(rows @ rows.T - np.eye(seed.n)))) <= tol:
            yield v


def uniqueness_check(w: SeedVector | Sequence[float], trials: Optional[int] = None, tol: float = UNIQUENESS_TOL) -> bool:
    seed = as_seed(w)
    if seed.n not in (2, 3):
        raise UnsupportedDimensionError(f"Brute-force uniqueness oracle supports n in {{2, 3}}, got {seed.n}")
    reference = construct(seed).basis
    found = 0
    for candidate in enumerate_triangular_solutions(seed, trials=trials, tol=tol):
        found += 1
        deviation = np.minimum(
            np.max(np.abs(candidate - reference), axis=0),
            np.max(np.abs(candidate + reference), axis=0),
        )
        if float(np.max(deviation)) > tol:
            logger.info(f"Sign branch produced a frame differing by {float(np.max(deviation)):.3g}")
            return False
    return found > 0
