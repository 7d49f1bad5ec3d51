"""
Necessary conditions satisfied by tight and Parseval frames, each returned as
a residual so callers can audit arbitrary frames.
"""
from __future__ import annotations

import logging
from typing import Callable, Optional

import numpy as np

from src.frames.construct import orthocomplement_vector
from src.frames.core import DEFAULT_TOL, frame_operator, verify
from src.frames.errors import (
    CharacterizationMismatchError,
    FrameError,
    NotParsevalError,
    WrongCountError,
    WrongDimensionError,
    ZeroColumnError,
)
from src.frames.models import (
    ZERO_NORM,
    CheckRecord,
    CheckStatus,
    DiagnosticsReport,
    FrameMatrix,
    ScalingWeights,
)
from src.frames.scaling import length_bounds_check

logger = logging.getLogger(__name__)

PARSEVAL_PRECONDITION_TOL = 1e-8


def _require_parseval(frame: FrameMatrix, tol: float) -> None:
    if not verify(frame, tol).is_parseval:
        raise NotParsevalError(f"Frame is not Parseval within {tol:g}")


def _require_n_plus_one(frame: FrameMatrix) -> None:
    if frame.N != frame.n + 1:
        raise WrongCountError(f"Check needs N = n+1 = {frame.n + 1}, got N = {frame.N}")


def necessary_identities(
    frame: FrameMatrix, parseval_tol: float = PARSEVAL_PRECONDITION_TOL
) -> tuple[float, float, float]:
    """
    Max over reference vectors i of the deviations of

        sum_j l_j^2 cos^2 t_ij  from 1,
        sum_j l_j^2 sin^2 t_ij  from n - 1,
        sum_j l_j^2 cos 2t_ij   from 2 - n,

    with j running over all N vectors (j = i contributes l_i^2). Terms are read
    off the Gram matrix: l_j^2 cos^2 t_ij = <v_i, v_j>^2 / ||v_i||^2. Zero
    vectors are skipped as references and contribute nothing.
    """
    _require_parseval(frame, parseval_tol)
    n = frame.n
    g = frame.gram()
    squares = np.diag(g)
    cos_res = sin_res = cos2_res = 0.0
    for i in np.flatnonzero(squares > ZERO_NORM**2):
        cos_terms = g[i] ** 2 / squares[i]
        sin_terms = squares - cos_terms
        cos_sum = float(np.sum(cos_terms))
        sin_sum = float(np.sum(sin_terms))
        cos_res = max(cos_res, abs(cos_sum - 1.0))
        sin_res = max(sin_res, abs(sin_sum - (n - 1)))
        cos2_res = max(cos2_res, abs(cos_sum - sin_sum - (2 - n)))
    return cos_res, sin_res, cos2_res


def planar_tightness(frame: FrameMatrix, index: int = 0) -> float:
    """
    |sum_j l_j^2 exp(2i phi_j)| with phi_j the signed angle from v_index to v_j.

    Doubling the angle makes reflections of any v_j irrelevant. The value
    equals B - A of the planar frame operator, so it vanishes iff the frame
    is tight, whatever the reference index.
    """
    if frame.n != 2:
        raise WrongDimensionError(f"Planar tightness needs n = 2, got n = {frame.n}")
    lengths = frame.lengths()
    zero = np.flatnonzero(lengths <= ZERO_NORM)
    if zero.size:
        raise ZeroColumnError(int(zero[0]))
    z = frame.columns[0] + 1j * frame.columns[1]
    phi = np.mod(np.angle(z) - np.angle(z[index]), 2.0 * np.pi)
    return float(abs(np.sum(lengths**2 * np.exp(2j * phi))))


def _abs_det(matrix: np.ndarray) -> float:
    r = np.linalg.qr(matrix, mode="r")
    return float(abs(np.prod(np.diag(r))))


def minor_determinants(frame: FrameMatrix, parseval_tol: float = PARSEVAL_PRECONDITION_TOL) -> float:
    """max_j | |det(frame without v_j)| - sqrt(1 - l_j^2) |."""
    _require_n_plus_one(frame)
    _require_parseval(frame, parseval_tol)
    lengths = frame.lengths()
    residual = 0.0
    for j in range(frame.N):
        det = _abs_det(np.delete(frame.columns, j, axis=1))
        expected = np.sqrt(max(0.0, 1.0 - lengths[j] ** 2))
        residual = max(residual, abs(det - expected))
    return residual


def orthonormality_characterization(frame: FrameMatrix, tol: float = DEFAULT_TOL) -> bool:
    """An n-frame in R^n is Parseval iff its vectors are orthonormal; both predicates are computed."""
    if frame.N != frame.n:
        raise WrongCountError(f"Orthonormality characterization needs N = n, got N = {frame.N}, n = {frame.n}")
    parseval = verify(frame, tol).is_parseval
    orthonormal = float(np.max(np.abs(frame.gram() - np.eye(frame.N)))) <= tol
    if parseval != orthonormal:
        raise CharacterizationMismatchError(
            f"Parseval verdict {parseval} disagrees with orthonormality verdict {orthonormal}"
        )
    return parseval


def completion_row(frame: FrameMatrix, parseval_tol: float = PARSEVAL_PRECONDITION_TOL) -> np.ndarray:
    """
    Unit vector x orthogonal to the rows of a Parseval (n+1)-frame; stacking it
    under the frame gives an orthogonal (n+1) x (n+1) matrix and |x_j| = sqrt(1 - l_j^2).
    """
    _require_n_plus_one(frame)
    _require_parseval(frame, parseval_tol)
    return orthocomplement_vector(frame.columns, tol=max(parseval_tol, 1e-10))


def _completion_residual(frame: FrameMatrix) -> float:
    x = completion_row(frame)
    bordered = np.vstack([frame.columns, x])
    orthogonality = float(np.max(np.abs(bordered @ bordered.T - np.eye(frame.N))))
    magnitudes = float(np.max(np.abs(np.abs(x) - np.sqrt(np.maximum(0.0, 1.0 - frame.lengths() ** 2)))))
    return max(orthogonality, magnitudes)


def hyperplane_projection(frame: FrameMatrix, parseval_tol: float = PARSEVAL_PRECONDITION_TOL) -> float:
    """
    For every nonzero v_i, the projections of the other vectors onto the
    hyperplane orthogonal to v_i form a Parseval frame of that hyperplane.
    Returns the worst deviation of their frame operator from the projector.
    """
    _require_parseval(frame, parseval_tol)
    lengths = frame.lengths()
    residual = 0.0
    for i in np.flatnonzero(lengths > ZERO_NORM):
        u = frame.columns[:, i] / lengths[i]
        projector = np.eye(frame.n) - np.outer(u, u)
        rest = np.delete(frame.columns, i, axis=1)
        s = projector @ frame_operator(rest) @ projector
        residual = max(residual, float(np.max(np.abs(s - projector))))
    return residual


def _length_bounds_residual(frame: FrameMatrix) -> float:
    return 0.0 if length_bounds_check(ScalingWeights(frame.lengths())) else 1.0


def _orthonormality_residual(frame: FrameMatrix, tol: float) -> float:
    try:
        orthonormality_characterization(frame, tol)
    except CharacterizationMismatchError as e:
        logger.warning(str(e))
        return 1.0
    return 0.0


def audit(frame: FrameMatrix, tol: float = DEFAULT_TOL) -> DiagnosticsReport:
    """Run every check whose preconditions hold; the rest are reported as skipped."""
    report = verify(frame, tol)
    n, count = frame.n, frame.N
    parseval = report.is_parseval
    has_zero = bool(np.any(frame.lengths() <= ZERO_NORM))
    checks: list[CheckRecord] = []

    def run(name: str, applicable: bool, why_not: str, residual: Callable[[], float]) -> None:
        if not applicable:
            checks.append(CheckRecord(name=name, status=CheckStatus.SKIP, note=why_not))
            return
        try:
            value = residual()
        except FrameError as e:
            checks.append(CheckRecord(name=name, status=CheckStatus.SKIP, note=str(e)))
            return
        status = CheckStatus.PASS if value <= tol else CheckStatus.FAIL
        checks.append(CheckRecord(name=name, status=status, max_residual=value))

    identities: Optional[tuple[float, float, float]] = None

    def identity(k: int) -> float:
        nonlocal identities
        if identities is None:
            identities = necessary_identities(frame, parseval_tol=max(tol, PARSEVAL_PRECONDITION_TOL))
        return identities[k]

    not_parseval = "frame is not Parseval"
    not_n_plus_one = f"needs N = n+1 = {n + 1}"
    ptol = max(tol, PARSEVAL_PRECONDITION_TOL)

    run("tightness", True, "", lambda: report.upper_bound - report.lower_bound)
    run("trace", report.is_tight, "frame is not tight", lambda: report.trace_residual)
    run("planar_tightness", n == 2 and not has_zero, "needs n = 2 without zero vectors", lambda: planar_tightness(frame))
    run("identity_cos", parseval, not_parseval, lambda: identity(0))
    run("identity_sin", parseval, not_parseval, lambda: identity(1))
    run("identity_cos2", parseval, not_parseval, lambda: identity(2))
    run("vector_lengths", parseval, not_parseval, lambda: max(0.0, float(np.max(frame.lengths())) - 1.0))
    run("hyperplane_projection", parseval and n >= 2, "needs a Parseval frame with n >= 2",
        lambda: hyperplane_projection(frame, ptol))
    run("minor_determinants", parseval and count == n + 1, not_n_plus_one + " and Parseval",
        lambda: minor_determinants(frame, ptol))
    run("completion_row", parseval and count == n + 1, not_n_plus_one + " and Parseval", lambda: _completion_residual(frame))
    run("length_bounds", parseval and count == n + 1 and frame.is_nontrivial(),
        not_n_plus_one + ", Parseval and nontrivial", lambda: _length_bounds_residual(frame))
    run("orthonormality", count == n, f"needs N = n = {n}", lambda: _orthonormality_residual(frame, tol))

    failed = [c.name for c in checks if c.status == CheckStatus.FAIL]
    if failed:
        logger.info(f"Audit failures: {failed}")
    return DiagnosticsReport(n=n, N=count, tolerance=tol, checks=checks)
