"""
Seeded batch drivers.

Each suite draws `count` independent cases from numpy generators seeded with
(seed, case index), runs them on a thread pool and aggregates a summary. All
frame operations are pure, so cases never share state.
"""
import asyncio
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from datetime import datetime, timezone
from typing import Callable, Optional

import numpy as np
from pydantic import BaseModel, Field

from src.config import Settings
from src.frames.construct import construct, expected_diagonal, uniqueness_check
from src.frames.core import (
    gram_and_angles,
    matches_mercedes_benz,
    normalize_columns,
    random_parseval,
    scale_columns,
    verify,
)
from src.frames.diagnostics import necessary_identities, planar_tightness
from src.frames.errors import UnknownSuiteError
from src.frames.models import FrameMatrix, ScalabilityReason, ScalingWeights
from src.frames.scaling import decide_scalability, length_bounds_check, oracle_scale

logger = logging.getLogger(__name__)

SUITE_NAME_MAPPING = {
    "construction": "Triangular construction",
    "uniqueness": "Uniqueness of the triangular completion",
    "scaling": "Scalability round trip",
    "oracle": "Closed form vs. least-squares oracle",
    "mercedes": "Mercedes-Benz golden case",
    "identities": "Necessary identities",
    "negative": "Negative controls",
}

CONSTRUCTION_TOL = 1e-10
UNIQUENESS_TOL = 1e-8
ROUND_TRIP_TOL = 1e-8
GOLDEN_TOL = 1e-12
IDENTITY_TOL = 1e-9
MAX_SEED_NORM = 0.999

# Mercedes-Benz representative with angles pi/3, 2pi/3, pi/3
GOLDEN_TRIPLE = np.array([[1.0, 0.0], [0.5, np.sqrt(3.0) / 2.0], [-0.5, np.sqrt(3.0) / 2.0]])


class BatchRequest(BaseModel):
    suite: str
    count: int = Field(default=100, ge=1)
    seed: int = 0


class CaseResult(BaseModel):
    case_id: str
    suite: str
    passed: bool
    feedback: str
    max_residual: Optional[float] = None


class BatchSummary(BaseModel):
    suite: str
    suite_name: str
    total_cases: int
    passed_cases: int
    failed_cases: list[CaseResult]
    pass_rate: float
    time_used: float
    timestamp: str

    @property
    def all_passed(self) -> bool:
        return self.passed_cases == self.total_cases

    def summary_text(self) -> str:
        text = f"{self.suite_name}: {self.passed_cases}/{self.total_cases} passed in {self.time_used:.2f}s\n"
        if self.failed_cases:
            text += f"\nFailed Cases ({len(self.failed_cases)}):\n"
            for case in self.failed_cases:
                text += f"- {case.case_id}: {case.feedback}\n"
        else:
            text += "\nAll cases passed!"
        return text


Outcome = tuple[bool, str, Optional[float]]


def _random_seed(rng: np.random.Generator, n: int) -> np.ndarray:
    direction = rng.standard_normal(n)
    direction /= np.linalg.norm(direction)
    return rng.uniform(0.0, MAX_SEED_NORM) * direction


def _rotation(phi: float) -> np.ndarray:
    return np.array([[np.cos(phi), -np.sin(phi)], [np.sin(phi), np.cos(phi)]])


def _random_unit_frame(rng: np.random.Generator, n: int) -> FrameMatrix:
    vectors = rng.standard_normal((n + 1, n))
    return FrameMatrix.from_vectors(vectors / np.linalg.norm(vectors, axis=1, keepdims=True))


def _bounds_ok(frame: FrameMatrix) -> bool:
    return not frame.is_nontrivial() or length_bounds_check(ScalingWeights(frame.lengths()))


def construction_case(rng: np.random.Generator, index: int, settings: Settings) -> Outcome:
    n = 2 + index % 9
    w = _random_seed(rng, n)
    tpf = construct(w, eps_strict=settings.strict_margin)
    frame = tpf.frame
    gram_dev = float(np.max(np.abs(frame.columns @ frame.columns.T - np.eye(n))))
    diag_dev = float(np.max(np.abs(tpf.diagonal - expected_diagonal(w))))
    det_dev = abs(abs(float(np.linalg.det(tpf.basis))) - np.sqrt(1.0 - float(w @ w)))
    worst = max(gram_dev, diag_dev, det_dev)
    if worst > CONSTRUCTION_TOL:
        return False, f"n={n}: gram {gram_dev:.2e}, diagonal {diag_dev:.2e}, det {det_dev:.2e}", worst
    if not _bounds_ok(frame):
        return False, f"n={n}: length bounds violated by {frame.lengths() ** 2}", worst
    return True, f"n={n}", worst


def uniqueness_case(rng: np.random.Generator, index: int, settings: Settings) -> Outcome:
    n = 2 + index % 2
    w = _random_seed(rng, n)
    if uniqueness_check(w, tol=UNIQUENESS_TOL):
        return True, f"n={n}", None
    return False, f"n={n}: a sign branch disagrees with the construction for w={w.tolist()}", None


def scaling_case(rng: np.random.Generator, index: int, settings: Settings) -> Outcome:
    n = 2 + index % 7
    frame = random_parseval(n, n + 1, seed=int(rng.integers(2**32)))
    unit, lengths = normalize_columns(frame)
    verdict = decide_scalability(unit, tol=settings.tolerance)
    if not verdict.scalable:
        return False, f"n={n}: normalized Parseval frame rejected ({verdict.reason.value})", None
    weights = np.asarray(verdict.weights)
    deviation = float(np.max(np.abs(weights - lengths)))
    if deviation > ROUND_TRIP_TOL:
        return False, f"n={n}: weights off by {deviation:.2e}", deviation
    if not verify(scale_columns(unit, weights), ROUND_TRIP_TOL).is_parseval:
        return False, f"n={n}: rescaled frame is not Parseval", deviation
    if not length_bounds_check(verdict.scaling_weights):
        return False, f"n={n}: length bounds violated by {weights ** 2}", deviation
    return True, f"n={n}", deviation


def oracle_case(rng: np.random.Generator, index: int, settings: Settings) -> Outcome:
    n = 2 + index % 2
    if (index // 2) % 2 == 0:
        unit, _ = normalize_columns(random_parseval(n, n + 1, seed=int(rng.integers(2**32))))
        kind = "normalized Parseval"
    else:
        unit = _random_unit_frame(rng, n)
        kind = "gaussian"
    verdict = decide_scalability(unit, tol=settings.tolerance)
    oracle = oracle_scale(
        unit,
        max_iter=settings.oracle_max_iter,
        step_tol=settings.oracle_step_tol,
        threshold=settings.oracle_threshold,
    )
    if verdict.scalable != (oracle is not None):
        return False, f"n={n} {kind}: closed form says {verdict.scalable}, oracle says {oracle is not None}", None
    if oracle is None:
        return True, f"n={n} {kind}: both reject", None
    deviation = float(np.max(np.abs(oracle.weights - np.asarray(verdict.weights))))
    if deviation > settings.oracle_tolerance:
        return False, f"n={n} {kind}: weights differ by {deviation:.2e}", deviation
    return True, f"n={n} {kind}: both accept", deviation


def mercedes_case(rng: np.random.Generator, index: int, settings: Settings) -> Outcome:
    rotated = GOLDEN_TRIPLE @ _rotation(rng.uniform(0.0, 2.0 * np.pi)).T
    frame = FrameMatrix.from_vectors(rotated)
    theta = gram_and_angles(frame).theta
    expected = np.array([np.pi / 3, 2 * np.pi / 3, np.pi / 3])
    angle_dev = float(np.max(np.abs(theta[[0, 0, 1], [1, 2, 2]] - expected)))

    flipped = FrameMatrix(frame.columns * rng.choice([-1.0, 1.0], size=3))
    verdict = decide_scalability(flipped, tol=settings.tolerance)
    if not verdict.scalable:
        return False, f"golden triple rejected ({verdict.reason.value})", None
    weight_dev = float(np.max(np.abs(np.asarray(verdict.weights) - np.sqrt(2.0 / 3.0))))

    scaled = scale_columns(flipped, np.asarray(verdict.weights))
    planar = planar_tightness(scaled)
    minors = [abs(float(np.linalg.det(np.delete(scaled.columns, j, axis=1)))) for j in range(3)]
    minor_dev = float(np.max(np.abs(np.array(minors) - 1.0 / np.sqrt(3.0))))

    worst = max(angle_dev, weight_dev, planar, minor_dev)
    if worst > GOLDEN_TOL or not matches_mercedes_benz(scaled):
        return False, (
            f"angles {angle_dev:.2e}, weights {weight_dev:.2e}, planar {planar:.2e}, minors {minor_dev:.2e}"
        ), worst
    return True, "golden values reproduced", worst


def identities_case(rng: np.random.Generator, index: int, settings: Settings) -> Outcome:
    n = 2 + index % 7
    count = n + (index // 7) % 4
    frame = random_parseval(n, count, seed=int(rng.integers(2**32)))
    worst = max(necessary_identities(frame))
    if worst > IDENTITY_TOL:
        return False, f"(n, N)=({n}, {count}): identity residual {worst:.2e}", worst
    return True, f"(n, N)=({n}, {count})", worst


def _orthonormal_pair_frame(rng: np.random.Generator, n: int) -> FrameMatrix:
    q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    extra = rng.standard_normal((n - 1, n))
    extra /= np.linalg.norm(extra, axis=1, keepdims=True)
    return FrameMatrix(np.hstack([q[:, :2], extra.T]))


def _perturb_angle(frame: FrameMatrix, k: int, j: int, delta: float) -> FrameMatrix:
    """Rotate v_k by delta inside span(v_k, v_j), away from v_j."""
    cols = np.array(frame.columns)
    vk, vj = cols[:, k], cols[:, j]
    u = vj - (vj @ vk) * vk
    u /= np.linalg.norm(u)
    cols[:, k] = np.cos(delta) * vk - np.sin(delta) * u
    return FrameMatrix(cols)


def negative_case(rng: np.random.Generator, index: int, settings: Settings) -> Outcome:
    if index % 2 == 0:
        n = 2 + (index // 2) % 2
        frame = _orthonormal_pair_frame(rng, n)
        verdict = decide_scalability(frame, tol=settings.tolerance)
        if verdict.reason == ScalabilityReason.CONTAINS_ORTHONORMAL_PAIR:
            return True, f"n={n}: orthonormal pair rejected", None
        return False, f"n={n}: expected ContainsOrthonormalPair, got scalable={verdict.scalable} reason={verdict.reason}", None

    # scalable sets in R^2 are too large for angle perturbations to leave them
    unit, _ = normalize_columns(random_parseval(3, 4, seed=int(rng.integers(2**32))))
    k, j = rng.choice(4, size=2, replace=False)
    delta = rng.uniform(0.05, 0.2)
    perturbed = _perturb_angle(unit, int(k), int(j), delta)
    verdict = decide_scalability(perturbed, tol=settings.tolerance)
    evidence = max(verdict.ratio_spread, verdict.max_identity_residual)
    if verdict.scalable:
        return False, f"perturbation of {delta:.3f} rad kept the frame scalable", evidence
    return True, f"rejected ({verdict.reason.value}), spread/residual {evidence:.2e}", evidence


SUITES: dict[str, Callable[[np.random.Generator, int, Settings], Outcome]] = {
    "construction": construction_case,
    "uniqueness": uniqueness_case,
    "scaling": scaling_case,
    "oracle": oracle_case,
    "mercedes": mercedes_case,
    "identities": identities_case,
    "negative": negative_case,
}


class BatchExecutor:
    def __init__(self, settings: Optional[Settings] = None):
        self.settings = settings or Settings()

    def run_case(self, suite: str, seed: int, index: int) -> CaseResult:
        case_id = f"{suite}_{index}"
        rng = np.random.default_rng([seed, index])
        try:
            passed, feedback, residual = SUITES[suite](rng, index, self.settings)
        except Exception as e:
            logger.exception(f"Case {case_id} failed with an exception")
            return CaseResult(case_id=case_id, suite=suite, passed=False, feedback=f"System Error: {e}")
        return CaseResult(case_id=case_id, suite=suite, passed=passed, feedback=feedback, max_residual=residual)

    async def execute(self, request: BatchRequest) -> BatchSummary:
        if request.suite not in SUITES:
            raise UnknownSuiteError(request.suite, list(SUITES))
        suite_name = SUITE_NAME_MAPPING.get(request.suite, request.suite)
        logger.info(f"Starting {suite_name}: {request.count} cases, seed {request.seed}")
        start_time = time.time()

        loop = asyncio.get_running_loop()
        with ThreadPoolExecutor(max_workers=self.settings.batch_workers) as pool:
            results = await asyncio.gather(
                *(
                    loop.run_in_executor(pool, self.run_case, request.suite, request.seed, i)
                    for i in range(request.count)
                )
            )

        failed = [r for r in results if not r.passed]
        passed_count = len(results) - len(failed)
        summary = BatchSummary(
            suite=request.suite,
            suite_name=suite_name,
            total_cases=len(results),
            passed_cases=passed_count,
            failed_cases=failed,
            pass_rate=passed_count / len(results),
            time_used=time.time() - start_time,
            timestamp=datetime.now(timezone.utc).isoformat(),
        )
        logger.info(f"Batch complete. {summary.summary_text()}")
        return summary
