from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

import numpy as np
from pydantic import BaseModel

from src.frames.errors import InvalidShapeError

# Parallel-vector threshold on 1 - |cos θ|.
PARALLEL_TOL = 1e-12
ZERO_NORM = 1e-14


def _frozen_array(values, ndim: int, name: str) -> np.ndarray:
    arr = np.array(values, dtype=np.float64, copy=True)
    if arr.ndim != ndim:
        raise InvalidShapeError(f"{name} must be {ndim}-D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidShapeError(f"{name} contains non-finite entries")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, slots=True)
class FrameMatrix:
    """
    The n x N matrix whose columns v_1..v_N are the frame vectors.

    Files and most humans list vectors as rows; use `from_vectors` for that
    layout. `columns` is always (n, N).
    """

    columns: np.ndarray

    def __post_init__(self) -> None:
        arr = _frozen_array(self.columns, 2, "FrameMatrix.columns")
        n, count = arr.shape
        if n < 1 or count < n:
            raise InvalidShapeError(f"Frame needs N >= n >= 1, got n={n}, N={count}")
        object.__setattr__(self, "columns", arr)

    @classmethod
    def from_vectors(cls, vectors: Sequence[Sequence[float]] | np.ndarray) -> "FrameMatrix":
        """Build from a row-per-vector layout (transposes)."""
        arr = np.asarray(vectors, dtype=np.float64)
        if arr.ndim != 2:
            raise InvalidShapeError(f"Expected a 2-D list of vectors, got shape {arr.shape}")
        return cls(arr.T)

    @property
    def n(self) -> int:
        return self.columns.shape[0]

    @property
    def N(self) -> int:
        return self.columns.shape[1]

    @property
    def vectors(self) -> np.ndarray:
        """Frame vectors as rows, shape (N, n)."""
        return self.columns.T

    def column(self, j: int) -> np.ndarray:
        return self.columns[:, j]

    def lengths(self) -> np.ndarray:
        return np.linalg.norm(self.columns, axis=0)

    def gram(self) -> np.ndarray:
        """Column Gram matrix <v_i, v_j>, shape (N, N)."""
        return self.columns.T @ self.columns

    def is_nontrivial(self, tol: float = PARALLEL_TOL) -> bool:
        lengths = self.lengths()
        if np.any(lengths <= ZERO_NORM):
            return False
        cos = self.gram() / np.outer(lengths, lengths)
        np.fill_diagonal(cos, 0.0)
        return bool(np.all(1.0 - np.abs(cos) > tol))


@dataclass(frozen=True, slots=True)
class SeedVector:
    entries: np.ndarray

    def __post_init__(self) -> None:
        arr = _frozen_array(self.entries, 1, "SeedVector.entries")
        if arr.size < 1:
            raise InvalidShapeError("SeedVector needs at least one entry")
        object.__setattr__(self, "entries", arr)

    @property
    def n(self) -> int:
        return self.entries.size

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.entries))


@dataclass(frozen=True, slots=True)
class AngleTable:
    """Pairwise angles theta_ij in [0, pi) and their cosines."""

    theta: np.ndarray
    cosines: np.ndarray

    def __post_init__(self) -> None:
        theta = _frozen_array(self.theta, 2, "AngleTable.theta")
        cosines = _frozen_array(self.cosines, 2, "AngleTable.cosines")
        if theta.shape[0] != theta.shape[1] or theta.shape != cosines.shape:
            raise InvalidShapeError("AngleTable tables must be square and of equal shape")
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "cosines", cosines)

    @classmethod
    def from_angles(cls, theta: np.ndarray) -> "AngleTable":
        theta = np.asarray(theta, dtype=np.float64)
        return cls(theta=theta, cosines=np.cos(theta))

    @property
    def N(self) -> int:
        return self.theta.shape[0]


@dataclass(frozen=True, slots=True)
class CanonicalForm:
    frame: FrameMatrix
    rotation: np.ndarray
    signs: np.ndarray


@dataclass(frozen=True, slots=True)
class LevelRecord:
    """One induction step of the triangular construction (dimension m)."""

    dimension: int
    y: np.ndarray
    lam: float
    x1: float
    diag: float


@dataclass(frozen=True, slots=True)
class ConstructionTrace:
    levels: tuple[LevelRecord, ...]


@dataclass(frozen=True, slots=True)
class TriangularParsevalFrame:
    frame: FrameMatrix
    seed: SeedVector
    trace: ConstructionTrace

    @property
    def diagonal(self) -> np.ndarray:
        n = self.frame.n
        return np.diag(self.frame.columns[:, :n]).copy()

    @property
    def basis(self) -> np.ndarray:
        """The right-triangular block (v_1, ..., v_n)."""
        return self.frame.columns[:, : self.frame.n]


@dataclass(frozen=True, slots=True)
class ScalingWeights:
    weights: np.ndarray

    def __post_init__(self) -> None:
        arr = _frozen_array(self.weights, 1, "ScalingWeights.weights")
        if np.any(arr <= 0.0):
            raise InvalidShapeError("Scaling weights must be positive")
        object.__setattr__(self, "weights", arr)

    @classmethod
    def from_squares(cls, squares: Sequence[float] | np.ndarray) -> "ScalingWeights":
        return cls(np.sqrt(np.asarray(squares, dtype=np.float64)))

    @property
    def squared(self) -> np.ndarray:
        return self.weights**2

    def __len__(self) -> int:
        return self.weights.size


# Reports


class TightnessReport(BaseModel):
    lower_bound: float
    upper_bound: float
    is_tight: bool
    is_parseval: bool
    residual: float
    trace_residual: float


class RatioReport(BaseModel):
    max_spread: float
    spreads: list[float]
    degenerate_indices: list[int] = []


class ScalabilityReason(str, Enum):
    CONTAINS_ORTHONORMAL_PAIR = "ContainsOrthonormalPair"
    RATIO_INCONSISTENT = "RatioInconsistent"
    IDENTITY_VIOLATED = "IdentityViolated"
    SIGN_PATTERN_INCONSISTENT = "SignPatternInconsistent"
    WEIGHT_OUT_OF_RANGE = "WeightOutOfRange"
    DEGENERATE_ANGLES = "DegenerateAngles"
    SCALED_NOT_PARSEVAL = "ScaledNotParseval"


class ScalabilityVerdict(BaseModel):
    scalable: bool
    weights: Optional[list[float]] = None
    candidate_squares: list[float] = []
    max_identity_residual: float
    ratio_spread: float = 0.0
    reason: Optional[ScalabilityReason] = None

    @property
    def scaling_weights(self) -> Optional[ScalingWeights]:
        if self.weights is None:
            return None
        return ScalingWeights(np.asarray(self.weights))


class CheckStatus(str, Enum):
    PASS = "pass"
    FAIL = "fail"
    SKIP = "skip"


class CheckRecord(BaseModel):
    name: str
    status: CheckStatus
    max_residual: Optional[float] = None
    note: str = ""


class DiagnosticsReport(BaseModel):
    n: int
    N: int
    tolerance: float
    checks: list[CheckRecord]

    @property
    def passed(self) -> bool:
        return all(c.status != CheckStatus.FAIL for c in self.checks)

    def get(self, name: str) -> CheckRecord:
        for check in self.checks:
            if check.name == name:
                return check
        raise KeyError(name)
