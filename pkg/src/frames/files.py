"""
Frame file I/O.

Files list one vector per row; FrameMatrix stores vectors as columns. The
reader transposes via FrameMatrix.from_vectors and the writer uses
frame.vectors, so nothing else should touch the layout.

Formats:
  structured  JSON object with keys n, N, vectors, metadata (fixed order)
  dsv         one vector per line, n delimiter-separated numbers, no header
"""
from __future__ import annotations

import logging
import math
from pathlib import Path
from typing import Literal, Optional

import numpy as np
from pydantic import BaseModel, Field, ValidationError, model_validator

from src.frames.errors import FrameError, FrameFileError
from src.frames.models import FrameMatrix

logger = logging.getLogger(__name__)

Format = Literal["structured", "dsv"]

STRUCTURED_SUFFIXES = {".json"}
DSV_DELIMITERS = {".csv": ",", ".tsv": "\t", ".dsv": ",", ".txt": " "}


class FrameMetadata(BaseModel):
    name: Optional[str] = None
    seed: Optional[int | list[float]] = None
    tolerance: Optional[float] = None


class FrameFile(BaseModel):
    """On-disk frame: N rows of n reals."""

    n: int = Field(ge=1)
    N: int = Field(ge=1)
    vectors: list[list[float]]
    metadata: FrameMetadata = FrameMetadata()

    @model_validator(mode="after")
    def _check_shape(self) -> "FrameFile":
        if len(self.vectors) != self.N:
            raise ValueError(f"Expected N = {self.N} vectors, found {len(self.vectors)}")
        for row in self.vectors:
            if len(row) != self.n:
                raise ValueError(f"Every vector needs n = {self.n} entries, found {len(row)}")
            if not all(math.isfinite(x) for x in row):
                raise ValueError("Non-finite entry in vectors")
        return self

    @classmethod
    def from_frame(cls, frame: FrameMatrix, **metadata) -> "FrameFile":
        return cls(
            n=frame.n,
            N=frame.N,
            vectors=frame.vectors.tolist(),
            metadata=FrameMetadata(**metadata),
        )

    def to_frame(self) -> FrameMatrix:
        return FrameMatrix.from_vectors(np.array(self.vectors, dtype=np.float64).reshape(self.N, self.n))


def detect_format(path: str | Path, override: Optional[Format] = None) -> Format:
    if override:
        return override
    suffix = Path(path).suffix.lower()
    if suffix in STRUCTURED_SUFFIXES:
        return "structured"
    if suffix in DSV_DELIMITERS:
        return "dsv"
    raise FrameFileError(f"Cannot infer frame format from extension '{suffix}'")


def _delimiter(path: str | Path) -> str:
    return DSV_DELIMITERS.get(Path(path).suffix.lower(), ",")


def dumps(frame_file: FrameFile, fmt: Format, delimiter: str = ",") -> str:
    if fmt == "structured":
        return frame_file.model_dump_json(indent=2) + "\n"
    lines = [delimiter.join(format(x, ".17g") for x in row) for row in frame_file.vectors]
    return "\n".join(lines) + "\n"


def loads(text: str, fmt: Format, delimiter: str = ",") -> FrameFile:
    try:
        if fmt == "structured":
            return FrameFile.model_validate_json(text)
        rows = []
        for line in text.splitlines():
            line = line.strip()
            if not line:
                continue
            parts = line.split() if delimiter == " " else line.split(delimiter)
            rows.append([float(p) for p in parts])
        if not rows:
            raise FrameFileError("Empty frame file")
        return FrameFile(n=len(rows[0]), N=len(rows), vectors=rows)
    except (ValidationError, ValueError) as e:
        raise FrameFileError(f"Malformed {fmt} frame: {e}") from e


def read_frame_file(path: str | Path, fmt: Optional[Format] = None) -> FrameFile:
    fmt = detect_format(path, fmt)
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise FrameFileError(f"Cannot read {path}: {e}") from e
    return loads(text, fmt, _delimiter(path))


def read_frame(path: str | Path, fmt: Optional[Format] = None) -> FrameMatrix:
    frame_file = read_frame_file(path, fmt)
    try:
        return frame_file.to_frame()
    except FrameError as e:
        raise FrameFileError(f"{path}: {e}") from e


def write_frame(path: str | Path, frame: FrameMatrix | FrameFile, fmt: Optional[Format] = None, **metadata) -> None:
    fmt = detect_format(path, fmt)
    frame_file = frame if isinstance(frame, FrameFile) else FrameFile.from_frame(frame, **metadata)
    try:
        Path(path).write_text(dumps(frame_file, fmt, _delimiter(path)), encoding="utf-8")
    except OSError as e:
        raise FrameFileError(f"Cannot write {path}: {e}") from e
    logger.info(f"Wrote {frame_file.N} vectors in R^{frame_file.n} to {path}")


def parse_vector(text: str) -> np.ndarray:
    """Comma- or whitespace-separated reals."""
    parts = [p for p in text.replace(",", " ").split() if p]
    try:
        values = np.array([float(p) for p in parts], dtype=np.float64)
    except ValueError as e:
        raise FrameFileError(f"Cannot parse vector '{text}': {e}") from e
    if values.size == 0 or not np.all(np.isfinite(values)):
        raise FrameFileError(f"Vector '{text}' must hold finite reals")
    return values
