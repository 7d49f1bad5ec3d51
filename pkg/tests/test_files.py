import json
import os
import sys

import numpy as np
import pytest

sys.path.append(os.path.abspath("."))

from src.frames.construct import construct
from src.frames.core import random_parseval
from src.frames.errors import FrameFileError
from src.frames.files import (
    FrameFile,
    detect_format,
    parse_vector,
    read_frame,
    read_frame_file,
    write_frame,
)


def test_structured_layout(tmp_path):
    frame = construct([0.5, 0.5]).frame
    path = tmp_path / "frame.json"
    write_frame(path, frame, name="triangular", seed=[0.5, 0.5])

    data = json.loads(path.read_text())
    assert list(data) == ["n", "N", "vectors", "metadata"]
    assert (data["n"], data["N"]) == (2, 3)
    # rows are vectors
    assert data["vectors"][2] == [0.5, 0.5]
    assert data["metadata"]["name"] == "triangular"

    np.testing.assert_array_equal(read_frame(path).columns, frame.columns)


@pytest.mark.parametrize("suffix", [".json", ".csv", ".tsv", ".txt"])
def test_round_trip_is_byte_identical(tmp_path, suffix):
    frame = random_parseval(3, 5, 9)
    first = tmp_path / f"a{suffix}"
    second = tmp_path / f"b{suffix}"
    write_frame(first, frame)
    write_frame(second, read_frame_file(first))
    assert first.read_bytes() == second.read_bytes()
    np.testing.assert_array_equal(read_frame(first).columns, frame.columns)


def test_dsv_layout(tmp_path):
    path = tmp_path / "frame.csv"
    write_frame(path, construct([0.5, 0.5]).frame)
    lines = path.read_text().splitlines()
    assert len(lines) == 3
    assert lines[2] == "0.5,0.5"
    assert all(len(line.split(",")) == 2 for line in lines)


def test_format_override(tmp_path):
    path = tmp_path / "frame.dat"
    write_frame(path, random_parseval(2, 3, 0), fmt="dsv")
    assert read_frame(path, fmt="dsv").N == 3
    with pytest.raises(FrameFileError):
        detect_format(path)


@pytest.mark.parametrize(
    "name, text",
    [
        ("truncated.json", '{"n": 2, "N": 3, "vectors": [[1.0, 0.0], [0.0, 1.0]'),
        ("count.json", '{"n": 2, "N": 3, "vectors": [[1.0, 0.0], [0.0, 1.0]]}'),
        ("ragged.csv", "1.0,0.0\n0.5\n"),
        ("words.csv", "1.0,zero\n"),
        ("empty.csv", "\n"),
        ("nan.csv", "1.0,nan\n0.0,1.0\n"),
    ],
)
def test_malformed_files(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    with pytest.raises(FrameFileError):
        read_frame(path)


def test_missing_file(tmp_path):
    with pytest.raises(FrameFileError):
        read_frame(tmp_path / "absent.json")


def test_fewer_vectors_than_dimension(tmp_path):
    path = tmp_path / "short.json"
    path.write_text(FrameFile(n=3, N=2, vectors=[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]).model_dump_json())
    assert read_frame_file(path).N == 2
    with pytest.raises(FrameFileError):
        read_frame(path)


def test_parse_vector():
    np.testing.assert_array_equal(parse_vector("0.5,0.5"), [0.5, 0.5])
    np.testing.assert_array_equal(parse_vector(" 0.3, -0.4 0.2 "), [0.3, -0.4, 0.2])
    with pytest.raises(FrameFileError):
        parse_vector("0.5,abc")
    with pytest.raises(FrameFileError):
        parse_vector("")
