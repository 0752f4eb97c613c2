"""On-disk layout of the extractor's tensor writer."""

import struct

import numpy as np
import pytest

from score_extractor.tensorfile import TensorFileError, read_tensor, write_tensor


def test_layout_matches_contract(tmp_path):
    path = tmp_path / "t.nsgt"
    values = np.arange(6, dtype=np.float64).reshape(2, 3)
    write_tensor(path, values)
    raw = path.read_bytes()
    expected = b"NSGT" + struct.pack("<IIII", 1, 2, 2, 3)
    expected += values.astype("<f4").tobytes()
    assert raw == expected


def test_roundtrip(tmp_path):
    rng = np.random.default_rng(3)
    values = rng.standard_normal((8, 16)).astype(np.float32).astype(np.float64)
    path = tmp_path / "rt.nsgt"
    write_tensor(path, values)
    assert (read_tensor(path) == values).all()


def test_rejects_nonfinite(tmp_path):
    with pytest.raises(TensorFileError):
        write_tensor(tmp_path / "bad.nsgt", np.array([np.inf]))


def test_rejects_bad_payload(tmp_path):
    path = tmp_path / "bad.nsgt"
    path.write_bytes(b"NSGT" + struct.pack("<IIII", 1, 2, 2, 2) + b"\x00" * 12)
    with pytest.raises(TensorFileError):
        read_tensor(path)
