import json
import logging

import numpy as np
import pytest

from entdist.errors import NormalizationError
from entdist.families import hybrid_qubit_qutrit
from entdist.io import (
    FileFormatError,
    atomic_write_text,
    density_from_dict,
    load_density,
    load_state,
    save_density,
    save_state,
    state_from_dict,
    state_to_dict,
)
from entdist.roof import DensityMatrix
from entdist.tensor import random_state


def test_state_roundtrip(tmp_path, rng):
    s = random_state((2, 3, 2), rng)
    save_state(s, tmp_path / "s.json")
    back = load_state(tmp_path / "s.json")
    assert back.dims == s.dims
    np.testing.assert_allclose(back.amps, s.amps, atol=1e-15)


def test_density_roundtrip(tmp_path, rng):
    a = random_state((2, 2), rng)
    rho = DensityMatrix.from_pure(a)
    save_density(rho, tmp_path / "r.json")
    back = load_density(tmp_path / "r.json")
    np.testing.assert_array_equal(back.rho, rho.rho)


def test_layout():
    doc = state_to_dict(hybrid_qubit_qutrit(0.0))
    assert doc["dims"] == [2, 3]
    assert doc["amplitudes"][0] == [1.0, 0.0]
    assert len(doc["amplitudes"]) == 6


def test_small_deviation_renormalised(caplog):
    doc = {"dims": [2], "amplitudes": [[1.0005, 0], [0, 0]]}
    with caplog.at_level(logging.WARNING):
        s = state_from_dict(doc)
    assert s.norm_error() < 1e-12
    assert "renormalising" in caplog.text


def test_tiny_deviation_silent(caplog):
    with caplog.at_level(logging.WARNING):
        state_from_dict({"dims": [2], "amplitudes": [[1 + 1e-8, 0], [0, 0]]})
    assert caplog.text == ""


def test_large_deviation_rejected():
    with pytest.raises(NormalizationError):
        state_from_dict({"dims": [2], "amplitudes": [[1.1, 0], [0, 0]]})


@pytest.mark.parametrize(
    "doc",
    [
        {"amplitudes": [[1, 0], [0, 0]]},
        {"dims": [2]},
        {"dims": [2], "amplitudes": [[1, 0]]},
        {"dims": [2], "amplitudes": [1, 0]},
        {"dims": [1], "amplitudes": [[1, 0]]},
        {"dims": "two", "amplitudes": [[1, 0], [0, 0]]},
        {"dims": [2], "amplitudes": [[1, 0], ["x", 0]]},
    ],
)
def test_malformed_state(doc):
    with pytest.raises(FileFormatError):
        state_from_dict(doc)


def test_malformed_density():
    with pytest.raises(FileFormatError):
        density_from_dict({"dims": [2, 2], "matrix": [[[1, 0]]]})
    with pytest.raises(FileFormatError):
        density_from_dict({"dims": [2]})


def test_unreadable(tmp_path):
    with pytest.raises(FileFormatError):
        load_state(tmp_path / "missing.json")
    (tmp_path / "bad.json").write_text("{not json")
    with pytest.raises(FileFormatError):
        load_state(tmp_path / "bad.json")
    (tmp_path / "list.json").write_text(json.dumps([1, 2]))
    with pytest.raises(FileFormatError):
        load_state(tmp_path / "list.json")


def test_atomic_write_leaves_no_temp(tmp_path):
    target = tmp_path / "out.txt"
    atomic_write_text(target, "a\n")
    atomic_write_text(target, "b\n")
    assert target.read_text() == "b\n"
    assert [p.name for p in tmp_path.iterdir()] == ["out.txt"]
