"""JSON state and density-matrix files.

State file::

    {"dims": [2, 2], "amplitudes": [[re, im], ...]}

Density file::

    {"dims": [2, 2], "matrix": [[[re, im], ...], ...]}   # row-major

Amplitudes follow the little-endian mixed-radix basis order.
"""

from __future__ import annotations

import json
import logging
import os
import tempfile
from pathlib import Path

import numpy as np

from .errors import DimensionError, EntDistError, NormalizationError
from .roof import DensityMatrix
from .tensor import StateVector, check_dims

log = logging.getLogger(__name__)

NORM_TOL = 1e-6
RENORM_TOL = 1e-3


class FileFormatError(EntDistError):
    pass


def _complex_list(values, what: str) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.ndim < 1 or arr.shape[-1] != 2:
        raise FileFormatError(f"{what} must be [re, im] pairs")
    out = arr[..., 0] + 1j * arr[..., 1]
    if not np.all(np.isfinite(out)):
        raise FileFormatError(f"{what} contains non-finite values")
    return out


def _read_json(path) -> dict:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, UnicodeDecodeError) as exc:
        raise FileFormatError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise FileFormatError(f"{path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict) or "dims" not in doc:
        raise FileFormatError(f"{path}: expected an object with a 'dims' field")
    return doc


def _dims(doc) -> tuple[int, ...]:
    if not isinstance(doc, dict) or "dims" not in doc:
        raise FileFormatError("expected an object with a 'dims' field")
    try:
        dims = check_dims(doc["dims"])
    except (TypeError, ValueError) as exc:
        raise FileFormatError(f"bad dims: {exc}") from exc
    return dims


def state_from_dict(doc: dict) -> StateVector:
    dims = _dims(doc)
    if "amplitudes" not in doc:
        raise FileFormatError("missing 'amplitudes'")
    try:
        amps = _complex_list(doc["amplitudes"], "amplitudes").reshape(-1)
    except (TypeError, ValueError) as exc:
        raise FileFormatError(f"bad amplitudes: {exc}") from exc
    if amps.size != int(np.prod(dims)):
        raise FileFormatError(f"{amps.size} amplitudes for dims {list(dims)}")
    dev = abs(float(np.linalg.norm(amps)) - 1.0)
    if dev > RENORM_TOL:
        raise NormalizationError(f"state norm deviates from 1 by {dev:.3e}")
    if dev > NORM_TOL:
        log.warning("state norm deviates from 1 by %.3e; renormalising", dev)
    return StateVector.from_amplitudes(dims, amps, normalize=True)


def load_state(path) -> StateVector:
    return state_from_dict(_read_json(path))


def state_to_dict(state: StateVector) -> dict:
    return {
        "dims": list(state.dims),
        "amplitudes": [[float(a.real), float(a.imag)] for a in state.amps],
    }


def save_state(state: StateVector, path) -> None:
    atomic_write_text(path, json.dumps(state_to_dict(state)) + "\n")


def density_from_dict(doc: dict) -> DensityMatrix:
    dims = _dims(doc)
    if "matrix" not in doc:
        raise FileFormatError("missing 'matrix'")
    try:
        mat = _complex_list(doc["matrix"], "matrix")
    except (TypeError, ValueError) as exc:
        raise FileFormatError(f"bad matrix: {exc}") from exc
    n = int(np.prod(dims))
    if mat.shape != (n, n):
        raise FileFormatError(f"matrix shape {mat.shape} does not match dims {list(dims)}")
    try:
        return DensityMatrix(dims, mat)
    except DimensionError as exc:  # pragma: no cover - shape checked above
        raise FileFormatError(str(exc)) from exc


def load_density(path) -> DensityMatrix:
    return density_from_dict(_read_json(path))


def density_to_dict(rho: DensityMatrix) -> dict:
    return {
        "dims": list(rho.dims),
        "matrix": [[[float(z.real), float(z.imag)] for z in row] for row in rho.rho],
    }


def save_density(rho: DensityMatrix, path) -> None:
    atomic_write_text(path, json.dumps(density_to_dict(rho)) + "\n")


def atomic_write_text(path, text: str) -> None:
    """Write via a temp file in the same directory, then rename over ``path``."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent or ".")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except FileNotFoundError:
            pass
        raise
