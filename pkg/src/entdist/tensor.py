"""Dense linear algebra over mixed-radix tensor-product spaces.

Basis ordering is little-endian mixed radix: subsystem 0 is the least
significant digit, so basis index ``k = sum_mu n_mu * prod_{nu<mu} d_nu``.
For qubits this is ``k = sum_mu n_mu 2**mu``.  Reshaping an amplitude vector
in C order therefore gives a tensor whose *last* axis is subsystem 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from . import _kernels
from .errors import DimensionError, NormalizationError, NotHermitianError

MAX_DIM = 2**24


def check_dims(dims: Iterable[int]) -> tuple[int, ...]:
    """Validate subsystem dimensions and return them as a tuple of ints."""
    out = tuple(int(d) for d in dims)
    if len(out) < 1:
        raise DimensionError("at least one subsystem is required")
    if any(d < 2 for d in out):
        raise DimensionError(f"every subsystem dimension must be >= 2, got {out}")
    total = int(np.prod(out, dtype=object))
    if total > MAX_DIM:
        raise DimensionError(f"total dimension {total} exceeds cap {MAX_DIM}")
    return out


def strides(dims: Sequence[int]) -> tuple[int, ...]:
    out, acc = [], 1
    for d in dims:
        out.append(acc)
        acc *= d
    return tuple(out)


def digits(k: int, dims: Sequence[int]) -> tuple[int, ...]:
    """Mixed-radix digits (n_0, ..., n_{M-1}) of basis index ``k``."""
    out = []
    for d in dims:
        out.append(k % d)
        k //= d
    return tuple(out)


def basis_index(ns: Sequence[int], dims: Sequence[int]) -> int:
    return int(sum(n * s for n, s in zip(ns, strides(dims))))


@dataclass(frozen=True)
class StateVector:
    """Normalised pure state over ``dims`` (amplitudes are read-only)."""

    dims: tuple[int, ...]
    amps: np.ndarray

    def __post_init__(self):
        dims = check_dims(self.dims)
        amps = np.array(self.amps, dtype=np.complex128).reshape(-1)
        if amps.size != int(np.prod(dims)):
            raise DimensionError(
                f"{amps.size} amplitudes do not match dims {dims} (D={int(np.prod(dims))})"
            )
        if not np.all(np.isfinite(amps)):
            raise NormalizationError("amplitudes must be finite")
        amps.setflags(write=False)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "amps", amps)

    @classmethod
    def from_amplitudes(cls, dims, amps, normalize: bool = True) -> "StateVector":
        amps = np.asarray(amps, dtype=np.complex128).reshape(-1)
        if normalize:
            nrm = np.linalg.norm(amps)
            if nrm == 0.0 or not np.isfinite(nrm):
                raise NormalizationError("cannot normalise a zero or non-finite vector")
            amps = amps / nrm
        return cls(tuple(dims), amps)

    @classmethod
    def product(cls, locals_: Sequence[np.ndarray]) -> "StateVector":
        """Product state from single-subsystem vectors listed as subsystem 0, 1, ..."""
        vecs = [np.asarray(v, dtype=np.complex128) for v in locals_]
        amps = np.ones(1, dtype=np.complex128)
        for v in vecs:
            amps = np.kron(v, amps)
        return cls.from_amplitudes([v.size for v in vecs], amps)

    @property
    def dim(self) -> int:
        return self.amps.size

    @property
    def m(self) -> int:
        return len(self.dims)

    def norm_error(self) -> float:
        return abs(float(np.linalg.norm(self.amps)) - 1.0)

    def tensor(self) -> np.ndarray:
        """Amplitudes as a tensor with axes (n_{M-1}, ..., n_0)."""
        return self.amps.reshape(self.dims[::-1])


class HermitianSpectrum(NamedTuple):
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    residual: float
    sweeps: int


def is_hermitian(a: np.ndarray, tol: float = 1e-10) -> bool:
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        return False
    return bool(np.linalg.norm(a - a.conj().T) <= tol * max(1.0, np.linalg.norm(a)))


def is_unitary(a: np.ndarray, tol: float = 1e-10) -> bool:
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        return False
    return bool(np.linalg.norm(a.conj().T @ a - np.eye(a.shape[0])) <= tol)


def _square(a, name="operator") -> np.ndarray:
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {a.shape}")
    return a


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product; entry ``[(ia*db+ib), (ja*db+jb)] = a[ia,ja] b[ib,jb]``."""
    a, b = _square(a), _square(b)
    n = a.shape[0] * b.shape[0]
    if n > MAX_DIM:
        raise DimensionError(f"kron dimension {n} exceeds cap {MAX_DIM}")
    return (a[:, None, :, None] * b[None, :, None, :]).reshape(n, n)


def embed_local(op: np.ndarray, mu: int, dims: Sequence[int]) -> np.ndarray:
    """D x D matrix acting as ``op`` on subsystem ``mu`` and identity elsewhere."""
    dims = check_dims(dims)
    op = _square(op)
    if not 0 <= mu < len(dims):
        raise DimensionError(f"subsystem index {mu} out of range for {len(dims)} subsystems")
    if op.shape[0] != dims[mu]:
        raise DimensionError(f"operator dim {op.shape[0]} != d_{mu} = {dims[mu]}")
    low = int(np.prod(dims[:mu], dtype=np.int64))
    high = int(np.prod(dims[mu + 1 :], dtype=np.int64))
    return kron(kron(np.eye(high), op), np.eye(low))


def apply_local(state: StateVector | np.ndarray, op: np.ndarray, mu: int,
                dims: Sequence[int] | None = None) -> np.ndarray:
    """``(op on subsystem mu) |state>`` without forming the D x D matrix."""
    if isinstance(state, StateVector):
        dims, amps = state.dims, state.amps
    else:
        amps = np.asarray(state, dtype=np.complex128)
    m = len(dims)
    ax = m - 1 - mu
    t = amps.reshape(tuple(dims[::-1]))
    out = np.tensordot(op, t, axes=([1], [ax]))
    return np.moveaxis(out, 0, ax).reshape(-1)


def expectation(state: StateVector, op: np.ndarray) -> complex:
    op = _square(op)
    if op.shape[0] != state.dim:
        raise DimensionError(f"operator dim {op.shape[0]} != state dim {state.dim}")
    return complex(np.vdot(state.amps, op @ state.amps))


def partial_trace(state: StateVector, keep: Iterable[int]) -> np.ndarray:
    """Reduced density matrix on ``keep`` (little-endian among kept subsystems)."""
    m = state.m
    keep = sorted({int(k) for k in keep})
    if not keep or len(keep) >= m:
        raise DimensionError("keep must be a non-empty strict subset of the subsystems")
    if keep[0] < 0 or keep[-1] >= m:
        raise DimensionError(f"keep {keep} out of range for {m} subsystems")
    t = state.tensor()
    kept_axes = [m - 1 - k for k in reversed(keep)]
    traced = [ax for ax in range(m) if ax not in kept_axes]
    rho = np.tensordot(t, t.conj(), axes=(traced, traced))
    dk = int(np.prod([state.dims[k] for k in keep]))
    return rho.reshape(dk, dk)


def local_density(state: StateVector, mu: int) -> np.ndarray:
    """Single-subsystem reduced density matrix (works for M = 1 as well)."""
    if state.m == 1:
        return np.outer(state.amps, state.amps.conj())
    return partial_trace(state, [mu])


def hermitian_eig(a: np.ndarray, tol: float = 1e-12, max_sweeps: int = 100,
                  check: float = 1e-10) -> HermitianSpectrum:
    """Cyclic Jacobi eigendecomposition, eigenvalues sorted descending.

    Raises ``NotHermitianError`` when ``a`` is not Hermitian within ``check``
    (relative to its Frobenius norm).
    """
    a = _square(a, "matrix")
    if not is_hermitian(a, check):
        raise NotHermitianError("hermitian_eig requires a Hermitian matrix")
    a = 0.5 * (a + a.conj().T)
    w, v, off, sweeps = _kernels.jacobi(np.ascontiguousarray(a), tol, max_sweeps)
    order = np.argsort(-w, kind="stable")
    return HermitianSpectrum(w[order], v[:, order], float(off), int(sweeps))


def eigvalsh(a: np.ndarray) -> np.ndarray:
    return hermitian_eig(a).eigenvalues


def haar_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random d x d unitary (QR of a Ginibre matrix with phase fix)."""
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph[None, :]


def random_state(dims: Sequence[int], rng: np.random.Generator) -> StateVector:
    dims = check_dims(dims)
    n = int(np.prod(dims))
    z = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return StateVector.from_amplitudes(dims, z)


def apply_local_unitaries(state: StateVector, unitaries: Sequence[np.ndarray]) -> StateVector:
    amps = state.amps
    for mu, u in enumerate(unitaries):
        amps = apply_local(amps, u, mu, state.dims)
    return StateVector(state.dims, amps)
