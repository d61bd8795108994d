"""Convex-roof extension of the measure to density matrices.

Every length-L ensemble of a rank-r state ``rho = sum_i lambda_i |e_i><e_i|``
is ``sqrt(p_j)|psi_j> = sum_i V_ji sqrt(lambda_i)|e_i>`` for an L x r
isometry V.  ``minimize_roof`` searches that manifold with random restarts
and a conjugate-gradient descent that keeps V an isometry at every step, so
its value is a heuristic upper bound on the roof, never a certified minimum.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import _kernels
from .errors import DimensionError, InvalidDensityMatrixError
from .generators import gellmann
from .measure import entanglement, max_entanglement
from .tensor import StateVector, check_dims, embed_local, hermitian_eig

RANK_THRESHOLD = 1e-12
DROP_THRESHOLD = 1e-14


@dataclass(frozen=True)
class DensityMatrix:
    dims: tuple[int, ...]
    rho: np.ndarray

    def __post_init__(self):
        dims = check_dims(self.dims)
        rho = np.array(self.rho, dtype=np.complex128)
        n = int(np.prod(dims))
        if rho.shape != (n, n):
            raise DimensionError(f"density matrix shape {rho.shape} does not match dims {dims}")
        rho.setflags(write=False)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "rho", rho)

    @classmethod
    def from_pure(cls, state: StateVector) -> "DensityMatrix":
        return cls(state.dims, np.outer(state.amps, state.amps.conj()))

    @classmethod
    def mixture(cls, probs: Sequence[float], states: Sequence[StateVector]) -> "DensityMatrix":
        rho = sum(p * np.outer(s.amps, s.amps.conj()) for p, s in zip(probs, states))
        return cls(states[0].dims, rho)

    def validate(self, herm_tol: float = 1e-10, psd_tol: float = 1e-9,
                 trace_tol: float = 1e-10) -> None:
        rho = self.rho
        scale = max(1.0, float(np.linalg.norm(rho)))
        if np.linalg.norm(rho - rho.conj().T) > herm_tol * scale:
            raise InvalidDensityMatrixError("density matrix is not Hermitian")
        if abs(np.trace(rho) - 1.0) > trace_tol:
            raise InvalidDensityMatrixError(f"trace is {np.trace(rho).real:.12g}, expected 1")
        lo = hermitian_eig(rho).eigenvalues[-1]
        if lo < -psd_tol:
            raise InvalidDensityMatrixError(f"minimum eigenvalue {lo:.3e} below -{psd_tol:g}")

    def spectrum(self):
        sp = hermitian_eig(self.rho)
        keep = sp.eigenvalues > RANK_THRESHOLD
        return sp.eigenvalues[keep], sp.eigenvectors[:, keep]

    @property
    def rank(self) -> int:
        return int(self.spectrum()[0].size)


@dataclass
class Decomposition:
    probs: np.ndarray
    states: list[StateVector]

    def density(self) -> np.ndarray:
        return sum(p * np.outer(s.amps, s.amps.conj()) for p, s in zip(self.probs, self.states))

    def reconstruction_error(self, rho: DensityMatrix) -> float:
        return float(np.linalg.norm(self.density() - rho.rho))

    def __len__(self):
        return len(self.states)


@dataclass
class RoofConfig:
    ensemble_len: int | None = None  # default max(r^2, 4)
    restarts: int = 32
    max_iters: int = 500
    step_tol: float = 1e-9
    seed: int = 0
    spectral_start: bool = True  # one extra start at the eigen-ensemble


@dataclass
class RoofResult:
    value: float
    decomposition: Decomposition
    restart_values: list[float]
    best_restart: int
    iterations: list[int]
    converged: list[bool]
    upper_bound: bool = True
    label: str = "upper bound (heuristic)"
    best_so_far: list[float] = field(default_factory=list)

    def __iter__(self):
        yield self.value
        yield self.decomposition


def _weighted_eigenvectors(rho: DensityMatrix) -> np.ndarray:
    lam, vecs = rho.spectrum()
    return vecs * np.sqrt(lam)[None, :]


def decomposition_from_isometry(rho: DensityMatrix, v: np.ndarray,
                                tol: float = 1e-10) -> Decomposition:
    """Ensemble ``sqrt(p_j)|psi_j> = sum_i V_ji sqrt(lambda_i)|e_i>``."""
    amat = _weighted_eigenvectors(rho)
    v = np.asarray(v, dtype=np.complex128)
    r = amat.shape[1]
    if v.ndim != 2 or v.shape[1] != r:
        raise DimensionError(f"isometry must have {r} columns (rank of rho), got shape {v.shape}")
    if np.linalg.norm(v.conj().T @ v - np.eye(r)) > tol:
        raise ValueError("V is not an isometry (V^dag V != I)")
    phi = v @ amat.T
    probs = np.einsum("jd,jd->j", phi.conj(), phi).real
    keep = probs >= DROP_THRESHOLD
    states = [StateVector(rho.dims, row / np.sqrt(p)) for row, p in zip(phi[keep], probs[keep])]
    return Decomposition(probs[keep], states)


def roof_objective(dec: Decomposition) -> float:
    """Ensemble average ``sum_j p_j E(psi_j)``."""
    return float(sum(p * entanglement(s) for p, s in zip(dec.probs, dec.states)))


def embedded_generators(dims: Sequence[int]) -> np.ndarray:
    """All generators of all subsystems embedded as D x D matrices, stacked."""
    mats = []
    for mu, d in enumerate(dims):
        for t in gellmann(d).t:
            mats.append(embed_local(t, mu, dims))
    return np.ascontiguousarray(np.array(mats))


def random_isometry(rows: int, cols: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph[None, :]


def minimize_roof(rho: DensityMatrix, cfg: RoofConfig | None = None) -> RoofResult:
    """Best ensemble average found over random isometry restarts.

    Restart ``i`` draws its starting isometry from the ``i``-th child of
    ``SeedSequence(cfg.seed)``, so results do not depend on evaluation order.
    With ``cfg.spectral_start`` one more descent starts from the padded
    identity (the eigen-ensemble) and is reported last. Ties go to the
    lowest restart index.
    """
    cfg = cfg or RoofConfig()
    if cfg.restarts < 1:
        raise ValueError("restarts must be >= 1")
    amat = np.ascontiguousarray(_weighted_eigenvectors(rho))
    r = amat.shape[1]
    nl = cfg.ensemble_len if cfg.ensemble_len is not None else max(r * r, 4)
    if nl < r:
        raise ValueError(f"ensemble length {nl} is below rank {r}")
    gens = embedded_generators(rho.dims)
    ctot = max_entanglement(rho.dims)
    children = np.random.SeedSequence(cfg.seed).spawn(cfg.restarts)

    starts = [lambda c=c: random_isometry(nl, r, np.random.default_rng(c)) for c in children]
    if cfg.spectral_start:
        starts.append(lambda: np.eye(nl, r, dtype=np.complex128))

    values, iters, conv, best_so_far = [], [], [], []
    best_v, best_val, best_idx = None, np.inf, -1
    for i, start in enumerate(starts):
        v0 = start()
        v, f, it, ok = _kernels.descend(
            np.ascontiguousarray(v0), amat, gens, float(ctot), int(cfg.max_iters), float(cfg.step_tol)
        )
        values.append(float(f))
        iters.append(int(it))
        conv.append(bool(ok))
        if f < best_val:
            best_v, best_val, best_idx = v, float(f), i
        best_so_far.append(best_val)

    dec = decomposition_from_isometry(rho, best_v)
    return RoofResult(
        value=roof_objective(dec),
        decomposition=dec,
        restart_values=values,
        best_restart=best_idx,
        iterations=iters,
        converged=conv,
        best_so_far=best_so_far,
    )


def local_unitary_conjugate(rho: DensityMatrix, unitaries: Sequence[np.ndarray]) -> DensityMatrix:
    u = np.eye(1, dtype=np.complex128)
    for w in reversed(list(unitaries)):
        u = np.kron(u, w)
    return DensityMatrix(rho.dims, u @ rho.rho @ u.conj().T)
