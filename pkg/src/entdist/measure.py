"""Entanglement measure, Fubini-Study metric and entanglement metric.

All generator expectations are taken on single-subsystem reduced density
matrices (``<T_mu k> = tr(rho_mu T_k)``), which costs O(d_mu * D) per
subsystem instead of forming D x D embedded operators.  Two-body terms of
the metric are computed as overlaps ``<O_mu s | O_nu s>`` of locally
rotated state vectors.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionError, NormalizationError, UnsupportedDimsError
from .generators import gellmann, purity_value
from .tensor import (
    StateVector,
    apply_local,
    check_dims,
    hermitian_eig,
    local_density,
    partial_trace,
)

PAULI = gellmann(2).t
FALLBACK_DIRECTION = np.array([0.0, 0.0, 1.0])


@dataclass
class LocalCovariance:
    mu: int
    a: np.ndarray

    @property
    def trace(self) -> float:
        return float(np.trace(self.a).real)


@dataclass
class EntanglementResult:
    e: float
    per_subsystem: np.ndarray
    e_max: float
    dims: tuple[int, ...]
    # E recomputed as sum_mu [tr A_mu - 2(d_mu - 1)]
    e_trace_form: float = float("nan")

    @property
    def e_per_m(self) -> float:
        return self.e / len(self.dims)


@dataclass
class FsMetric:
    g: np.ndarray
    directions: list[np.ndarray] = field(default_factory=list)

    @property
    def trace(self) -> float:
        return float(np.trace(self.g))


def max_entanglement(dims: Sequence[int]) -> float:
    """Upper bound sum_mu 2(d_mu - 1)/d_mu."""
    return float(sum(purity_value(d) for d in check_dims(dims)))


def _require_normalized(state: StateVector, tol: float = 1e-9) -> None:
    if state.norm_error() > tol:
        raise NormalizationError(f"state norm deviates from 1 by {state.norm_error():.3e}")


def _require_qubits(state: StateVector) -> None:
    if any(d != 2 for d in state.dims):
        raise UnsupportedDimsError(f"qubit-only operation, got dims {state.dims}")


def _check_mu(state: StateVector, mu: int) -> None:
    if not 0 <= mu < state.m:
        raise DimensionError(f"subsystem {mu} out of range for {state.m} subsystems")


def local_expectations(state: StateVector, mu: int) -> np.ndarray:
    """Vector of ``<s|T_{mu k}|s>`` for k = 1..d_mu^2 - 1."""
    _check_mu(state, mu)
    rho = local_density(state, mu)
    return np.einsum("kij,ji->k", gellmann(state.dims[mu]).t, rho).real


def bloch_vector(state: StateVector, mu: int) -> np.ndarray:
    if state.dims[mu] != 2:
        raise UnsupportedDimsError(f"subsystem {mu} has d = {state.dims[mu]}, not a qubit")
    return local_expectations(state, mu)


def covariance_matrix(state: StateVector, mu: int) -> LocalCovariance:
    """``A_ij = <T_i T_j> - <T_i><T_j>`` on subsystem ``mu``."""
    _check_mu(state, mu)
    t = gellmann(state.dims[mu]).t
    rho = local_density(state, mu)
    second = np.einsum("iab,jbc,ca->ij", t, t, rho)
    first = np.einsum("kij,ji->k", t, rho).real
    return LocalCovariance(mu, second - np.outer(first, first))


def entanglement_pure(state: StateVector, check: bool = True) -> EntanglementResult:
    """Entanglement measure of a pure state.

    ``E = sum_mu [2(d_mu-1)/d_mu - sum_k <T_mu k>^2]``.  With ``check`` the
    covariance-trace form ``sum_mu [tr A_mu - 2(d_mu-1)]`` is evaluated too
    and must agree within 1e-10.
    """
    _require_normalized(state)
    per = np.empty(state.m)
    trace_form = 0.0
    for mu, d in enumerate(state.dims):
        ev = local_expectations(state, mu)
        per[mu] = purity_value(d) - float(ev @ ev)
        if check:
            trace_form += covariance_matrix(state, mu).trace - 2.0 * (d - 1)
    e = float(per.sum())
    if check and abs(trace_form - e) > 1e-10:
        raise ArithmeticError(
            f"dual forms of E disagree: {e!r} vs {trace_form!r}"
        )
    return EntanglementResult(
        e=e,
        per_subsystem=per,
        e_max=max_entanglement(state.dims),
        dims=state.dims,
        e_trace_form=trace_form if check else float("nan"),
    )


def entanglement(state: StateVector) -> float:
    return entanglement_pure(state, check=False).e


def brs_w_vectors(state: StateVector) -> list[np.ndarray]:
    """Per-qubit vectors built from the amplitude sums w_-, w_+, w_3.

    ``w_- = sum_{n_nu=0} c*_{k+2^nu} c_k``, ``w_+ = sum_{n_nu=1} c*_{k-2^nu} c_k``
    and ``w_3 = sum_k (-1)^{n_nu} |c_k|^2``.  They are returned as the real
    3-vector ``(w_+ + w_-, (w_+ - w_-)/i, w_3)``, which is the qubit's Bloch
    vector, so that ``E = M - sum_nu |w_nu|^2``.
    """
    _require_qubits(state)
    c = state.amps
    k = np.arange(c.size)
    out = []
    for nu in range(state.m):
        bit = (k >> nu) & 1
        low = k[bit == 0]
        high = k[bit == 1]
        w_minus = np.sum(np.conj(c[low + 2**nu]) * c[low])
        w_plus = np.sum(np.conj(c[high - 2**nu]) * c[high])
        w3 = np.sum(np.where(bit == 0, 1.0, -1.0) * np.abs(c) ** 2)
        out.append(np.array([(w_plus + w_minus).real, ((w_plus - w_minus) / 1j).real, w3]))
    return out


def _as_directions(state: StateVector, dirs, tol: float = 1e-9) -> list[np.ndarray]:
    dirs = [np.asarray(v, dtype=float).reshape(-1) for v in dirs]
    if len(dirs) != state.m:
        raise DimensionError(f"need {state.m} directions, got {len(dirs)}")
    for mu, (v, d) in enumerate(zip(dirs, state.dims)):
        if v.size != d * d - 1:
            raise DimensionError(f"direction {mu} has length {v.size}, expected {d * d - 1}")
        if abs(np.linalg.norm(v) - 1.0) > tol:
            raise ValueError(f"direction {mu} is not a unit vector (norm {np.linalg.norm(v):.6g})")
    return dirs


def fs_metric(state: StateVector, dirs) -> FsMetric:
    """``g_mn = <(v.T)_m (v.T)_n> - <(v.T)_m><(v.T)_n>`` for unit directions."""
    _require_normalized(state)
    dirs = _as_directions(state, dirs)
    rotated = []
    for mu, v in enumerate(dirs):
        op = np.tensordot(v, gellmann(state.dims[mu]).t, axes=1)
        rotated.append(apply_local(state, op, mu))
    w = np.array(rotated)
    mean = (w @ state.amps.conj()).real  # <s|O_mu|s>, O Hermitian
    gram = w.conj() @ w.T
    if np.max(np.abs(gram.imag)) > 1e-10:
        raise ArithmeticError("metric has a non-negligible imaginary part")
    g = gram.real - np.outer(mean, mean)
    return FsMetric(0.5 * (g + g.T), dirs)


def trace_min_directions(state: StateVector) -> list[np.ndarray]:
    """Per-qubit unit Bloch directions minimising tr g(v).

    Uses ``+b/|b|``; qubits with ``|b| <= 1e-8`` get (0, 0, 1).
    """
    _require_qubits(state)
    out = []
    for mu in range(state.m):
        b = bloch_vector(state, mu)
        nb = np.linalg.norm(b)
        out.append(b / nb if nb > 1e-8 else FALLBACK_DIRECTION.copy())
    return out


def entanglement_metric(state: StateVector, directions=None) -> FsMetric:
    """Entanglement metric: the metric at trace-minimising directions.

    ``directions`` overrides the default choice, which matters only for
    qubits whose Bloch vector vanishes.
    """
    _require_qubits(state)
    dirs = trace_min_directions(state) if directions is None else directions
    return fs_metric(state, dirs)


def em_eigenvalues(state: StateVector, directions=None) -> np.ndarray:
    return hermitian_eig(entanglement_metric(state, directions).g).eigenvalues


def random_directions(dims: Sequence[int], rng: np.random.Generator) -> list[np.ndarray]:
    out = []
    for d in dims:
        v = rng.standard_normal(d * d - 1)
        out.append(v / np.linalg.norm(v))
    return out


@dataclass
class BoundReport:
    e: float
    min_trace: float
    trials: int
    violations: int

    @property
    def ok(self) -> bool:
        return self.violations == 0


def distance_bound_check(state: StateVector, trials: int = 100, seed: int = 0,
                         tol: float = 1e-9) -> BoundReport:
    """Sample random direction sets and confirm ``tr g(v) >= E``."""
    _require_qubits(state)
    e = entanglement(state)
    rng = np.random.default_rng(seed)
    traces = np.array(
        [fs_metric(state, random_directions(state.dims, rng)).trace for _ in range(trials)]
    )
    return BoundReport(e, float(traces.min()), trials, int(np.sum(traces < e - tol)))


def von_neumann_entropy(state: StateVector, keep: Iterable[int]) -> float:
    """Entropy (base 2) of the reduced state on ``keep``; 0 log 0 := 0."""
    rho = partial_trace(state, keep)
    lam = hermitian_eig(rho).eigenvalues
    lam = lam[lam > 1e-15]
    return float(-np.sum(lam * np.log2(lam)))
