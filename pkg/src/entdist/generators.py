"""Generalised Gell-Mann generators of su(d).

Ordering (1-based ``l``, as returned 0-based in the stacked array):

* symmetric  ``E_jk + E_kj``       at ``l = 2(k-j) + (j-1)(2d-j) - 1``
* antisymmetric ``-i(E_jk - E_kj)`` at ``l = 2(k-j) + (j-1)(2d-j)``
* diagonal ``sqrt(2/(k(k+1))) [sum_{j<=k} E_jj - k E_{k+1,k+1}]`` at ``l = d(d-1) + k``

for ``1 <= j < k <= d`` and ``1 <= k <= d-1``.  For d = 2 this is
(sigma_x, sigma_y, sigma_z); for d = 3 the off-diagonal pairs are grouped by
(j, k) = (1,2), (1,3), (2,3) followed by the two diagonal matrices.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .errors import DimensionError
from .tensor import StateVector, haar_unitary, hermitian_eig

MAX_D = 64


def symmetric_index(j: int, k: int, d: int) -> int:
    return 2 * (k - j) + (j - 1) * (2 * d - j) - 1


def antisymmetric_index(j: int, k: int, d: int) -> int:
    return 2 * (k - j) + (j - 1) * (2 * d - j)


def diagonal_index(k: int, d: int) -> int:
    return d * (d - 1) + k


def generator_labels(d: int) -> dict[int, tuple]:
    """Map 1-based generator index -> ('sym'|'anti', j, k) or ('diag', k)."""
    labels: dict[int, tuple] = {}
    for j in range(1, d):
        for k in range(j + 1, d + 1):
            labels[symmetric_index(j, k, d)] = ("sym", j, k)
            labels[antisymmetric_index(j, k, d)] = ("anti", j, k)
    for k in range(1, d):
        labels[diagonal_index(k, d)] = ("diag", k)
    return labels


def index_of(label: tuple, d: int) -> int:
    """Inverse of :func:`generator_labels` (1-based)."""
    kind = label[0]
    if kind == "sym":
        return symmetric_index(label[1], label[2], d)
    if kind == "anti":
        return antisymmetric_index(label[1], label[2], d)
    if kind == "diag":
        return diagonal_index(label[1], d)
    raise ValueError(f"unknown generator label {label!r}")


@dataclass(frozen=True)
class GeneratorSet:
    d: int
    t: np.ndarray  # shape (d*d-1, d, d); t[l-1] is T_l

    def __len__(self):
        return self.t.shape[0]

    def __getitem__(self, ell: int) -> np.ndarray:
        """1-based access, ``g[1]`` is the first generator."""
        if not 1 <= ell <= len(self):
            raise IndexError(ell)
        return self.t[ell - 1]


def _build(d: int) -> np.ndarray:
    t = np.zeros((d * d - 1, d, d), dtype=np.complex128)
    for (ell, label) in generator_labels(d).items():
        m = t[ell - 1]
        if label[0] == "sym":
            j, k = label[1] - 1, label[2] - 1
            m[j, k] = m[k, j] = 1.0
        elif label[0] == "anti":
            j, k = label[1] - 1, label[2] - 1
            m[j, k] = -1j
            m[k, j] = 1j
        else:
            k = label[1]
            m[np.arange(k), np.arange(k)] = 1.0
            m[k, k] = -k
            m *= np.sqrt(2.0 / (k * (k + 1)))
    return t


@lru_cache(maxsize=None)
def gellmann(d: int) -> GeneratorSet:
    """The d^2 - 1 generalised Gell-Mann matrices (cached, read-only)."""
    d = int(d)
    if d < 2 or d > MAX_D:
        raise DimensionError(f"gellmann needs 2 <= d <= {MAX_D}, got {d}")
    t = _build(d)
    t.setflags(write=False)
    return GeneratorSet(d, t)


def casimir_value(d: int) -> float:
    return 2.0 * (d * d - 1) / d


def purity_value(d: int) -> float:
    return 2.0 * (d - 1) / d


def bloch_components(g: GeneratorSet, rho: np.ndarray) -> np.ndarray:
    """Real vector of ``tr(rho T_l)`` for l = 1..d^2-1."""
    return np.einsum("lij,ji->l", g.t, rho).real


def max_generator_eigenvalue(g: GeneratorSet) -> float:
    """Largest spectral radius over the generator set."""
    return float(max(np.max(np.abs(hermitian_eig(tk).eigenvalues)) for tk in g.t))


@dataclass
class IdentityReport:
    d: int
    casimir_residual: float
    purity_residual: float
    frame_residual: float
    hermitian_residual: float
    trace_residual: float
    orthogonality_residual: float
    max_eigenvalue: float
    max_eigenvalue_residual: float

    def ok(self, tol: float = 1e-9) -> bool:
        return all(
            r < tol
            for r in (
                self.casimir_residual,
                self.purity_residual,
                self.frame_residual,
                self.hermitian_residual,
                self.trace_residual,
                self.orthogonality_residual,
                self.max_eigenvalue_residual,
            )
        )


def verify_identities(g: GeneratorSet, probes: Sequence[StateVector],
                      n_unitaries: int = 100, seed: int = 0) -> IdentityReport:
    """Residuals of the Casimir, purity-sum and frame-invariance identities.

    Frame invariance is tested by conjugating every generator with a random
    unitary and comparing ``sum_k <U^dag T_k U>^2`` against the bare sum, for
    each probe.
    """
    d = g.d
    for p in probes:
        if p.dims != (d,):
            raise DimensionError(f"probe dims {p.dims} do not match generator dimension {d}")
    t = g.t
    cas = np.einsum("lij,ljk->ik", t, t)
    casimir_res = float(np.linalg.norm(cas - casimir_value(d) * np.eye(d)))

    def bloch_sq(vec, ts):
        ev = np.einsum("i,lij,j->l", vec.conj(), ts, vec).real
        return float(ev @ ev)

    purity_res = 0.0
    for p in probes:
        purity_res = max(purity_res, abs(bloch_sq(p.amps, t) - purity_value(d)))

    rng = np.random.default_rng(seed)
    frame_res = 0.0
    for _ in range(n_unitaries):
        u = haar_unitary(d, rng)
        tu = np.einsum("ji,ljk,km->lim", u.conj(), t, u)
        for p in probes:
            frame_res = max(frame_res, abs(bloch_sq(p.amps, tu) - bloch_sq(p.amps, t)))

    herm = float(max(np.linalg.norm(tk - tk.conj().T) for tk in t))
    trace = float(max(abs(np.trace(tk)) for tk in t))
    gram = np.einsum("aij,bji->ab", t, t)
    ortho = float(np.max(np.abs(gram - 2.0 * np.eye(len(t)))))
    lam = max_generator_eigenvalue(g)
    return IdentityReport(
        d=d,
        casimir_residual=casimir_res,
        purity_residual=purity_res,
        frame_residual=frame_res,
        hermitian_residual=herm,
        trace_residual=trace,
        orthogonality_residual=ortho,
        max_eigenvalue=lam,
        max_eigenvalue_residual=abs(lam - np.sqrt(purity_value(d))),
    )
