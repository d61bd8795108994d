"""Analytic state families used throughout the examples and the CLI.

Qubit kets written as ``|n_{M-1} ... n_0>`` map to basis index
``sum_mu n_mu 2**mu``; the leftmost ket factor is the highest subsystem.
"""

from __future__ import annotations

import enum
from math import comb

import numpy as np

from .errors import DimensionError
from .tensor import StateVector, embed_local

MAX_BRS_QUBITS = 14


class Family(str, enum.Enum):
    BRS = "brs"
    GHZLS = "ghzls"
    THREE_QUBIT = "three_qubit"
    HYBRID_23 = "hybrid"
    QUTRIT_GHZ = "qutrit_ghz"

    @classmethod
    def _missing_(cls, value):
        if isinstance(value, str):
            v = value.strip().lower().replace("-", "_")
            for member in cls:
                if v in (member.value, member.name.lower()):
                    return member
        return None


# parameter names each family accepts, integer-valued ones first
FAMILY_PARAMS: dict[Family, tuple[str, ...]] = {
    Family.BRS: ("m", "phi"),
    Family.GHZLS: ("m", "theta", "phase"),
    Family.THREE_QUBIT: ("gamma", "tau"),
    Family.HYBRID_23: ("theta",),
    Family.QUTRIT_GHZ: ("m", "theta", "phi"),
}


def pair_count(k: int, m: int) -> int:
    """Number of adjacent pairs with digit mu+1 = 0 and digit mu = 1.

    Equivalently, occurrences of the substring ``"01"`` in the ket label
    ``n_{M-1} ... n_0`` read left to right (open chain, mu = 0..M-2).
    """
    return sum(1 for mu in range(m - 1) if not (k >> (mu + 1)) & 1 and (k >> mu) & 1)


def brs_eigenvalue(n: int, phi: float) -> complex:
    """Binomial-sum eigenvalue ``sum_j C(n, j) alpha^j`` with alpha = e^{-i phi} - 1."""
    alpha = np.exp(-1j * phi) - 1.0
    return complex(sum(comb(n, j) * alpha**j for j in range(n + 1)))


def _check_m(m: int, lo: int = 2, hi: int | None = None) -> int:
    m = int(m)
    if m < lo or (hi is not None and m > hi):
        raise DimensionError(f"qubit count must be in [{lo}, {hi or 'inf'}], got {m}")
    return m


def brs(m: int, phi: float) -> StateVector:
    """Linear-chain Briegel-Raussendorf state ``U_0(phi)|+...+>``.

    Amplitudes are ``2^{-M/2} e^{-i phi n(k)}``, the closed form of the
    binomial eigenvalue sum.
    """
    m = _check_m(m, 2, MAX_BRS_QUBITS)
    k = np.arange(2**m)
    bits = (k[:, None] >> np.arange(m)[None, :]) & 1
    n = np.sum((bits[:, :-1] == 1) & (bits[:, 1:] == 0), axis=1)
    amps = np.exp(-1j * phi * n) / 2 ** (m / 2)
    return StateVector.from_amplitudes((2,) * m, amps)


def brs_unitary(m: int, phi: float) -> np.ndarray:
    """Dense ``prod_mu (I + alpha P0^{mu+1} P1^{mu})`` over adjacent pairs.

    Kept as a cross-check for :func:`brs`; builds 2^M x 2^M matrices.
    """
    m = _check_m(m, 2, 12)
    dims = (2,) * m
    alpha = np.exp(-1j * phi) - 1.0
    p0 = np.diag([1.0, 0.0])
    p1 = np.diag([0.0, 1.0])
    u = np.eye(2**m, dtype=np.complex128)
    for mu in range(m - 1):
        term = embed_local(p1, mu, dims) @ embed_local(p0, mu + 1, dims)
        u = u @ (np.eye(2**m) + alpha * term)
    return u


def ghzls(m: int, theta: float, phase: float = 0.0) -> StateVector:
    m = _check_m(m)
    amps = np.zeros(2**m, dtype=np.complex128)
    amps[0] = np.cos(theta)
    amps[-1] = np.sin(theta) * np.exp(1j * phase)
    return StateVector((2,) * m, amps)


def three_qubit(gamma: float, tau: float) -> StateVector:
    """cos g |0>(cos t|00> + sin t|11>) + sin g |1>(sin t|00> + cos t|11>)."""
    cg, sg = np.cos(gamma), np.sin(gamma)
    ct, st = np.cos(tau), np.sin(tau)
    amps = np.zeros(8, dtype=np.complex128)
    # |n2 n1 n0> -> index 4 n2 + 2 n1 + n0
    amps[0b000] = cg * ct
    amps[0b011] = cg * st
    amps[0b100] = sg * st
    amps[0b111] = sg * ct
    return StateVector((2, 2, 2), amps)


def hybrid_qubit_qutrit(theta: float) -> StateVector:
    """cos t |+,0> + sin t |-,2> on dims (2, 3), with +/- the qubit levels 0/1."""
    amps = np.zeros(6, dtype=np.complex128)
    # qubit is subsystem 0 (stride 1), qutrit subsystem 1 (stride 2)
    amps[0 + 2 * 0] = np.cos(theta)
    amps[1 + 2 * 2] = np.sin(theta)
    return StateVector((2, 3), amps)


def qutrit_ghz(m: int, theta: float, phi: float) -> StateVector:
    m = _check_m(m)
    dims = (3,) * m
    amps = np.zeros(3**m, dtype=np.complex128)
    ones = sum(3**mu for mu in range(m))
    amps[0] = np.sin(theta) * np.cos(phi)
    amps[ones] = np.sin(theta) * np.sin(phi)
    amps[2 * ones] = np.cos(theta)
    return StateVector(dims, amps)


def make_state(family: Family | str, **params) -> StateVector:
    family = Family(family)
    if family is Family.BRS:
        return brs(int(params["m"]), params["phi"])
    if family is Family.GHZLS:
        return ghzls(int(params["m"]), params["theta"], params.get("phase", 0.0))
    if family is Family.THREE_QUBIT:
        return three_qubit(params["gamma"], params["tau"])
    if family is Family.HYBRID_23:
        return hybrid_qubit_qutrit(params["theta"])
    return qutrit_ghz(int(params["m"]), params["theta"], params["phi"])
