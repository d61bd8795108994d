"""Entanglement distance for pure and mixed states of hybrid multi-qudit systems."""

__version__ = "0.1.0"

from ._kernels import BACKEND
from .families import (
    Family,
    brs,
    brs_unitary,
    ghzls,
    hybrid_qubit_qutrit,
    make_state,
    qutrit_ghz,
    three_qubit,
)
from .generators import GeneratorSet, gellmann, max_generator_eigenvalue, verify_identities
from .measure import (
    EntanglementResult,
    FsMetric,
    LocalCovariance,
    brs_w_vectors,
    covariance_matrix,
    distance_bound_check,
    em_eigenvalues,
    entanglement,
    entanglement_metric,
    entanglement_pure,
    fs_metric,
    max_entanglement,
    trace_min_directions,
    von_neumann_entropy,
)
from .roof import (
    Decomposition,
    DensityMatrix,
    RoofConfig,
    RoofResult,
    decomposition_from_isometry,
    minimize_roof,
    roof_objective,
)
from .tensor import (
    HermitianSpectrum,
    StateVector,
    embed_local,
    expectation,
    hermitian_eig,
    kron,
    partial_trace,
)

__all__ = [name for name in dir() if not name.startswith("_")]
