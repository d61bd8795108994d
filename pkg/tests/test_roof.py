import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from entdist import _kernels
from entdist.errors import DimensionError, InvalidDensityMatrixError
from entdist.families import ghzls
from entdist.measure import entanglement, max_entanglement
from entdist.roof import (
    Decomposition,
    DensityMatrix,
    RoofConfig,
    decomposition_from_isometry,
    embedded_generators,
    local_unitary_conjugate,
    minimize_roof,
    random_isometry,
    roof_objective,
)
from entdist.tensor import StateVector, apply_local_unitaries, haar_unitary, random_state

YY = np.kron([[0, -1j], [1j, 0]], [[0, -1j], [1j, 0]])
FAST = RoofConfig(restarts=8)


def sqrtm_psd(a):
    w, v = np.linalg.eigh(a)
    return (v * np.sqrt(np.clip(w, 0, None))) @ v.conj().T


def concurrence(rho):
    """Two-qubit concurrence via the Hermitian form sqrt(sqrt(rho) rho~ sqrt(rho))."""
    s = sqrtm_psd(rho)
    r = s @ YY @ rho.conj() @ YY @ s
    lam = np.sqrt(np.clip(np.linalg.eigvalsh(0.5 * (r + r.conj().T)), 0, None))[::-1]
    return max(0.0, lam[0] - lam[1] - lam[2] - lam[3])


def random_rho(dims, rank, rng):
    states = [random_state(dims, rng) for _ in range(rank)]
    return DensityMatrix.mixture(rng.dirichlet(np.ones(rank)), states)


def basis(dims, k):
    amps = np.zeros(int(np.prod(dims)))
    amps[k] = 1
    return StateVector(dims, amps)


class TestDensityMatrix:
    def test_shape_checked(self):
        with pytest.raises(DimensionError):
            DensityMatrix((2, 2), np.eye(3))

    def test_validate(self, rng):
        random_rho((2, 2), 3, rng).validate()
        with pytest.raises(InvalidDensityMatrixError):
            DensityMatrix((2,), [[1, 1], [0, 0]]).validate()
        with pytest.raises(InvalidDensityMatrixError):
            DensityMatrix((2,), np.eye(2)).validate()
        with pytest.raises(InvalidDensityMatrixError):
            DensityMatrix((2,), np.diag([1.5, -0.5])).validate()

    def test_rank(self, rng):
        assert DensityMatrix.from_pure(random_state((2, 3), rng)).rank == 1
        assert random_rho((2, 2), 3, rng).rank == 3


class TestIsometry:
    def test_identity_gives_eigen_ensemble(self, rng):
        rho = random_rho((2, 2), 3, rng)
        lam, vecs = rho.spectrum()
        dec = decomposition_from_isometry(rho, np.eye(3))
        np.testing.assert_allclose(dec.probs, lam, atol=1e-12)
        for s, e in zip(dec.states, vecs.T):
            assert abs(abs(np.vdot(s.amps, e)) - 1) < 1e-12

    def test_pure_state_rows(self, rng):
        psi = random_state((2, 3), rng)
        rho = DensityMatrix.from_pure(psi)
        v = random_isometry(4, 1, rng)
        dec = decomposition_from_isometry(rho, v)
        for s in dec.states:
            assert abs(abs(np.vdot(s.amps, psi.amps)) - 1) < 1e-12

    def test_hadamard_on_maximally_mixed_qubit(self):
        rho = DensityMatrix((2,), np.eye(2) / 2)
        h = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
        dec = decomposition_from_isometry(rho, h)
        np.testing.assert_allclose(dec.probs, [0.5, 0.5], atol=1e-14)
        plus, minus = np.array([1, 1]) / np.sqrt(2), np.array([1, -1]) / np.sqrt(2)
        assert abs(abs(np.vdot(dec.states[0].amps, plus)) - 1) < 1e-14
        assert abs(abs(np.vdot(dec.states[1].amps, minus)) - 1) < 1e-14

    def test_zero_rows_dropped(self, rng):
        rho = random_rho((2, 2), 2, rng)
        v = np.zeros((5, 2), dtype=complex)
        v[1, 0] = v[3, 1] = 1
        assert len(decomposition_from_isometry(rho, v)) == 2

    def test_rejects_non_isometry(self, rng):
        rho = random_rho((2, 2), 2, rng)
        with pytest.raises(ValueError):
            decomposition_from_isometry(rho, np.ones((3, 2)))
        with pytest.raises(DimensionError):
            decomposition_from_isometry(rho, np.eye(3))

    @settings(max_examples=30, deadline=None)
    @given(st.integers(1, 4), st.integers(0, 4), st.integers(0, 2**32 - 1))
    def test_reconstruction(self, rank, extra, seed):
        rng = np.random.default_rng(seed)
        rho = random_rho((2, 2), rank, rng)
        r = rho.rank
        dec = decomposition_from_isometry(rho, random_isometry(r + extra, r, rng))
        assert dec.reconstruction_error(rho) < 1e-8
        assert abs(dec.probs.sum() - 1) < 1e-10
        assert np.all(dec.probs >= 0)


class TestObjective:
    def test_product_ensemble(self):
        dec = Decomposition(np.array([0.5, 0.5]), [basis((2, 2), 0), basis((2, 2), 3)])
        assert roof_objective(dec) == 0.0

    def test_single_ghz(self):
        dec = Decomposition(np.array([1.0]), [ghzls(2, np.pi / 4)])
        assert roof_objective(dec) == pytest.approx(2.0, abs=1e-12)

    def test_range(self, rng):
        probs = rng.dirichlet(np.ones(4))
        dec = Decomposition(probs, [random_state((2, 3), rng) for _ in range(4)])
        assert 0 <= roof_objective(dec) <= max_entanglement((2, 3))


class TestKernels:
    def _problem(self, rng, dims=(2, 2), rank=3, nl=9):
        rho = random_rho(dims, rank, rng)
        lam, vecs = rho.spectrum()
        amat = np.ascontiguousarray(vecs * np.sqrt(lam))
        return random_isometry(nl, rank, rng), amat, embedded_generators(dims), max_entanglement(dims)

    def test_value_is_ensemble_average(self, rng):
        v, amat, gens, ctot = self._problem(rng)
        f, _ = _kernels.roof_value_grad_numpy(v, amat, gens, ctot)
        phi = v @ amat.T
        p = np.einsum("jd,jd->j", phi.conj(), phi).real
        direct = sum(pj * entanglement(StateVector((2, 2), row / np.sqrt(pj))) for row, pj in zip(phi, p))
        assert f == pytest.approx(direct, abs=1e-12)

    def test_backends_agree(self, rng):
        v, amat, gens, ctot = self._problem(rng, dims=(2, 3), rank=2, nl=4)
        fa, ga = _kernels.roof_value_grad_numba(v, amat, gens, ctot)
        fb, gb = _kernels.roof_value_grad_numpy(v, amat, gens, ctot)
        assert fa == pytest.approx(fb, abs=1e-12)
        np.testing.assert_allclose(ga, gb, atol=1e-12)

    def test_gradient_finite_difference(self, rng, backend):
        vg = getattr(_kernels, f"roof_value_grad_{backend}")
        v, amat, gens, ctot = self._problem(rng)
        _, g = vg(v, amat, gens, ctot)
        h = 1e-6
        for _ in range(5):
            e = rng.standard_normal(v.shape) + 1j * rng.standard_normal(v.shape)
            fp, _ = vg(v + h * e, amat, gens, ctot)
            fm, _ = vg(v - h * e, amat, gens, ctot)
            assert (fp - fm) / (2 * h) == pytest.approx(float(np.sum(g.conj() * e).real), rel=1e-6, abs=1e-8)

    def test_descent_keeps_isometry(self, rng, backend):
        desc = getattr(_kernels, f"descend_{backend}")
        v, amat, gens, ctot = self._problem(rng)
        f0, _ = _kernels.roof_value_grad_numpy(v, amat, gens, ctot)
        w, f, it, _ = desc(np.ascontiguousarray(v), amat, gens, float(ctot), 200, 1e-9)
        assert np.linalg.norm(w.conj().T @ w - np.eye(v.shape[1])) < 1e-10
        assert f <= f0
        assert 1 <= it <= 200

    def test_retractions_agree(self, rng):
        y = rng.standard_normal((6, 3)) + 1j * rng.standard_normal((6, 3))
        np.testing.assert_allclose(_kernels._retract_mgs(y), _kernels._retract_qr_numpy(y), atol=1e-12)

    def test_backend_flag(self):
        code = "import entdist._kernels as k; print(k.BACKEND, k.descend is k.descend_numpy)"
        env = dict(os.environ, ENTDIST_BACKEND="numpy")
        out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
        assert out.stdout.split() == ["numpy", "True"]

    def test_backend_flag_rejects_unknown(self):
        env = dict(os.environ, ENTDIST_BACKEND="fortran")
        out = subprocess.run([sys.executable, "-c", "import entdist"], env=env, capture_output=True, text=True)
        assert out.returncode != 0
        assert "ENTDIST_BACKEND" in out.stderr


class TestMinimizeRoof:
    def test_pure_state(self, rng):
        psi = random_state((2, 3), rng)
        res = minimize_roof(DensityMatrix.from_pure(psi), FAST)
        assert res.value == pytest.approx(entanglement(psi), abs=1e-8)

    def test_classical_mixture(self):
        rho = DensityMatrix.mixture([0.5, 0.5], [basis((2, 2), 0), basis((2, 2), 3)])
        assert minimize_roof(rho).value < 1e-6

    @pytest.mark.parametrize("seed", range(6))
    def test_two_qubit_closed_form(self, seed):
        # for two qubits the roof equals 2 C(rho)^2
        rng = np.random.default_rng(seed)
        rho = random_rho((2, 2), int(rng.integers(2, 5)), rng)
        oracle = 2 * concurrence(rho.rho) ** 2
        res = minimize_roof(rho)
        assert res.value >= oracle - 1e-9
        assert res.value == pytest.approx(oracle, abs=1e-6)

    def test_result_is_labelled_upper_bound(self, rng):
        res = minimize_roof(random_rho((2, 2), 2, rng), FAST)
        assert res.upper_bound is True
        assert "upper bound" in res.label
        value, dec = res
        assert value == res.value and dec is res.decomposition

    def test_bookkeeping(self, rng):
        rho = random_rho((2, 3), 3, rng)
        res = minimize_roof(rho, FAST)
        assert len(res.restart_values) == FAST.restarts + 1
        assert np.all(np.diff(res.best_so_far) <= 0)
        assert res.best_so_far[-1] == min(res.restart_values)
        assert res.restart_values[res.best_restart] == min(res.restart_values)
        assert res.decomposition.reconstruction_error(rho) < 1e-8
        assert 0 <= res.value <= max_entanglement(rho.dims) + 1e-9

    def test_deterministic(self, rng):
        rho = random_rho((2, 2), 3, rng)
        a = minimize_roof(rho, RoofConfig(restarts=6, seed=11))
        b = minimize_roof(rho, RoofConfig(restarts=6, seed=11))
        assert a.value == b.value
        assert a.restart_values == b.restart_values
        np.testing.assert_array_equal(a.decomposition.probs, b.decomposition.probs)

    def test_restart_values_independent_of_count(self, rng):
        # restart i depends only on (seed, i)
        rho = random_rho((2, 2), 2, rng)
        few = minimize_roof(rho, RoofConfig(restarts=3, seed=5, spectral_start=False))
        many = minimize_roof(rho, RoofConfig(restarts=6, seed=5, spectral_start=False))
        assert few.restart_values == many.restart_values[:3]

    def test_tie_break_lowest_index(self):
        rho = DensityMatrix.from_pure(ghzls(2, 0.3))
        res = minimize_roof(rho, RoofConfig(restarts=4))
        assert res.best_restart == int(np.argmin(res.restart_values))

    def test_local_unitary_invariance(self, rng):
        for _ in range(3):
            rho = random_rho((2, 2), 2, rng)
            moved = local_unitary_conjugate(rho, [haar_unitary(2, rng) for _ in range(2)])
            assert abs(minimize_roof(moved).value - minimize_roof(rho).value) < 1e-5

    def test_local_unitary_conjugate_ordering(self, rng):
        psi = random_state((2, 3), rng)
        us = [haar_unitary(2, rng), haar_unitary(3, rng)]
        moved = apply_local_unitaries(psi, us)
        np.testing.assert_allclose(
            local_unitary_conjugate(DensityMatrix.from_pure(psi), us).rho,
            np.outer(moved.amps, moved.amps.conj()),
            atol=1e-12,
        )

    def test_config_errors(self, rng):
        rho = random_rho((2, 2), 3, rng)
        with pytest.raises(ValueError):
            minimize_roof(rho, RoofConfig(restarts=0))
        with pytest.raises(ValueError):
            minimize_roof(rho, RoofConfig(ensemble_len=2))

    def test_non_convergence_returns_best_iterate(self, rng):
        rho = random_rho((2, 2), 4, rng)
        res = minimize_roof(rho, RoofConfig(restarts=2, max_iters=1, spectral_start=False))
        assert not any(res.converged)
        assert res.decomposition.reconstruction_error(rho) < 1e-8
