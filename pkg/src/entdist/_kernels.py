"""Hot numerical kernels with a numba path and a pure-numpy fallback.

The backend is chosen once at import time from the ``ENTDIST_BACKEND``
environment variable (``numba`` or ``numpy``). When unset, numba is used if
it imports cleanly. Both implementations of every kernel are always
importable (``*_numba`` / ``*_numpy``) so tests and benchmarks can compare
them directly; the unsuffixed names are bound to the selected backend.

The numba kernels use explicit loops only (no ``np.dot``/``np.linalg``) so
they do not pull in numba's LAPACK bindings.
"""

from __future__ import annotations

import logging
import math
import os

import numpy as np

log = logging.getLogger(__name__)

_requested = os.environ.get("ENTDIST_BACKEND", "").strip().lower()
if _requested not in ("", "numba", "numpy"):
    raise ImportError(
        f"ENTDIST_BACKEND must be 'numba' or 'numpy', got {_requested!r}"
    )

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda f: f


if _requested == "numba" and not HAVE_NUMBA:  # pragma: no cover
    raise ImportError("ENTDIST_BACKEND=numba but numba is not installed")

BACKEND = "numpy" if (_requested == "numpy" or not HAVE_NUMBA) else "numba"


# ---------------------------------------------------------------------------
# Cyclic Jacobi for complex Hermitian matrices
# ---------------------------------------------------------------------------


def _offdiag_norm(a):
    n = a.shape[0]
    acc = 0.0
    for i in range(n):
        for j in range(n):
            if i != j:
                acc += a[i, j].real ** 2 + a[i, j].imag ** 2
    return math.sqrt(acc)


def _make_jacobi_loops(off_norm):
    def jacobi_loops(a, tol, max_sweeps):
        # a is overwritten; returns (diag, eigenvectors, off-diagonal norm, sweeps)
        n = a.shape[0]
        v = np.zeros((n, n), dtype=np.complex128)
        for i in range(n):
            v[i, i] = 1.0
        total = 0.0
        for i in range(n):
            for j in range(n):
                total += a[i, j].real ** 2 + a[i, j].imag ** 2
        target = tol * math.sqrt(total)
        off = off_norm(a)
        sweeps = 0
        while off > target and sweeps < max_sweeps:
            for p in range(n - 1):
                for q in range(p + 1, n):
                    apq = a[p, q]
                    mag = abs(apq)
                    if mag < 1e-300:
                        continue
                    e = apq / mag
                    ec = e.conjugate()
                    tau = (a[q, q].real - a[p, p].real) / (2.0 * mag)
                    if abs(tau) > 1e150:
                        t = 0.5 / tau
                    elif tau >= 0.0:
                        t = 1.0 / (tau + math.sqrt(1.0 + tau * tau))
                    else:
                        t = -1.0 / (-tau + math.sqrt(1.0 + tau * tau))
                    c = 1.0 / math.sqrt(1.0 + t * t)
                    s = t * c
                    for k in range(n):
                        akp = a[k, p]
                        akq = a[k, q]
                        a[k, p] = c * akp - s * ec * akq
                        a[k, q] = s * e * akp + c * akq
                    for k in range(n):
                        apk = a[p, k]
                        aqk = a[q, k]
                        a[p, k] = c * apk - s * e * aqk
                        a[q, k] = s * ec * apk + c * aqk
                    for k in range(n):
                        vkp = v[k, p]
                        vkq = v[k, q]
                        v[k, p] = c * vkp - s * ec * vkq
                        v[k, q] = s * e * vkp + c * vkq
            sweeps += 1
            off = off_norm(a)
        w = np.empty(n, dtype=np.float64)
        for i in range(n):
            w[i] = a[i, i].real
        return w, v, off, sweeps

    return jacobi_loops


def jacobi_numpy(a, tol, max_sweeps):
    """Row/column-vectorised twin of the loop kernel."""
    a = np.array(a, dtype=np.complex128, copy=True)
    n = a.shape[0]
    v = np.eye(n, dtype=np.complex128)
    target = tol * np.linalg.norm(a)

    def off_norm(m):
        return float(np.linalg.norm(m[~np.eye(m.shape[0], dtype=bool)]))

    off = off_norm(a)
    sweeps = 0
    while off > target and sweeps < max_sweeps:
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag < 1e-300:
                    continue
                e = apq / mag
                ec = e.conjugate()
                tau = (a[q, q].real - a[p, p].real) / (2.0 * mag)
                if abs(tau) > 1e150:
                    t = 0.5 / tau
                elif tau >= 0.0:
                    t = 1.0 / (tau + math.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                cp, cq = a[:, p].copy(), a[:, q].copy()
                a[:, p] = c * cp - s * ec * cq
                a[:, q] = s * e * cp + c * cq
                rp, rq = a[p, :].copy(), a[q, :].copy()
                a[p, :] = c * rp - s * e * rq
                a[q, :] = s * ec * rp + c * rq
                vp, vq = v[:, p].copy(), v[:, q].copy()
                v[:, p] = c * vp - s * ec * vq
                v[:, q] = s * e * vp + c * vq
        sweeps += 1
        off = off_norm(a)
    return np.real(np.diag(a)).copy(), v, off, sweeps


_jacobi_core = njit(_make_jacobi_loops(njit(_offdiag_norm)))


def jacobi_numba(a, tol, max_sweeps):
    a = np.array(a, dtype=np.complex128, copy=True)
    return _jacobi_core(a, float(tol), int(max_sweeps))


# ---------------------------------------------------------------------------
# Convex-roof objective and Riemannian descent on the complex Stiefel manifold
# ---------------------------------------------------------------------------
#
# For an isometry V (L x r) and weighted eigenvectors A (D x r, column i is
# sqrt(lambda_i) e_i), the unnormalised ensemble members are the rows of
# Phi = V A^T.  With p_j = |phi_j|^2 and t_jk = <phi_j|T_k|phi_j>,
#     f(V) = C * sum_j p_j - sum_j sum_k t_jk^2 / p_j
# where C = sum_mu 2(d_mu - 1)/d_mu and T_k runs over all embedded generators.


def roof_value_grad_numpy(v, amat, gens, ctot):
    phi = v @ amat.T
    p = np.einsum("jd,jd->j", phi.conj(), phi).real
    tphi = np.einsum("kde,je->jkd", gens, phi)
    t = np.einsum("jd,jkd->jk", phi.conj(), tphi).real
    live = p > 1e-300
    inv = np.where(live, 1.0 / np.where(live, p, 1.0), 0.0)
    f = ctot * p.sum() - np.sum((t**2).sum(axis=1) * inv)
    dphi = (
        ctot * phi
        - 2.0 * np.einsum("jk,jkd->jd", t, tphi) * inv[:, None]
        + ((t**2).sum(axis=1) * inv**2)[:, None] * phi
    )
    return f, 2.0 * dphi @ amat.conj()


def _roof_value_grad_loops(v, amat, gens, ctot):
    nl, r = v.shape
    dim = amat.shape[0]
    nk = gens.shape[0]
    phi = np.zeros((nl, dim), dtype=np.complex128)
    for j in range(nl):
        for d in range(dim):
            acc = 0j
            for i in range(r):
                acc += v[j, i] * amat[d, i]
            phi[j, d] = acc
    grad = np.zeros((nl, r), dtype=np.complex128)
    f = 0.0
    tphi = np.empty(dim, dtype=np.complex128)
    dphi = np.empty(dim, dtype=np.complex128)
    for j in range(nl):
        p = 0.0
        for d in range(dim):
            p += phi[j, d].real ** 2 + phi[j, d].imag ** 2
        for d in range(dim):
            dphi[d] = ctot * phi[j, d]
        f += ctot * p
        if p > 1e-300:
            tsq = 0.0
            for k in range(nk):
                for d in range(dim):
                    acc = 0j
                    for e in range(dim):
                        acc += gens[k, d, e] * phi[j, e]
                    tphi[d] = acc
                t = 0.0
                for d in range(dim):
                    t += (phi[j, d].conjugate() * tphi[d]).real
                tsq += t * t
                for d in range(dim):
                    dphi[d] -= 2.0 * t * tphi[d] / p
            f -= tsq / p
            for d in range(dim):
                dphi[d] += tsq / (p * p) * phi[j, d]
        for i in range(r):
            acc = 0j
            for d in range(dim):
                acc += dphi[d] * amat[d, i].conjugate()
            grad[j, i] = 2.0 * acc
    return f, grad


def _retract_qr_numpy(y):
    q, rr = np.linalg.qr(y)
    ph = np.diag(rr).copy()
    ph = np.where(np.abs(ph) > 0, ph / np.where(np.abs(ph) > 0, np.abs(ph), 1.0), 1.0)
    return q * ph[None, :]


def _retract_mgs(y):
    # two passes of modified Gram-Schmidt; same Q as the R-positive QR
    nl, r = y.shape
    q = y.copy()
    for _ in range(2):
        for i in range(r):
            for k in range(i):
                ov = 0j
                for j in range(nl):
                    ov += q[j, k].conjugate() * q[j, i]
                for j in range(nl):
                    q[j, i] -= ov * q[j, k]
            nrm = 0.0
            for j in range(nl):
                nrm += q[j, i].real ** 2 + q[j, i].imag ** 2
            nrm = math.sqrt(nrm)
            for j in range(nl):
                q[j, i] /= nrm
    return q


def _project_numpy(v, x):
    h = v.conj().T @ x
    return x - v @ (0.5 * (h + h.conj().T))


def _project_loops(v, x):
    nl, r = v.shape
    h = np.zeros((r, r), dtype=np.complex128)
    for a in range(r):
        for b in range(r):
            acc = 0j
            for j in range(nl):
                acc += v[j, a].conjugate() * x[j, b]
            h[a, b] = acc
    out = x.copy()
    for j in range(nl):
        for b in range(r):
            acc = 0j
            for a in range(r):
                acc += v[j, a] * 0.5 * (h[a, b] + h[b, a].conjugate())
            out[j, b] -= acc
    return out


def _inner(x, y):
    acc = 0.0
    for j in range(x.shape[0]):
        for i in range(x.shape[1]):
            acc += (x[j, i].conjugate() * y[j, i]).real
    return acc


def _make_descend(value_grad, retract, project, inner):
    def descend(v, amat, gens, ctot, max_iters, step_tol):
        # Polak-Ribiere+ conjugate gradient with Armijo backtracking and
        # QR retraction; returns (V, f, iterations, converged).
        f, eg = value_grad(v, amat, gens, ctot)
        g = project(v, eg)
        gg = inner(g, g)
        d = -g
        step = 0.5
        it = 0
        converged = False
        while it < max_iters:
            if gg < 1e-28:
                converged = True
                break
            slope = inner(g, d)
            if slope >= 0.0:
                d = -g
                slope = -gg
            accepted = False
            while step > 1e-16:
                vt = retract(v + step * d)
                ft, egt = value_grad(vt, amat, gens, ctot)
                if ft <= f + 1e-4 * step * slope:
                    accepted = True
                    break
                step *= 0.5
            it += 1
            if not accepted:
                converged = True
                break
            dv = vt - v
            moved = math.sqrt(inner(dv, dv))
            gt = project(vt, egt)
            gpt = project(vt, g)
            beta = inner(gt, gt - gpt) / gg
            if beta < 0.0:
                beta = 0.0
            d = -gt + beta * project(vt, d)
            v, f, g = vt, ft, gt
            gg = inner(g, g)
            step = min(4.0 * step, 1.0)
            if moved < step_tol:
                converged = True
                break
        return v, f, it, converged

    return descend


def _inner_numpy(x, y):
    return float(np.sum(x.conj() * y).real)


descend_numpy = _make_descend(
    roof_value_grad_numpy, _retract_qr_numpy, _project_numpy, _inner_numpy
)

roof_value_grad_numba = njit(cache=True)(_roof_value_grad_loops)
descend_numba = njit(cache=False)(
    _make_descend(
        roof_value_grad_numba,
        njit(cache=True)(_retract_mgs),
        njit(cache=True)(_project_loops),
        njit(cache=True)(_inner),
    )
)


if BACKEND == "numba":
    jacobi = jacobi_numba
    roof_value_grad = roof_value_grad_numba
    descend = descend_numba
else:
    jacobi = jacobi_numpy
    roof_value_grad = roof_value_grad_numpy
    descend = descend_numpy

log.debug("entdist kernels using %s backend", BACKEND)
