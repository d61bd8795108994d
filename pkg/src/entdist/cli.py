"""Command-line front end: ``entdist {measure,sweep,em,mixed,check}``.

Exit codes: 0 ok, 1 self-test failure, 2 parse error, 3 normalisation
error, 4 unsupported dims, 5 invalid density matrix.
"""

from __future__ import annotations

import argparse
import json
import logging
import re
import sys
from fractions import Fraction

import numpy as np

from . import __version__
from .errors import (
    DimensionError,
    InvalidDensityMatrixError,
    NormalizationError,
    UnsupportedDimsError,
)
from .generators import GeneratorSet, casimir_value, gellmann, purity_value, verify_identities
from .io import FileFormatError, atomic_write_text, load_density, load_state
from .measure import entanglement, entanglement_metric, entanglement_pure
from .roof import DensityMatrix, RoofConfig, minimize_roof
from .sweep import SweepSpecError, build_spec, run_sweep
from .tensor import (
    StateVector,
    apply_local_unitaries,
    haar_unitary,
    hermitian_eig,
    random_state,
)

log = logging.getLogger("entdist")

EXIT_OK = 0
EXIT_SELFTEST = 1
EXIT_PARSE = 2
EXIT_NORM = 3
EXIT_DIMS = 4
EXIT_DENSITY = 5

UNIT_TOL = 1e-9
_VECTOR = re.compile(r"^[-+0-9.eE,; ]*[0-9][-+0-9.eE,; ]*$")


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _fmt(x: float) -> str:
    return format(float(x) + 0.0, ".12g")


def _emit(args, text: str, record: dict) -> None:
    out = json.dumps(record, indent=2, sort_keys=True) + "\n" if args.json else text
    sys.stdout.write(out)
    if args.out:
        atomic_write_text(args.out, out)


def _load_state(path) -> StateVector:
    try:
        return load_state(path)
    except FileFormatError as exc:
        raise CliError(EXIT_PARSE, str(exc)) from exc
    except NormalizationError as exc:
        raise CliError(EXIT_NORM, str(exc)) from exc


# -- measure -----------------------------------------------------------------


def cmd_measure(args) -> int:
    state = _load_state(args.state)
    res = entanglement_pure(state)
    lines = [
        f"dims: {list(state.dims)}",
        f"E: {_fmt(res.e)}",
        f"E_max: {_fmt(res.e_max)}",
        f"E/M: {_fmt(res.e_per_m)}",
        "per-subsystem: " + " ".join(_fmt(v) for v in res.per_subsystem),
    ]
    record = {
        "dims": list(state.dims),
        "E": res.e,
        "E_max": res.e_max,
        "E_per_M": res.e_per_m,
        "per_subsystem": res.per_subsystem.tolist(),
    }
    _emit(args, "\n".join(lines) + "\n", record)
    return EXIT_OK


# -- sweep -------------------------------------------------------------------


def cmd_sweep(args) -> int:
    if not args.out:
        raise CliError(EXIT_PARSE, "sweep needs --out <path.csv>")
    try:
        spec = build_spec(args.family, args.axis, args.param, args.outputs.split(","))
        n = run_sweep(spec, args.out)
    except SweepSpecError as exc:
        raise CliError(EXIT_PARSE, str(exc)) from exc
    except DimensionError as exc:
        raise CliError(EXIT_PARSE, str(exc)) from exc
    if args.json:
        sys.stdout.write(json.dumps({"rows": n, "out": str(args.out)}) + "\n")
    else:
        sys.stdout.write(f"wrote {n} rows to {args.out}\n")
    return EXIT_OK


# -- em ----------------------------------------------------------------------


def _parse_directions(items, m):
    dirs = []
    for item in items:
        for chunk in item.split(";"):
            chunk = chunk.strip()
            if chunk:
                try:
                    dirs.append(np.array([float(x) for x in chunk.split(",")]))
                except ValueError as exc:
                    raise CliError(EXIT_PARSE, f"bad direction {chunk!r}") from exc
    if len(dirs) != m or any(v.size != 3 for v in dirs):
        raise CliError(EXIT_PARSE, f"--directions needs {m} comma-separated 3-vectors")
    for v in dirs:
        if abs(np.linalg.norm(v) - 1.0) > UNIT_TOL:
            raise CliError(EXIT_PARSE, f"direction {v.tolist()} is not a unit vector")
    return dirs


def cmd_em(args) -> int:
    state = _load_state(args.state)
    if any(d != 2 for d in state.dims):
        raise CliError(EXIT_DIMS, f"the entanglement metric needs qubits, got dims {list(state.dims)}")
    dirs = _parse_directions(args.directions, state.m) if args.directions else None
    metric = entanglement_metric(state, dirs)
    eig = hermitian_eig(metric.g).eigenvalues
    e = entanglement(state)
    lines = ["g~ ="]
    lines += ["  " + " ".join(f"{_fmt(x):>16}" for x in row) for row in metric.g]
    lines.append("directions:")
    lines += [f"  v_{mu} = ({', '.join(_fmt(x) for x in v)})" for mu, v in enumerate(metric.directions)]
    lines.append(f"tr(g~): {_fmt(metric.trace)}")
    lines.append(f"E: {_fmt(e)}")
    lines.append("eigenvalues: " + " ".join(_fmt(x) for x in eig))
    record = {
        "dims": list(state.dims),
        "g": metric.g.tolist(),
        "directions": [v.tolist() for v in metric.directions],
        "trace": metric.trace,
        "E": e,
        "eigenvalues": eig.tolist(),
    }
    _emit(args, "\n".join(lines) + "\n", record)
    return EXIT_OK


# -- mixed -------------------------------------------------------------------


def cmd_mixed(args) -> int:
    try:
        rho = load_density(args.density)
    except FileFormatError as exc:
        raise CliError(EXIT_PARSE, str(exc)) from exc
    m = rho.rho
    scale = max(1.0, float(np.linalg.norm(m)))
    if np.linalg.norm(m - m.conj().T) > 1e-8 * scale:
        raise CliError(EXIT_DENSITY, "density matrix is not Hermitian")
    if abs(np.trace(m).real - 1.0) > 1e-6:
        raise CliError(EXIT_NORM, f"trace is {np.trace(m).real:.12g}, expected 1")
    lo = hermitian_eig(m, check=1e-8).eigenvalues[-1]
    if lo < -1e-6:
        raise CliError(EXIT_DENSITY, f"density matrix has eigenvalue {lo:.3e} < -1e-6")
    rho = DensityMatrix(rho.dims, 0.5 * (m + m.conj().T))
    cfg = RoofConfig(
        ensemble_len=args.ensemble_len,
        restarts=args.restarts,
        max_iters=args.max_iters,
        step_tol=args.tol if args.tol is not None else 1e-9,
        seed=args.seed,
        spectral_start=not args.no_spectral_start,
    )
    res = minimize_roof(rho, cfg)
    vals = np.array(res.restart_values)
    lines = [
        f"dims: {list(rho.dims)}",
        f"E(rho) <= {_fmt(res.value)}   [{res.label}]",
        f"rank: {rho.rank}  ensemble length: {len(res.decomposition)} (nonzero weights)",
        f"restarts: {len(vals)}  best restart: {res.best_restart}  "
        f"converged: {sum(res.converged)}/{len(vals)}",
        f"restart objective min/median/max: {_fmt(vals.min())} {_fmt(np.median(vals))} {_fmt(vals.max())}",
    ]
    record = {
        "dims": list(rho.dims),
        "value": res.value,
        "upper_bound": True,
        "label": res.label,
        "rank": rho.rank,
        "decomposition_size": len(res.decomposition),
        "restart_values": res.restart_values,
        "best_restart": res.best_restart,
        "converged": res.converged,
        "iterations": res.iterations,
    }
    _emit(args, "\n".join(lines) + "\n", record)
    return EXIT_OK


# -- check -------------------------------------------------------------------


def _corrupt(g: GeneratorSet) -> GeneratorSet:
    t = g.t.copy()
    t[0] = 1.01 * t[0]
    return GeneratorSet(g.d, t)


def cmd_check(args) -> int:
    tol = args.tol if args.tol is not None else 1e-9
    rng = np.random.default_rng(args.seed)
    results = []
    lines = []

    def record(name, residual, extra=""):
        ok = bool(residual < tol)
        results.append({"check": name, "residual": float(residual), "ok": ok})
        lines.append(f"{'PASS' if ok else 'FAIL'}  {name:<34} residual={residual:.3e}{extra}")

    for d in range(2, 7):
        g = gellmann(d)
        if args.inject_fault:
            g = _corrupt(g)
        probes = [StateVector.from_amplitudes((d,), np.eye(d)[0])]
        probes += [random_state((d,), rng) for _ in range(20)]
        rep = verify_identities(g, probes, n_unitaries=100, seed=int(rng.integers(2**31)))
        record(f"casimir d={d}", rep.casimir_residual,
               f"  target={Fraction(2 * (d * d - 1), d)} ({casimir_value(d):.12g})")
        record(f"purity-sum d={d}", rep.purity_residual,
               f"  target={Fraction(2 * (d - 1), d)}")
        record(f"frame-invariance d={d}", rep.frame_residual)
        record(f"orthogonality d={d}", rep.orthogonality_residual)
        record(f"hermitian/traceless d={d}", max(rep.hermitian_residual, rep.trace_residual))
        record(f"max-eigenvalue d={d}", rep.max_eigenvalue_residual,
               f"  value={rep.max_eigenvalue:.12g} target={np.sqrt(purity_value(d)):.12g}")

    for dims in [(2, 2), (2, 3), (3, 3), (2, 2, 2), (2, 3, 4)]:
        worst = 0.0
        for _ in range(10):
            s = random_state(dims, rng)
            us = [haar_unitary(d, rng) for d in dims]
            worst = max(worst, abs(entanglement(apply_local_unitaries(s, us)) - entanglement(s)))
        record(f"LU invariance dims={list(dims)}", worst)

    passed = all(r["ok"] for r in results)
    lines.append("all checks passed" if passed else "SELF-TEST FAILED")
    _emit(args, "\n".join(lines) + "\n", {"passed": passed, "tolerance": tol, "checks": results})
    return EXIT_OK if passed else EXIT_SELFTEST


# -- entry point ---------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="also write the report (CSV for sweep) to this path")
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    common.add_argument("--tol", type=float, default=None,
                        help="check: residual threshold; mixed: descent step tolerance")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="entdist", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"entdist {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("measure", parents=[common], help="entanglement of a pure state file")
    sp.add_argument("state")
    sp.set_defaults(func=cmd_measure)

    sp = sub.add_parser("sweep", parents=[common], help="family parameter sweep to CSV")
    sp.add_argument("--family", required=True,
                    help="brs | ghzls | three_qubit | hybrid | qutrit_ghz")
    sp.add_argument("--axis", action="append", default=[], required=True,
                    help="name=start:stop:count or name=v1,v2,...; angles may use "
                         "_over_pi / _over_2pi suffixes (e.g. phi_over_2pi=0:1:201)")
    sp.add_argument("--param", action="append", default=[],
                    help="fixed parameter name=value (same suffix rules)")
    sp.add_argument("--outputs", default="E,E_per_M",
                    help="comma list from E,E_per_M,eigenvalues,entropy")
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("em", parents=[common], help="entanglement metric of a qubit state")
    sp.add_argument("state")
    sp.add_argument("--directions", nargs="+",
                    help="M unit 3-vectors 'x,y,z' (space or ';' separated)")
    sp.set_defaults(func=cmd_em)

    sp = sub.add_parser("mixed", parents=[common], help="convex-roof upper bound for a density matrix")
    sp.add_argument("density")
    sp.add_argument("--restarts", type=int, default=32)
    sp.add_argument("--max-iters", type=int, default=500)
    sp.add_argument("--ensemble-len", type=int, default=None)
    sp.add_argument("--no-spectral-start", action="store_true",
                    help="use only the seeded random starts")
    sp.set_defaults(func=cmd_mixed)

    sp = sub.add_parser("check", parents=[common], help="generator identities and LU self-test")
    sp.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)
    sp.set_defaults(func=cmd_check)
    return p


def _join_directions(argv):
    # argparse reads "-1,0,0" as an option; fold vectors into --directions=a;b;c
    out, i = [], 0
    while i < len(argv):
        tok = argv[i]
        i += 1
        if tok == "--directions":
            vals = []
            while i < len(argv) and _VECTOR.match(argv[i]):
                vals.append(argv[i])
                i += 1
            if vals:
                tok = "--directions=" + ";".join(vals)
        out.append(tok)
    return out


def main(argv=None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    args = parser.parse_args(_join_directions(argv))
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except CliError as exc:
        sys.stderr.write(f"entdist: error: {exc}\n")
        return exc.code
    except UnsupportedDimsError as exc:
        sys.stderr.write(f"entdist: error: {exc}\n")
        return EXIT_DIMS
    except InvalidDensityMatrixError as exc:
        sys.stderr.write(f"entdist: error: {exc}\n")
        return EXIT_DENSITY
    except NormalizationError as exc:
        sys.stderr.write(f"entdist: error: {exc}\n")
        return EXIT_NORM


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
