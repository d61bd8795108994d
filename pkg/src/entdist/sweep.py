"""Parameter sweeps over the analytic families, written as CSV."""

from __future__ import annotations

import io
import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .families import FAMILY_PARAMS, Family, make_state
from .io import atomic_write_text
from .measure import em_eigenvalues, entanglement, von_neumann_entropy

OUTPUTS = ("E", "E_per_M", "eigenvalues", "entropy")
INTEGER_PARAMS = {"m"}
_SCALES = {"": 1.0, "_over_pi": math.pi, "_over_2pi": 2.0 * math.pi}


class SweepSpecError(ValueError):
    pass


def split_param(name: str) -> tuple[str, float]:
    """``phi_over_2pi`` -> ("phi", 2 pi); ``theta`` -> ("theta", 1)."""
    for suffix in ("_over_2pi", "_over_pi"):
        if name.endswith(suffix):
            return name[: -len(suffix)], _SCALES[suffix]
    return name, 1.0


@dataclass
class Axis:
    name: str  # as given, e.g. "phi_over_2pi"
    values: np.ndarray  # in the axis' own units

    @property
    def param(self) -> str:
        return split_param(self.name)[0]

    @property
    def scale(self) -> float:
        return split_param(self.name)[1]


def parse_axis(text: str) -> Axis:
    """``name=start:stop:count`` (inclusive linspace) or ``name=v1,v2,...``."""
    if "=" not in text:
        raise SweepSpecError(f"axis {text!r} must look like name=start:stop:count")
    name, rhs = (s.strip() for s in text.split("=", 1))
    try:
        if ":" in rhs:
            start, stop, count = rhs.split(":")
            values = np.linspace(float(start), float(stop), int(count))
        else:
            values = np.array([float(v) for v in rhs.split(",")])
    except ValueError as exc:
        raise SweepSpecError(f"cannot parse axis {text!r}: {exc}") from exc
    if values.size < 2:
        raise SweepSpecError(f"axis {name!r} needs at least 2 points")
    return Axis(name, values)


def parse_fixed(text: str) -> tuple[str, float]:
    if "=" not in text:
        raise SweepSpecError(f"parameter {text!r} must look like name=value")
    name, val = (s.strip() for s in text.split("=", 1))
    try:
        return name, float(val)
    except ValueError as exc:
        raise SweepSpecError(f"cannot parse parameter {text!r}") from exc


@dataclass
class SweepSpec:
    family: Family
    axes: list[Axis]
    fixed: dict[str, float] = field(default_factory=dict)  # keys may carry _over_pi
    outputs: tuple[str, ...] = ("E", "E_per_M")

    def __post_init__(self):
        try:
            self.family = Family(self.family)
        except ValueError as exc:
            raise SweepSpecError(f"unknown family {self.family!r}") from exc
        if not 1 <= len(self.axes) <= 2:
            raise SweepSpecError("a sweep needs one or two axes")
        allowed = set(FAMILY_PARAMS[self.family])
        seen = set()
        for name in [a.name for a in self.axes] + list(self.fixed):
            p = split_param(name)[0]
            if p not in allowed:
                raise SweepSpecError(f"{self.family.value} has no parameter {p!r}")
            if p in seen:
                raise SweepSpecError(f"parameter {p!r} given twice")
            if p in INTEGER_PARAMS and split_param(name)[1] != 1.0:
                raise SweepSpecError(f"{p!r} is an integer parameter")
            seen.add(p)
        missing = allowed - seen - {"phase"}
        if missing:
            raise SweepSpecError(f"missing parameters: {sorted(missing)}")
        for o in self.outputs:
            if o not in OUTPUTS:
                raise SweepSpecError(f"unknown output {o!r}; choose from {OUTPUTS}")
        if not self.outputs:
            raise SweepSpecError("no outputs requested")
        if "eigenvalues" in self.outputs:
            if self.family in (Family.HYBRID_23, Family.QUTRIT_GHZ):
                raise SweepSpecError("eigenvalues are defined for qubit families only")
            if any(a.param == "m" for a in self.axes):
                raise SweepSpecError("eigenvalues cannot be combined with an m axis")
        for a in self.axes:
            if a.param in INTEGER_PARAMS and np.any(a.values != np.round(a.values)):
                raise SweepSpecError(f"{a.param!r} values must be integers")

    def _base_params(self) -> dict[str, float]:
        out = {"phase": 0.0}
        for name, val in self.fixed.items():
            p, scale = split_param(name)
            out[p] = val * scale
        return out

    def _qubit_count(self, params) -> int:
        if self.family is Family.THREE_QUBIT:
            return 3
        if self.family is Family.HYBRID_23:
            return 2
        return int(params["m"])

    def header(self) -> list[str]:
        cols = [a.name for a in self.axes]
        for o in self.outputs:
            if o == "eigenvalues":
                m = self._qubit_count(self._base_params())
                cols.extend(f"ev_{i}" for i in range(m))
            else:
                cols.append(o)
        return cols

    def rows(self):
        """Yield one list of floats per grid point, row-major over the axes."""
        base = self._base_params()
        for point in itertools.product(*(a.values for a in self.axes)):
            params = dict(base)
            for a, v in zip(self.axes, point):
                params[a.param] = int(round(v)) if a.param in INTEGER_PARAMS else v * a.scale
            state = make_state(self.family, **params)
            row = list(point)
            e = None
            for o in self.outputs:
                if o in ("E", "E_per_M"):
                    e = entanglement(state) if e is None else e
                    row.append(e if o == "E" else e / state.m)
                elif o == "eigenvalues":
                    row.extend(em_eigenvalues(state))
                else:
                    row.append(von_neumann_entropy(state, [0]))
            yield row


def format_value(x: float) -> str:
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"non-finite value {x!r} in sweep output")
    if x == 0.0:
        x = 0.0  # drop the sign of -0.0
    return format(x, ".12g")


def render_csv(spec: SweepSpec) -> str:
    buf = io.StringIO()
    buf.write(",".join(spec.header()) + "\n")
    for row in spec.rows():
        buf.write(",".join(format_value(v) for v in row) + "\n")
    return buf.getvalue()


def run_sweep(spec: SweepSpec, out_path) -> int:
    """Evaluate the whole grid, then write the CSV atomically. Returns row count."""
    text = render_csv(spec)
    atomic_write_text(out_path, text)
    return text.count("\n") - 1


def build_spec(family: str, axes: Sequence[str], params: Sequence[str],
               outputs: Sequence[str]) -> SweepSpec:
    return SweepSpec(
        family=family,
        axes=[parse_axis(a) for a in axes],
        fixed=dict(parse_fixed(p) for p in params),
        outputs=tuple(outputs),
    )
