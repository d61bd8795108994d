import numpy as np
import pytest

from entdist.families import Family
from entdist.sweep import (
    SweepSpec,
    SweepSpecError,
    build_spec,
    format_value,
    parse_axis,
    render_csv,
    run_sweep,
    split_param,
)


def table(text):
    lines = text.splitlines()
    return lines[0].split(","), np.array([[float(x) for x in ln.split(",")] for ln in lines[1:]])


class TestParsing:
    def test_split_param(self):
        assert split_param("phi_over_2pi") == ("phi", 2 * np.pi)
        assert split_param("theta_over_pi") == ("theta", np.pi)
        assert split_param("gamma") == ("gamma", 1.0)

    def test_range_axis(self):
        ax = parse_axis("phi_over_2pi=0:1:5")
        assert ax.param == "phi"
        np.testing.assert_array_equal(ax.values, [0, 0.25, 0.5, 0.75, 1])

    def test_list_axis(self):
        np.testing.assert_array_equal(parse_axis("m=3,4,7").values, [3, 4, 7])

    @pytest.mark.parametrize("text", ["phi", "phi=0:1", "phi=0:1:1", "phi=a,b", "phi=3"])
    def test_bad_axis(self, text):
        with pytest.raises(SweepSpecError):
            parse_axis(text)

    @pytest.mark.parametrize(
        "family,axes,params,outputs",
        [
            ("cluster", ["phi=0:1:3"], ["m=2"], ["E"]),
            ("brs", ["phi=0:1:3"], [], ["E"]),
            ("brs", ["phi=0:1:3", "m=2,3", "phi_over_pi=0:1:2"], [], ["E"]),
            ("brs", ["theta=0:1:3"], ["m=2"], ["E"]),
            ("brs", ["phi=0:1:3"], ["m=2", "phi=1"], ["E"]),
            ("brs", ["phi=0:1:3"], ["m=2"], ["purity"]),
            ("brs", ["phi=0:1:3"], ["m=2"], []),
            ("brs", ["m=2.5,3"], ["phi=1"], ["E"]),
            ("brs", ["m=2,3"], ["phi=1"], ["eigenvalues"]),
            ("hybrid", ["theta=0:1:3"], [], ["eigenvalues"]),
            ("ghzls", ["theta=0:1:3"], ["m_over_pi=1"], ["E"]),
        ],
    )
    def test_invalid_specs(self, family, axes, params, outputs):
        with pytest.raises(SweepSpecError):
            build_spec(family, axes, params, outputs)


class TestRendering:
    def test_header_and_row_major_order(self):
        spec = build_spec("three_qubit", ["gamma=0,1", "tau=0,2,3"], [], ["E", "E_per_M"])
        header, rows = table(render_csv(spec))
        assert header == ["gamma", "tau", "E", "E_per_M"]
        np.testing.assert_array_equal(rows[:, :2], [[0, 0], [0, 2], [0, 3], [1, 0], [1, 2], [1, 3]])

    def test_eigenvalue_columns(self):
        spec = build_spec("ghzls", ["theta_over_pi=0:0.5:3"], ["m=4"], ["eigenvalues"])
        header, rows = table(render_csv(spec))
        assert header == ["theta_over_pi", "ev_0", "ev_1", "ev_2", "ev_3"]
        assert rows[1, 1] == pytest.approx(4.0, abs=1e-11)

    def test_format(self):
        assert format_value(-0.0) == "0"
        assert format_value(1 / 3) == "0.333333333333"
        assert format_value(2.0) == "2"
        with pytest.raises(ValueError):
            format_value(float("nan"))

    def test_lf_endings(self):
        text = render_csv(build_spec("hybrid", ["theta=0:1:3"], [], ["E"]))
        assert "\r" not in text and text.endswith("\n")

    def test_run_sweep_counts_rows(self, tmp_path):
        spec = SweepSpec(Family.BRS, [parse_axis("phi=0:3:4")], {"m": 2}, ("E",))
        assert run_sweep(spec, tmp_path / "x.csv") == 4
        assert (tmp_path / "x.csv").read_text().count("\n") == 5
