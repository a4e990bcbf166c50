"""Figure rendering: curves equal the CSV verbatim, deterministic output,
schema errors named."""

import numpy as np
import pytest

from satchain_plot import (
    NoRowsError,
    PlotSpec,
    SchemaError,
    build_figure,
    read_table,
    render,
)
from satchain_plot.cli import main as plot_main
from satchain_plot.csvio import PlotError


SWEEP_CSV = """\
# scenario=7c7032c1503d tool=satchain/0.1.0
distance_km,target_rate_hz,min_modes,fidelity,reason
1500,10,52,0.938332249888,
1500,100,174,0.938332249888,
3500,10,88,0.928969,
3500,100,282,0.928969,
8000,10,410,0.91,
8000,100,1246,0.91,
"""

HIST_CSV = """\
# scenario=7c7032c1503d tool=satchain/0.1.0
# tv_distance=0.0123
n,count,frequency,analytic_pmf
0,120,0.012,0.0115
1,700,0.07,0.072
2,1800,0.18,0.178
3,2600,0.26,0.262
4,2500,0.25,0.249
5,1500,0.15,0.151
6,780,0.078,0.0765
"""

CHAIN_CSV = """\
# scenario=abc123def456 tool=satchain/0.1.0
distance_km,n_mem,rate_hz,rate_center_hz,fidelity,p_loss,t_com_s,p_T_ground,p_T_sat
1500,50,30.1,77.0,0.938,0.789,0.0033,0.27,0.61
1500,100,60.5,154.2,0.938,0.789,0.0033,0.27,0.61
1500,200,118.6,302.6,0.938,0.789,0.0033,0.27,0.61
"""


@pytest.fixture
def sweep_csv(tmp_path):
    path = tmp_path / "sweep.csv"
    path.write_text(SWEEP_CSV)
    return path


@pytest.fixture
def hist_csv(tmp_path):
    path = tmp_path / "mc_histogram.csv"
    path.write_text(HIST_CSV)
    return path


def test_read_table_provenance(sweep_csv, hist_csv):
    table = read_table(sweep_csv)
    assert table.scenario_hash == "7c7032c1503d"
    assert table.tv_distance is None
    assert read_table(hist_csv).tv_distance == pytest.approx(0.0123)


def test_modes_vs_distance_points_equal_csv(sweep_csv, tmp_path):
    fig, _ = build_figure(PlotSpec(str(sweep_csv), "modes-vs-distance",
                                   str(tmp_path / "fig.png")))
    ax = fig.axes[0]
    assert len(ax.lines) == 2  # one curve per target rate
    by_label = {line.get_label(): line for line in ax.lines}
    np.testing.assert_array_equal(by_label["10 Hz"].get_xdata(), [1500, 3500, 8000])
    np.testing.assert_array_equal(by_label["10 Hz"].get_ydata(), [52, 88, 410])
    np.testing.assert_array_equal(by_label["100 Hz"].get_ydata(), [174, 282, 1246])
    assert ax.get_yscale() == "log"


def test_infeasible_rows_are_skipped(tmp_path):
    path = tmp_path / "sweep.csv"
    path.write_text(
        "distance_km,target_rate_hz,min_modes,fidelity,reason\n"
        "1500,100,174,0.94,\n"
        "9000,100,,0.81,fidelity_unreachable\n"
    )
    fig, _ = build_figure(PlotSpec(str(path), "modes-vs-distance", "x.png"))
    (line,) = fig.axes[0].lines
    np.testing.assert_array_equal(line.get_xdata(), [1500])


def test_rate_vs_modes_log_log(tmp_path):
    path = tmp_path / "chain_sim.csv"
    path.write_text(CHAIN_CSV)
    fig, _ = build_figure(PlotSpec(str(path), "rate-vs-modes", "x.png"))
    ax = fig.axes[0]
    (line,) = ax.lines
    np.testing.assert_array_equal(line.get_xdata(), [50, 100, 200])
    np.testing.assert_array_equal(line.get_ydata(), [30.1, 60.5, 118.6])
    assert ax.get_xscale() == "log" and ax.get_yscale() == "log"


def test_histogram_compare_annotates_tv_distance(hist_csv):
    fig, table = build_figure(PlotSpec(str(hist_csv), "histogram-compare", "x.png"))
    ax = fig.axes[0]
    texts = [t.get_text() for t in ax.texts]
    assert any("tv distance = 0.0123" in t for t in texts)
    # the analytic curve carries the pmf values exactly
    (line,) = ax.lines
    np.testing.assert_array_equal(line.get_ydata(), table.floats("analytic_pmf"))
    # the bars carry the MC frequencies exactly
    heights = [patch.get_height() for patch in ax.patches]
    np.testing.assert_array_equal(heights, table.floats("frequency"))


def test_render_is_deterministic(sweep_csv, tmp_path):
    spec_a = PlotSpec(str(sweep_csv), "modes-vs-distance", str(tmp_path / "a.png"))
    spec_b = PlotSpec(str(sweep_csv), "modes-vs-distance", str(tmp_path / "b.png"))
    a = render(spec_a)
    b = render(spec_b)
    assert (tmp_path / "a.png").read_bytes() == (tmp_path / "b.png").read_bytes()
    assert a.endswith("a.png") and b.endswith("b.png")


def test_schema_mismatch_names_missing_columns(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("distance_km,fidelity\n1500,0.9\n")
    with pytest.raises(SchemaError, match="min_modes"):
        build_figure(PlotSpec(str(path), "modes-vs-distance", "x.png"))


def test_empty_csv_is_a_no_rows_error(tmp_path):
    path = tmp_path / "empty.csv"
    path.write_text("distance_km,target_rate_hz,min_modes,fidelity,reason\n")
    with pytest.raises(NoRowsError, match="no rows"):
        build_figure(PlotSpec(str(path), "modes-vs-distance", "x.png"))
    path.write_text("")
    with pytest.raises(NoRowsError):
        build_figure(PlotSpec(str(path), "modes-vs-distance", "x.png"))


def test_log_axis_rejects_nonpositive(tmp_path):
    path = tmp_path / "chain_sim.csv"
    path.write_text("n_mem,rate_hz\n10,0.0\n20,4.5\n")
    with pytest.raises(PlotError, match="strictly positive"):
        build_figure(PlotSpec(str(path), "rate-vs-modes", "x.png"))
    # linear override accepts the same data
    fig, _ = build_figure(PlotSpec(str(path), "rate-vs-modes", "x.png", log_y=False))
    assert fig.axes[0].get_yscale() == "linear"


def test_unknown_kind_rejected():
    with pytest.raises(PlotError, match="unknown figure kind"):
        PlotSpec("x.csv", "pie-chart", "x.png")


def test_cli_round_trip(sweep_csv, tmp_path, capsys):
    out = tmp_path / "fig.png"
    status = plot_main(["--kind", "modes-vs-distance", "--in", str(sweep_csv),
                        "--out", str(out)])
    assert status == 0
    assert out.exists() and out.stat().st_size > 0
    assert str(out) in capsys.readouterr().out


def test_cli_reports_errors(tmp_path, capsys):
    missing = tmp_path / "nope.csv"
    status = plot_main(["--kind", "histogram-compare", "--in", str(missing),
                        "--out", str(tmp_path / "fig.png")])
    assert status == 1
    assert "error:" in capsys.readouterr().err


def test_sweep_artifact_from_the_simulator_renders(tmp_path):
    """End-to-end through the CSV interface: generate a real sweep with the
    simulator CLI, then render the two-curve figure from it."""
    satchain_cli = pytest.importorskip("satchain.cli")
    status = satchain_cli.main([
        "--scenario", "upgraded",
        "--override", "run.distances=1500 km, 3500 km",
        "--override", "run.phase_samples=8",
        "--out", str(tmp_path), "sweep",
    ])
    assert status == 0
    fig, table = build_figure(
        PlotSpec(str(tmp_path / "sweep.csv"), "modes-vs-distance",
                 str(tmp_path / "fig.png"))
    )
    ax = fig.axes[0]
    assert len(ax.lines) == 2
    modes = {line.get_label(): list(line.get_ydata()) for line in ax.lines}
    feasible = [r for r in table.rows if r[2]]
    assert sum(len(v) for v in modes.values()) == len(feasible)
    render(PlotSpec(str(tmp_path / "sweep.csv"), "modes-vs-distance",
                    str(tmp_path / "fig.png")))
    assert (tmp_path / "fig.png").stat().st_size > 0
