"""Figure builders: one per supported kind, no resampling or smoothing.

Every curve carries the CSV values verbatim, figures embed the scenario-hash
provenance from the source file, and rendering is deterministic (fixed style,
no timestamps).
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .csvio import CsvTable, NoRowsError, PlotError, SchemaError, read_table

KINDS = ("modes-vs-distance", "rate-vs-modes", "histogram-compare")

_STYLE = {
    "figure.figsize": (6.4, 4.2),
    "figure.dpi": 120,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "font.size": 10,
}


@dataclass(frozen=True)
class PlotSpec:
    input_path: str
    kind: str
    output_path: str
    log_x: bool | None = None   # None = the kind's default
    log_y: bool | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise PlotError(f"unknown figure kind {self.kind!r}; expected one of {KINDS}")


def _provenance_caption(fig, table: CsvTable) -> None:
    if table.scenario_hash:
        fig.text(0.99, 0.01, f"scenario {table.scenario_hash}",
                 ha="right", va="bottom", fontsize=7, color="0.4")


def _check_log_positive(values, axis: str, path: str) -> None:
    if any(v <= 0.0 for v in values):
        raise PlotError(f"{path}: log {axis}-axis requires strictly positive data")


def _modes_vs_distance(table: CsvTable, spec: PlotSpec, ax) -> None:
    table.require("distance_km", "target_rate_hz", "min_modes")
    targets: dict[str, tuple[list[float], list[float]]] = {}
    for row in table.rows:
        record = dict(zip(table.header, row))
        if not record["min_modes"]:
            continue  # infeasible point; reason column explains it
        xs, ys = targets.setdefault(record["target_rate_hz"], ([], []))
        xs.append(float(record["distance_km"]))
        ys.append(float(record["min_modes"]))
    if not targets:
        raise NoRowsError(f"{table.path}: no feasible rows to plot")
    for target, (xs, ys) in sorted(targets.items(), key=lambda kv: float(kv[0])):
        ax.plot(xs, ys, marker="o", label=f"{float(target):g} Hz")
    if spec.log_y is not False:
        for _, ys in targets.values():
            _check_log_positive(ys, "y", table.path)
        ax.set_yscale("log")
    if spec.log_x:
        ax.set_xscale("log")
    ax.set_xlabel("ground distance [km]")
    ax.set_ylabel("memory modes needed")
    ax.legend(title="target rate")


def _rate_vs_modes(table: CsvTable, spec: PlotSpec, ax) -> None:
    table.require("n_mem", "rate_hz")
    points = sorted(zip(table.floats("n_mem"), table.floats("rate_hz")))
    xs = [p[0] for p in points]
    ys = [p[1] for p in points]
    ax.plot(xs, ys, marker="o")
    if spec.log_x is not False:
        _check_log_positive(xs, "x", table.path)
        ax.set_xscale("log")
    if spec.log_y is not False:
        _check_log_positive(ys, "y", table.path)
        ax.set_yscale("log")
    ax.set_xlabel("memory modes")
    ax.set_ylabel("rate [Hz]")


def _histogram_compare(table: CsvTable, spec: PlotSpec, ax) -> None:
    table.require("n", "frequency", "analytic_pmf")
    n = table.floats("n")
    ax.bar(n, table.floats("frequency"), width=0.9, alpha=0.5,
           label="Monte Carlo", color="tab:blue")
    ax.plot(n, table.floats("analytic_pmf"), drawstyle="steps-mid",
            color="tab:orange", label="analytic")
    tv = table.tv_distance
    if tv is not None:
        ax.annotate(f"tv distance = {tv:.4f}", xy=(0.97, 0.85),
                    xycoords="axes fraction", ha="right")
    if spec.log_y:
        ax.set_yscale("log")
    if spec.log_x:
        ax.set_xscale("log")
    ax.set_xlabel("delivered pairs per round")
    ax.set_ylabel("probability")
    ax.legend()


_BUILDERS = {
    "modes-vs-distance": _modes_vs_distance,
    "rate-vs-modes": _rate_vs_modes,
    "histogram-compare": _histogram_compare,
}


def build_figure(spec: PlotSpec):
    """Build (figure, table) without writing anything; tests introspect it."""
    table = read_table(spec.input_path)
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        try:
            _BUILDERS[spec.kind](table, spec, ax)
        except (SchemaError, NoRowsError, PlotError):
            plt.close(fig)
            raise
        _provenance_caption(fig, table)
        fig.tight_layout(rect=(0.0, 0.03, 1.0, 1.0))
    return fig, table


def render(spec: PlotSpec) -> str:
    """Write the figure for `spec`; returns the output path."""
    fig, table = build_figure(spec)
    out = Path(spec.output_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    metadata = {"Software": "satchain-plot"}
    if table.scenario_hash:
        metadata["Description"] = f"scenario {table.scenario_hash}"
    try:
        fig.savefig(out, metadata=metadata)
    finally:
        plt.close(fig)
    return str(out)
