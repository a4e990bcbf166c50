"""Command-line orchestration: scenario ingestion, runs, CSV emission.

Every CSV starts with provenance comment lines (scenario hash, tool version,
defaulted keys) followed by a header row whose column names carry units.
Output is byte-identical for identical scenario + seed, independent of the
thread count used for sweep evaluation.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import __version__
from . import montecarlo as mc
from . import rate as rt
from .errors import InfeasibleGeometryError, InfeasibleLinkError, SatchainError, ScenarioError
from .scenario import ScenarioFile, parse_scenario, scenario_hash

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INFEASIBLE = 2

SCENARIO_DIR_ENV = "SATCHAIN_SCENARIO_DIR"


def _fmt(value) -> str:
    if isinstance(value, float):
        return format(value, ".12g")
    return str(value)


def _write_csv(path: Path, scenario: ScenarioFile, header: list[str], rows: list[list]) -> None:
    lines = [
        f"# scenario={scenario_hash(scenario)} tool=satchain/{__version__}",
    ]
    if scenario.defaults_used:
        lines.append(f"# defaults={','.join(scenario.defaults_used)}")
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _resolve_scenario(name: str) -> Path:
    path = Path(name)
    if path.exists():
        return path
    candidates = []
    env_dir = os.environ.get(SCENARIO_DIR_ENV)
    if env_dir:
        candidates.append(Path(env_dir) / name)
        candidates.append(Path(env_dir) / f"{name}.scenario")
    bundled = Path(__file__).parent / "data"
    candidates.append(bundled / name)
    candidates.append(bundled / f"{name}.scenario")
    for candidate in candidates:
        if candidate.exists():
            return candidate
    raise ScenarioError(f"scenario {name!r} not found (looked in cwd, ${SCENARIO_DIR_ENV}, bundled)")


def _distances(scenario: ScenarioFile) -> list[float]:
    run = scenario.run_params()
    if run.distances:
        return list(run.distances)
    return [scenario.values["chain"]["ground_distance"]]


def _cmd_link_budget(scenario: ScenarioFile, args) -> tuple[int, list[Path]]:
    config = scenario.chain_config()
    point = rt.operating_point(config, args.phase)
    geom = point.geometry
    rows = []
    budgets = [point.ground_budgets[0]]
    kinds = ["ground"]
    elevations: list[float | str] = [geom.elevation_angles[0]]
    for _ in range(config.constellation.n_sat - 1):
        budgets.append(point.sat_budget)
        kinds.append("sat")
        elevations.append("")
    budgets.append(point.ground_budgets[1])
    kinds.append("ground")
    elevations.append(geom.elevation_angles[1])
    for i, (kind, b, length, el) in enumerate(zip(kinds, budgets, geom.link_lengths, elevations)):
        rows.append([
            i, kind, length, el, b.p_diffraction, b.p_jitter, b.p_atmosphere,
            b.p_terminal, b.p_T, b.beam_waist_at_rx,
            b.w_over_sigma_offset if b.w_over_sigma_offset != float("inf") else "",
        ])
    out = Path(args.out) / "link_budget.csv"
    _write_csv(out, scenario, [
        "link_index", "kind", "length_m", "elevation_rad", "p_diffraction",
        "p_jitter", "p_atmosphere", "p_terminal", "p_T", "beam_waist_at_rx_m",
        "w_over_sigma_offset",
    ], rows)
    return EXIT_OK, [out]


def _cmd_chain_sim(scenario: ScenarioFile, args) -> tuple[int, list[Path]]:
    run = scenario.run_params()
    rows = []
    for distance in _distances(scenario):
        config = scenario.chain_config(ground_distance=distance)
        result = rt.average_rate(config, run.n_mem)
        point = rt.operating_point(config, 0.5)
        rows.append([
            distance / 1e3, run.n_mem, result.rate_hz, result.rate_center_hz,
            result.fidelity, result.p_loss, result.t_com,
            min(p.p_T for p in point.ground_budgets),
            point.sat_budget.p_T if point.sat_budget else "",
        ])
    out = Path(args.out) / "chain_sim.csv"
    _write_csv(out, scenario, [
        "distance_km", "n_mem", "rate_hz", "rate_center_hz", "fidelity",
        "p_loss", "t_com_s", "p_T_ground", "p_T_sat",
    ], rows)
    return EXIT_OK, [out]


def _sweep_point(scenario: ScenarioFile, distance: float, target_rate: float):
    run = scenario.run_params()
    config = scenario.chain_config(ground_distance=distance)
    try:
        profile = rt.pass_profile(config)
    except InfeasibleGeometryError:
        return [distance / 1e3, target_rate, "", "", "no_mutual_visibility"]
    modes = rt.find_min_modes(config, target_rate, run.target_fidelity, run.n_max, profile=profile)
    center = min(profile, key=lambda pt: abs(pt.pass_phase - 0.5))
    if modes is None:
        reason = (
            "fidelity_unreachable" if center.fidelity < run.target_fidelity
            else "rate_unreachable_at_n_max"
        )
        return [distance / 1e3, target_rate, "", center.fidelity, reason]
    return [distance / 1e3, target_rate, modes, center.fidelity, ""]


def _cmd_find_modes(scenario: ScenarioFile, args) -> tuple[int, list[Path]]:
    run = scenario.run_params()
    jobs = [(d, r) for d in _distances(scenario) for r in run.target_rates]
    with ThreadPoolExecutor(max_workers=args.threads) as pool:
        rows = list(pool.map(lambda job: _sweep_point(scenario, *job), jobs))
    out = Path(args.out) / ("sweep.csv" if args.cmd == "sweep" else "find_modes.csv")
    _write_csv(out, scenario, [
        "distance_km", "target_rate_hz", "min_modes", "fidelity", "reason",
    ], rows)
    infeasible = any(row[4] for row in rows)
    return (EXIT_INFEASIBLE if infeasible else EXIT_OK), [out]


def _cmd_mc_validate(scenario: ScenarioFile, args) -> tuple[int, list[Path]]:
    run = scenario.run_params()
    config = scenario.chain_config()
    cfg = mc.McConfig(trials=run.trials, seed=args.seed if args.seed is not None else run.seed,
                      jitter_mode=run.jitter_mode)
    if args.level == "chain":
        result = mc.simulate_chain(config, run.n_mem, cfg)
        point = rt.operating_point(config, 0.5)
        analytic = rt.loss_thinning(
            rt.end_to_end_distribution(
                rt.link_distribution(run.n_mem, point.p_link_sat)
                if config.constellation.n_sat >= 2 else None,
                rt.link_distribution(run.n_mem, min(point.p_link_ground)),
                config.constellation.n_sat,
            ),
            point.p_loss,
        ).probabilities
    else:
        point = rt.operating_point(config, 0.5)
        budget = point.ground_budgets[0]
        result = mc.simulate_link(
            run.n_mem, budget, config.sat_hardware, config.ground_hardware, cfg,
            t_com=point.geometry.t_com,
        )
        from .quantum import heralding_probability
        analytic = rt.link_distribution(
            run.n_mem, float(heralding_probability(config.sat_hardware, config.ground_hardware, budget.p_T))
        ).probabilities

    hist_rows = [
        [n, int(count), count / cfg.trials, analytic[n]]
        for n, count in enumerate(result.histogram)
        if count > 0 or analytic[n] > 1e-15
    ]
    hist_out = Path(args.out) / "mc_histogram.csv"
    _write_csv(hist_out, scenario, ["n", "count", "frequency", "analytic_pmf"], hist_rows)
    # annotate tv distance for the plotting layer
    text = hist_out.read_text(encoding="utf-8").splitlines()
    text.insert(1, f"# tv_distance={_fmt(result.tv_distance_to_analytic)}")
    hist_out.write_text("\n".join(text) + "\n", encoding="utf-8")

    summary_out = Path(args.out) / "mc_summary.csv"
    _write_csv(summary_out, scenario, [
        "level", "trials", "seed", "jitter_mode", "mean_pairs", "stderr_mean",
        "rate_estimate_hz", "tv_distance",
    ], [[args.level, cfg.trials, cfg.seed, cfg.jitter_mode, result.mean_pairs,
         result.stderr_mean, result.rate_estimate, result.tv_distance_to_analytic]])
    return EXIT_OK, [hist_out, summary_out]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="satchain", description=__doc__)
    parser.add_argument("--scenario", required=True,
                        help="scenario file path or bundled name (micius, upgraded, table1)")
    parser.add_argument("--override", action="append", default=[], metavar="SECTION.KEY=VALUE",
                        help="override a scenario value (repeatable)")
    parser.add_argument("--out", default=".", help="output directory for CSV artifacts")
    parser.add_argument("--seed", type=int, default=None, help="override the run seed")
    parser.add_argument("--threads", type=int, default=1, help="parallel sweep evaluation")
    sub = parser.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("link-budget", help="per-link transmission factors at one pass phase")
    p.add_argument("--phase", type=float, default=0.5)
    sub.add_parser("chain-sim", help="rate and fidelity at the configured n_mem")
    sub.add_parser("find-modes", help="minimum memory modes for the configured targets")
    sub.add_parser("sweep", help="find-modes over the distances x target-rates grid")
    p = sub.add_parser("mc-validate", help="Monte-Carlo histogram vs the analytic model")
    p.add_argument("--level", choices=("link", "chain"), default="link")
    return parser


_COMMANDS = {
    "link-budget": _cmd_link_budget,
    "chain-sim": _cmd_chain_sim,
    "find-modes": _cmd_find_modes,
    "sweep": _cmd_find_modes,
    "mc-validate": _cmd_mc_validate,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        scenario = parse_scenario(_resolve_scenario(args.scenario), overrides=args.override)
        status, outputs = _COMMANDS[args.cmd](scenario, args)
    except ScenarioError as exc:
        print(f"error=scenario {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (InfeasibleGeometryError, InfeasibleLinkError) as exc:
        print(f"error=infeasible {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except SatchainError as exc:
        print(f"error=invalid {exc}", file=sys.stderr)
        return EXIT_ERROR
    for path in outputs:
        print(path)
    return status


if __name__ == "__main__":
    raise SystemExit(main())
