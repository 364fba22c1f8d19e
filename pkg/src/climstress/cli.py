"""Command-line front end.

Commands: ingest, calibrate, run, matrix, stress, human-capital, report.
Every command accepts --params/--out/--seed, honours --json for
machine-readable output, and is bit-reproducible for identical
invocations. Exit codes: 0 ok, 2 ingest, 3 calibration, 4 solver,
5 numeric, 64 usage.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from importlib import resources
from pathlib import Path

import numpy as np

from . import calibration as cal
from .actuarial import (
    PortfolioSpec,
    default_income_profile,
    human_capital,
    simulate_annuity,
    simulate_insurance,
)
from .engine import (
    RunConfig,
    marker_configs,
    marker_table,
    nonmarker_configs,
    nonmarker_table,
    run_matrix,
    run_scenario,
    temperature_summary,
)
from .errors import ClimstressError, ConfigError
from .mortality import ExcessMortalityFn, GompertzLaw, fit_cubic_damage, gompertz_to_table
from .optimizer import SolverOptions
from .params import ModelParams, load_parameter_file

log = logging.getLogger(__name__)


def bundled_data_path() -> str:
    return str(resources.files("climstress").joinpath("data/ssp_baseline_world.csv"))


def bundled_portfolio_path(kind: str) -> str:
    return str(resources.files("climstress").joinpath(f"data/portfolio_{kind}.csv"))


def _emit(payload: dict, as_json: bool) -> None:
    if as_json:
        print(json.dumps(payload, indent=1, sort_keys=True, default=_jsonify))
    else:
        for key, value in payload.items():
            print(f"{key}: {value}")


def _jsonify(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"cannot serialise {type(obj)}")


def cmd_ingest(args) -> int:
    scenarios: dict = {}
    errors = []
    for path in args.files:
        try:
            for s in cal.parse_ssp_export(path):
                if s.key in scenarios:
                    log.warning("duplicate scenario %s/%s; last file wins", *s.key)
                scenarios[s.key] = s
        except ClimstressError as exc:
            errors.append(f"{path}: {exc}")
    if errors and not scenarios:
        for e in errors:
            print(e, file=sys.stderr)
        return 2
    ordered = [scenarios[k] for k in sorted(scenarios)]
    out = args.out or "ssp_store.json"
    cal.save_store(ordered, out, source_hash=cal.store_hash(args.files))
    _emit(
        {
            "store": out,
            "scenarios": len(ordered),
            "models": sorted({s.model for s in ordered}),
            "ssps": sorted({s.ssp for s in ordered}),
            "errors": errors,
        },
        args.json,
    )
    return 0


def cmd_calibrate(args) -> int:
    raw = load_parameter_file(args.params)
    params = ModelParams.from_mapping(raw)
    scenarios = cal.load_store(args.store) if args.store.endswith(".json") else (
        cal.parse_ssp_export(args.store)
    )
    data = cal.select_scenario(scenarios, args.ssp, args.iam)
    from .reference import reference_capital_path

    paths, report = cal.build_exogenous(
        data, params, raw, k_init=reference_capital_path(params), tol=args.tol
    )
    paths.meta["source_hash"] = cal.store_hash([args.store])
    out = args.out or f"exog_{args.ssp}_{args.iam.replace('/', '-')}.json"
    paths.save(out)
    _emit(
        {
            "artifact": out,
            "iterations": report.iterations,
            "max_residual": report.max_residual,
            "tol": report.tol,
        },
        args.json,
    )
    return 0


def _config_from_args(args, scenario: str) -> RunConfig:
    solver = SolverOptions()
    return RunConfig(
        scenario=scenario,
        data_path=args.data,
        params_path=args.params,
        out_dir=args.out,
        seed=args.seed,
        calibration_tol=args.tol,
        solver=solver,
        population_extension=getattr(args, "population_extension", False),
        cache=not getattr(args, "no_cache", False),
    )


def cmd_run(args) -> int:
    config = _config_from_args(args, args.scenario)
    result = run_scenario(config)
    tr = result.run.trajectory
    payload = {
        "cell": result.label,
        "t_at_2100": result.t_at_2100(),
        "m_at_2100": tr.value_at_year("m_at", 2100),
        "scc_2025_usd_per_tco2": result.scc_at(2025),
        "scc_2100_usd_per_tco2": result.scc_at(2100),
        "welfare": result.run.welfare,
        "diagnostics": result.run.diagnostics,
        "artifacts": str(result.artifact_dir) if result.artifact_dir else None,
    }
    if config.is_original_dice:
        mu = tr.mu
        payload["mu_first_reaches_1"] = int(tr.years[int(np.argmax(mu >= 0.999))])
    _emit(payload, args.json)
    return 0


def cmd_matrix(args) -> int:
    data = args.data or bundled_data_path()
    configs: list[RunConfig] = []
    if args.set in ("marker", "all"):
        configs += marker_configs(data, out_dir=args.out, params_path=args.params,
                                  calibration_tol=args.tol)
    if args.set in ("nonmarker", "all"):
        configs += nonmarker_configs(data, out_dir=args.out, params_path=args.params,
                                     calibration_tol=args.tol)
    if args.original_dice:
        configs.append(
            RunConfig(scenario="original-dice", params_path=args.params,
                      out_dir=args.out)
        )
    outcome = run_matrix(configs, jobs=args.jobs)
    results, failures = outcome["results"], outcome["failures"]
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        temperature_summary(results).to_csv(out / "summary.csv", index=False,
                                            float_format="%.12g")
        if args.set in ("marker", "all"):
            marker_table(results).to_csv(out / "table_marker_t2100.csv",
                                         float_format="%.2f")
        if args.set in ("nonmarker", "all"):
            nonmarker_table(results).to_csv(out / "table_nonmarker_t2100.csv",
                                            index=False, float_format="%.1f")
        if failures:
            (out / "failures.json").write_text(json.dumps(failures, indent=1,
                                                          sort_keys=True))
    _emit(
        {
            "cells_requested": len(configs),
            "cells_completed": len(results),
            "failures": failures,
            "out": args.out,
        },
        args.json,
    )
    return 0


def _load_temperature(run_dir: Path):
    import pandas as pd

    frame = pd.read_csv(run_dir / "trajectory.csv")
    return frame["year"].to_numpy(dtype=float), frame["t_at"].to_numpy()


def cmd_stress(args) -> int:
    run_dir = Path(args.run)
    if not (run_dir / "trajectory.csv").exists():
        raise ConfigError(f"{run_dir} does not contain a run artifact")
    years, t_at = _load_temperature(run_dir)
    table = gompertz_to_table(GompertzLaw())
    fn = ExcessMortalityFn()
    portfolios = args.portfolio or [
        bundled_portfolio_path("annuity"), bundled_portfolio_path("insurance")
    ]
    rows = []
    for path in portfolios:
        spec = PortfolioSpec.from_csv(path)
        simulate = simulate_annuity if spec.kind == "annuity" else simulate_insurance
        res = simulate(spec, table, years, t_at, args.year, args.sims, args.seed, fn)
        rows.append(res)
        for warning in res.warnings:
            log.warning("%s: %s", spec.kind, warning)
    payload = {
        "run": str(run_dir),
        "year": args.year,
        "n_sims": args.sims,
        "seed": args.seed,
        "results": [
            {
                "kind": r.kind,
                "mean_dev_pct": round(r.dev_mean_pct, 2),
                "q01_dev_pct": round(r.dev_q01_pct, 2),
                "q99_dev_pct": round(r.dev_q99_pct, 2),
                "analytic_mean_dev_pct": round(r.analytic_dev_mean_pct, 4),
                "mc_se_mean_dev_pct": round(r.mc_se_dev_mean_pct, 4),
            }
            for r in rows
        ],
    }
    if args.out:
        import pandas as pd

        frame = pd.DataFrame(
            [
                {
                    "kind": r.kind, "year": r.year, "n_sims": r.n_sims,
                    "seed": r.seed,
                    "mean": r.mean, "q01": r.q01, "q99": r.q99,
                    "base_mean": r.base_mean, "base_q01": r.base_q01,
                    "base_q99": r.base_q99,
                    "mean_dev_pct": r.dev_mean_pct,
                    "q01_dev_pct": r.dev_q01_pct, "q99_dev_pct": r.dev_q99_pct,
                }
                for r in rows
            ]
        )
        frame.to_csv(args.out, index=False, float_format="%.12g")
        payload["out"] = args.out
    _emit(payload, args.json)
    return 0


def cmd_human_capital(args) -> int:
    run_dir = Path(args.run)
    years, t_at = _load_temperature(run_dir)
    fn = ExcessMortalityFn()
    from .mortality import mortality_damage_path

    dyears, deltas = mortality_damage_path(years, t_at, fn=fn)
    cubic = fit_cubic_damage(dyears, deltas, t0=dyears[0])
    law = GompertzLaw()
    income = default_income_profile()
    base = human_capital(income, args.rate, law, damage=None)
    stressed = human_capital(income, args.rate, law, damage=cubic)
    _emit(
        {
            "run": str(run_dir),
            "interest_rate": args.rate,
            "human_capital_base": base,
            "human_capital_stressed": stressed,
            "relative_deviation_pct": 100.0 * (stressed - base) / base,
            "cubic_fit_max_residual": cubic.max_abs_residual,
        },
        args.json,
    )
    return 0


def cmd_report(args) -> int:
    import pandas as pd

    out_dir = Path(args.matrix_dir)
    summary = out_dir / "summary.csv"
    if not summary.exists():
        raise ConfigError(f"no summary.csv under {out_dir}; run `climstress matrix`")
    frame = pd.read_csv(summary)
    pivot = frame.pivot_table(index="schedule", columns="ssp", values="t_at_2100")
    print(pivot.round(2).to_string())
    if args.json:
        print(json.dumps(json.loads(pivot.to_json()), indent=1, sort_keys=True))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="climstress",
        description="Climate-economy scenario engine for life-portfolio stress tests",
    )
    parser.add_argument("--json", action="store_true", help="machine-readable output")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    # --seed/--out/--params are accepted uniformly; commands ignore the
    # ones that cannot affect them (ingest and calibrate are seed-free)
    p = sub.add_parser("ingest", help="normalise SSP export files into a store")
    p.add_argument("files", nargs="+")
    p.add_argument("--out")
    p.add_argument("--params", help=argparse.SUPPRESS)
    p.add_argument("--seed", type=int, default=20240801, help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("calibrate", help="calibrate exogenous paths for one pair")
    p.add_argument("--store", required=True, help="ingested store or raw export")
    p.add_argument("--ssp", required=True)
    p.add_argument("--iam", required=True)
    p.add_argument("--tol", type=float, default=1e-3)
    p.add_argument("--params")
    p.add_argument("--out")
    p.add_argument("--seed", type=int, default=20240801, help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("run", help="run one scenario cell")
    p.add_argument("scenario", help="'SSP2/MESSAGE-GLOBIOM/netzero@2050' or 'original-dice'")
    p.add_argument("--data", default=None)
    p.add_argument("--params")
    p.add_argument("--out")
    p.add_argument("--seed", type=int, default=20240801)
    p.add_argument("--tol", type=float, default=1e-3)
    p.add_argument("--population-extension", action="store_true")
    p.add_argument("--no-cache", action="store_true")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("matrix", help="run the scenario matrix")
    p.add_argument("--set", choices=("marker", "nonmarker", "all"), default="marker")
    p.add_argument("--data", default=None)
    p.add_argument("--params")
    p.add_argument("--out")
    p.add_argument("--tol", type=float, default=1e-3)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--original-dice", action="store_true",
                   help="include the original-DICE reference cell")
    p.set_defaults(func=cmd_matrix)

    p = sub.add_parser("stress", help="portfolio stress test on a run artifact")
    p.add_argument("--run", required=True, help="cell artifact directory")
    p.add_argument("--portfolio", action="append",
                   help="portfolio csv (repeatable; default: bundled A and B)")
    p.add_argument("--year", type=int, default=2100)
    p.add_argument("--sims", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=20240801)
    p.add_argument("--out")
    p.set_defaults(func=cmd_stress)

    p = sub.add_parser("human-capital", help="human-capital valuation on a run")
    p.add_argument("--run", required=True)
    p.add_argument("--rate", type=float, default=0.032)
    p.set_defaults(func=cmd_human_capital)

    p = sub.add_parser("report", help="print the matrix temperature table")
    p.add_argument("--matrix-dir", required=True)
    p.add_argument("--out", help=argparse.SUPPRESS)
    p.add_argument("--params", help=argparse.SUPPRESS)
    p.add_argument("--seed", type=int, default=20240801, help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse uses exit code 2 for usage errors; remap to 64
        return 64 if exc.code not in (0, None) else 0
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 64
    except ClimstressError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
