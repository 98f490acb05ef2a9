"""Command-line front end.

Subcommands: `transform` (raw series -> panel.csv), `estimate` (single test at
a hypothesized point), `grid` (test inversion over a lattice), `misspec` (the
misspecification laboratory), and `report` (human-readable grid summary).
Exit codes reflect operational health only; statistical rejection is not an
error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from importlib import metadata

import numpy as np

from . import grids, misspec, snapshot
from .config import ConfigError, RunConfig, parse_config
from .design import InstrumentSpec, build_design
from .hac import HACConfig
from .inference import (
    SplitSpec,
    qll_s_statistic,
    s_statistic,
    split_sample_s_statistic,
)
from .models import (
    CACParams,
    ModelKind,
    SemiStructuralParams,
    StructuralParams,
    constants_from_calibration,
)
from .pipeline import (
    Dataset,
    PipelineError,
    TransformSpec,
    read_panel_csv,
    write_panel_csv,
)


def _version() -> str:
    try:
        return metadata.version("eulergmm")
    except metadata.PackageNotFoundError:
        return "unknown"


def _transform_spec(cfg: RunConfig) -> TransformSpec:
    sample = None
    if cfg.sample_start and cfg.sample_end:
        sample = (cfg.sample_start, cfg.sample_end)
    return TransformSpec(
        investment_measure=cfg.investment_measure,
        rate_scale=cfg.rate_scale,
        sample=sample,
    )


def _dataset(cfg: RunConfig) -> Dataset:
    if cfg.panel:
        return read_panel_csv(cfg.panel)
    if cfg.snapshot:
        return snapshot.transform_snapshot(_transform_spec(cfg), external=cfg.external)
    if cfg.series_dir:
        from .pipeline import (
            assemble_dataset,
            build_investment_measure,
            compute_inflation,
            compute_log_utilization,
            compute_real_rate,
            load_series_csv,
            transform_external,
        )

        raw = {}
        for fn in sorted(os.listdir(cfg.series_dir)):
            if fn.endswith(".csv"):
                name = os.path.splitext(fn)[0]
                raw[name] = load_series_csv(os.path.join(cfg.series_dir, fn), name=name)
        spec = _transform_spec(cfg)
        inflation = compute_inflation(raw["GDPDEF"])
        cols = {
            "delta_i": build_investment_measure(spec, raw),
            "r_p": compute_real_rate(raw["FEDFUNDS"], inflation, spec.rate_scale),
            "u": compute_log_utilization(raw["TCU"]),
        }
        source = {"oil": "OIL", "vxo": "VXO", "mp_shock": "MP_SHOCK", "mil_news": "MIL_NEWS"}
        for kind in cfg.external:
            cols[kind] = transform_external(kind, raw[source[kind]])
        return assemble_dataset(spec, cols)
    raise PipelineError(
        "no data source configured: set [data] panel, series_dir, or snapshot=true"
    )


def _params(cfg: RunConfig, point) -> object:
    point = tuple(float(x) for x in point)
    if cfg.model is ModelKind.IAC:
        if len(point) != 3:
            raise ValueError(f"IAC needs theta0 = rho,kappa,zeta; got {point}")
        return StructuralParams(*point)
    if cfg.model is ModelKind.SEMI:
        if len(point) != 2:
            raise ValueError(f"SEMI needs theta0 = varphi,phi; got {point}")
        return SemiStructuralParams(cfg.rho, *point)
    if len(point) != 3:
        raise ValueError(f"CAC needs theta0 = rho,sigma,zeta; got {point}")
    return CACParams(*point)


def _evaluate(cfg: RunConfig, sys_, params):
    hac = HACConfig(bandwidth=cfg.bandwidth)
    if cfg.statistic == "S":
        return s_statistic(params, sys_, hac, cfg.level)
    if cfg.statistic == "qll":
        return qll_s_statistic(params, sys_, hac, cfg.level)
    split = SplitSpec(first_fraction=cfg.split_fraction, gap=cfg.split_gap)
    return split_sample_s_statistic(params, sys_, split, hac, cfg.level)


def _build_system(cfg: RunConfig, data: Dataset):
    constants = constants_from_calibration(cfg.beta, cfg.delta)
    instruments = InstrumentSpec(lags=cfg.instrument_lags, external=cfg.external)
    return build_design(data, cfg.model, instruments, constants)


def _write_json(path: str, payload: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def cmd_transform(cfg: RunConfig, out_dir: str) -> int:
    data = _dataset(cfg)
    os.makedirs(out_dir, exist_ok=True)
    panel = os.path.join(out_dir, "panel.csv")
    write_panel_csv(data, panel)
    _write_json(os.path.join(out_dir, "effective_config.json"), cfg.effective())
    print(f"wrote {panel} ({len(data)} quarters, {data.start}..{data.end})")
    return 0


def cmd_estimate(cfg: RunConfig, out_dir: str) -> int:
    if cfg.theta0 is None:
        raise ConfigError("estimate requires [inference] theta0")
    data = _dataset(cfg)
    sys_ = _build_system(cfg, data)
    result = _evaluate(cfg, sys_, _params(cfg, cfg.theta0))
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, "test_result.json")
    _write_json(path, {"config": cfg.effective(), "result": result.to_dict()})
    verdict = "accepted" if result.accept else "rejected"
    print(
        f"{result.variant} at theta0={list(cfg.theta0)}: statistic {result.statistic:.4f} "
        f"vs critical {result.critical_value:.4f} (df={result.df}) -> {verdict}"
    )
    return 0


def _grid_spec(cfg: RunConfig) -> grids.GridSpec:
    if cfg.model is ModelKind.SEMI:
        spec = grids.default_semi_grid(cfg.extra_points)
        if cfg.grid_points:
            if len(cfg.grid_points) != 2:
                raise ConfigError("SEMI grid needs 2 point counts (varphi, phi)")
            axes = tuple(
                grids.AxisSpec(a.name, a.lower, a.upper, n, a.include_lower, a.include_upper)
                for a, n in zip(spec.axes, cfg.grid_points)
            )
            spec = grids.GridSpec(axes=axes, extra_points=spec.extra_points)
        return spec
    spec = grids.default_structural_grid(cfg.extra_points)
    if cfg.grid_points:
        if len(cfg.grid_points) != 3:
            raise ConfigError("structural grid needs 3 point counts (rho, kappa, zeta)")
        axes = tuple(
            grids.AxisSpec(a.name, a.lower, a.upper, n, a.include_lower, a.include_upper)
            for a, n in zip(spec.axes, cfg.grid_points)
        )
        spec = grids.GridSpec(axes=axes, extra_points=spec.extra_points)
    return spec


def cmd_grid(cfg: RunConfig, out_dir: str, threads: int) -> int:
    data = _dataset(cfg)
    sys_ = _build_system(cfg, data)
    spec = _grid_spec(cfg)

    def evaluator(point: np.ndarray):
        return _evaluate(cfg, sys_, _params(cfg, point))

    result = grids.invert_test(
        evaluator,
        spec,
        cfg.level,
        threads=threads,
        variant=cfg.statistic,
        metadata={
            "config": cfg.effective(),
            "sample": [str(data.start), str(data.end)],
            "bandwidth": HACConfig(bandwidth=cfg.bandwidth).resolve_bandwidth(sys_.T),
        },
    )
    os.makedirs(out_dir, exist_ok=True)
    csv_path, json_path = grids.export_grid(result, os.path.join(out_dir, "grid"))
    summary = grids.set_summary(result)
    print(
        f"wrote {csv_path} and {json_path}: accepted "
        f"{summary['accepted_points']}/{summary['total_points']} "
        f"({summary['accepted_fraction']:.1%}) at level {cfg.level}"
    )
    return 0


def cmd_misspec(args: argparse.Namespace) -> int:
    cfg = misspec.MisspecConfig(
        gamma=args.gamma,
        zeta_true=args.zeta,
        T=args.T,
        reps=args.reps,
        seed=args.seed,
    )
    report = misspec.lab_report(cfg)
    os.makedirs(args.out, exist_ok=True)
    path = os.path.join(args.out, "misspec_report.json")
    _write_json(path, report)
    demo = report["bias_demo"]
    print(
        f"wrote {path}: theta*={report['pseudo_true']['theta_star']:.4f}, "
        f"misspecified slope {demo['zeta_hat_misspecified']:.4f} vs "
        f"correct {demo['zeta_hat_correct']:.4f} "
        f"(closed-form plim {demo['theoretical_plim']:.4f})"
    )
    return 0


def cmd_report(grid_json: str) -> int:
    if not os.path.exists(grid_json):
        raise PipelineError(f"no such grid sidecar: {grid_json}")
    with open(grid_json, encoding="utf-8") as fh:
        sidecar = json.load(fh)
    s = sidecar["summary"]
    print(f"confidence set at level {s['level']} (variant {s['variant']})")
    print(
        f"  accepted {s['accepted_points']}/{s['total_points']} points "
        f"({s['accepted_fraction']:.1%}), {s['error_points']} evaluation errors"
    )
    for name, bounds in s["projections"].items():
        if bounds is None:
            print(f"  {name}: empty projection")
        else:
            print(f"  {name}: [{bounds[0]:.6g}, {bounds[1]:.6g}]")
    meta = sidecar.get("metadata", {})
    if "config" in meta:
        print("  settings: " + json.dumps(meta["config"], sort_keys=True))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="eulergmm",
        description="Weak-identification-robust GMM inference for investment Euler equations",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {_version()}")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, help_ in (
        ("transform", "build panel.csv from raw series"),
        ("estimate", "evaluate a single test at theta0"),
        ("grid", "invert the test over a parameter lattice"),
    ):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--config", required=True, help="INI run configuration")
        p.add_argument("--out", default=None, help="output directory (default from config)")
        if name == "grid":
            p.add_argument(
                "--threads", type=int, default=os.cpu_count() or 1,
                help="worker threads for lattice evaluation",
            )

    p = sub.add_parser("misspec", help="run the misspecification laboratory")
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--zeta", type=float, default=1.0)
    p.add_argument("--T", type=int, default=100_000)
    p.add_argument("--reps", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=".")

    p = sub.add_parser("report", help="summarize an exported grid")
    p.add_argument("--grid", required=True, help="path to the grid JSON sidecar")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "misspec":
            return cmd_misspec(args)
        if args.command == "report":
            return cmd_report(args.grid)
        cfg = parse_config(args.config)
        out_dir = args.out or cfg.out_dir
        if args.command == "transform":
            return cmd_transform(cfg, out_dir)
        if args.command == "estimate":
            return cmd_estimate(cfg, out_dir)
        if args.command == "grid":
            return cmd_grid(cfg, out_dir, args.threads)
        raise ValueError(f"unknown command {args.command!r}")
    except (ConfigError, PipelineError, ValueError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
