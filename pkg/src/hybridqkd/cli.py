"""Command-line front end: simulate, rate, plan, plot-data."""

from __future__ import annotations

import argparse
import csv
import dataclasses
import hashlib
import json
import math
import os
import sys

import numpy as np

from .harness import (CvExperimentConfig, DvExperimentConfig, run_cv_experiment,
                      run_dv_experiment)
from .planner import CvLinkProfile, DvLinkProfile, LinkMode, QLink, best_path
from .rates import CvRateInput, DvRateInput, skr_cv_asymptotic, skr_dv_finite

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_USAGE = 2

CONSTELLATION_HEADER = ["symbol_index", "x_a", "p_a", "x_b", "p_b"]


class ConfigError(ValueError):
    pass


def _build_config(cls, data: dict, overrides: dict | None = None):
    """Instantiate a config dataclass, rejecting unknown fields."""
    if not isinstance(data, dict):
        raise ConfigError(f"config must be a JSON object, got {type(data).__name__}")
    known = {f.name for f in dataclasses.fields(cls)}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown config fields: {', '.join(sorted(unknown))}")
    merged = dict(data)
    for key, value in (overrides or {}).items():
        if value is not None:
            merged[key] = value
    try:
        return cls(**merged)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def _load_json(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON in {path}: {exc}") from exc


def _config_hash(cfg) -> str:
    payload = json.dumps(dataclasses.asdict(cfg), sort_keys=True).encode()
    return hashlib.sha256(payload).hexdigest()[:16]


def _jsonable(obj):
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return _jsonable(dataclasses.asdict(obj))
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, float) and math.isnan(obj):
        return None
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    return obj


def _write_report(out_dir: str, name: str, payload: dict) -> str:
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, name)
    with open(path, "w") as fh:
        json.dump(_jsonable(payload), fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def _write_constellation_csv(constellation: dict, path: str) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CONSTELLATION_HEADER)
        rows = zip(constellation["symbol_index"], constellation["x_a"],
                   constellation["p_a"], constellation["x_b"], constellation["p_b"])
        for k, xa, pa, xb, pb in rows:
            writer.writerow([int(k), f"{xa:.6f}", f"{pa:.6f}", f"{xb:.6f}", f"{pb:.6f}"])


def _cmd_simulate(args) -> int:
    data = _load_json(args.config) if args.config else {}
    out_dir = args.out or "."
    if args.mode == "cv":
        overrides = {"seed": args.seed, "n_symbols": args.symbols}
        cfg = _build_config(CvExperimentConfig, data, overrides)
        result = run_cv_experiment(cfg)
        payload = {
            "command": "simulate cv",
            "seed": cfg.seed,
            "config_hash": _config_hash(cfg),
            "config": dataclasses.asdict(cfg),
            "estimation": result.estimation,
            "rate": result.rate,
            "recovered_rotation": result.recovered_rotation,
        }
        report = _write_report(out_dir, "cv_report.json", payload)
        csv_path = os.path.join(out_dir, "constellation.csv")
        _write_constellation_csv(result.constellation, csv_path)
        from .plotting import save_constellation
        save_constellation(result.constellation, os.path.join(out_dir, "constellation.png"))
        print(f"report: {report}")
        print(f"T_hat={result.estimation.t_hat:.4f} xi_hat={result.estimation.xi_hat:.5f} "
              f"SKR={result.rate.skr_per_symbol:.5f} bits/symbol "
              f"({result.rate.skr_bps/1e6:.3f} Mbps)")
        return EXIT_OK
    overrides = {"seed": args.seed}
    if args.symbols is not None:
        overrides["block_size"] = args.symbols
    cfg = _build_config(DvExperimentConfig, data, overrides)
    result = run_dv_experiment(cfg)
    payload = {
        "command": "simulate dv",
        "seed": cfg.seed,
        "config_hash": _config_hash(cfg),
        "config": dataclasses.asdict(cfg),
        "qber": result.qber,
        "rate": result.rate,
        "block_rates_bps": list(result.block_rates_bps),
        "counts": result.counts,
    }
    report = _write_report(out_dir, "dv_report.json", payload)
    from .plotting import save_dv_blocks
    save_dv_blocks(result.block_rates_bps, result.qber.qber_z, result.qber.qber_x,
                   os.path.join(out_dir, "dv_blocks.png"))
    print(f"report: {report}")
    print(f"QBER Z={result.qber.qber_z:.4f} X={result.qber.qber_x:.4f} "
          f"SKR={result.rate.skr_bps/1e3:.2f} kbps")
    return EXIT_OK


_SWEEPABLE_CV = ("v_a", "t", "xi_a", "eta", "v_el", "beta")


def _cmd_rate(args) -> int:
    if args.mode == "cv":
        data = {"v_a": 0.45, "t": 0.72, "xi_a": 0.012, "eta": 0.30, "v_el": 0.081}
        data.update(_load_json(args.config) if args.config else {})
        if "loss_db" in data:
            data["t"] = 10.0 ** (-float(data.pop("loss_db")) / 10.0)
        overrides = {k: getattr(args, k) for k in
                     ("v_a", "t", "xi_a", "eta", "v_el", "beta", "symbol_rate")}
        if args.loss_db is not None:
            overrides["t"] = 10.0 ** (-args.loss_db / 10.0)
        inp = _build_config(CvRateInput, data, overrides)
        if args.sweep:
            name, lo, hi, n = _parse_sweep(args.sweep, _SWEEPABLE_CV)
            print(f"{name},skr_per_symbol,skr_bps")
            for value in np.linspace(lo, hi, n):
                swept = dataclasses.replace(inp, **{name: float(value)})
                rep = skr_cv_asymptotic(swept)
                print(f"{value:.6g},{rep.skr_per_symbol:.6g},{rep.skr_bps:.6g}")
            return EXIT_OK
        rep = skr_cv_asymptotic(inp)
        print(json.dumps(_jsonable({"command": "rate cv", "input": inp, "report": rep}),
                         indent=2, sort_keys=True))
        return EXIT_OK
    if not args.config:
        raise ConfigError("rate dv requires --config with the block counts")
    inp = _build_config(DvRateInput, _load_json(args.config))
    rep = skr_dv_finite(inp)
    print(json.dumps(_jsonable({"command": "rate dv", "input": inp, "report": rep}),
                     indent=2, sort_keys=True))
    return EXIT_OK


def _parse_sweep(spec: str, allowed) -> tuple[str, float, float, int]:
    parts = spec.split(":")
    if len(parts) != 4:
        raise ConfigError("sweep must be <param>:<lo>:<hi>:<n>")
    name, lo, hi, n = parts[0], float(parts[1]), float(parts[2]), int(parts[3])
    if name not in allowed:
        raise ConfigError(f"cannot sweep {name!r}; choose from {', '.join(allowed)}")
    if n < 2:
        raise ConfigError("sweep needs at least 2 points")
    return name, lo, hi, n


def _link_from_dict(data: dict) -> QLink:
    if not isinstance(data, dict):
        raise ConfigError("each link must be a JSON object")
    cv = _build_config(CvLinkProfile, data.pop("cv", {}))
    dv = _build_config(DvLinkProfile, data.pop("dv", {}))
    known = {"id", "a", "b", "loss_db", "xi_a"}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown link fields: {', '.join(sorted(unknown))}")
    try:
        return QLink(cv=cv, dv=dv, **data)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def _cmd_plan(args) -> int:
    data = _load_json(args.network)
    if not isinstance(data, dict) or "links" not in data:
        raise ConfigError("network file must be an object with a 'links' array")
    links = [_link_from_dict(dict(item)) for item in data["links"]]
    src = args.src or data.get("src")
    dst = args.dst or data.get("dst")
    if not src or not dst:
        raise ConfigError("source and destination nodes are required (file keys or flags)")
    plan = best_path(links, src, dst)
    payload = {
        "command": "plan",
        "src": src, "dst": dst,
        "modes": {k: v.value for k, v in plan.modes.items()},
        "rates_bps": plan.rates,
        "connected": plan.connected,
        "path": list(plan.path),
        "path_links": list(plan.path_links),
        "bottleneck_bps": plan.bottleneck_bps,
    }
    if not plan.connected:
        payload["no_route"] = True
    print(json.dumps(_jsonable(payload), indent=2, sort_keys=True))
    return EXIT_OK


def _cmd_plot_data(args) -> int:
    data = _load_json(args.config) if args.config else {}
    cfg = _build_config(CvExperimentConfig, data, {"seed": args.seed, "n_symbols": args.symbols})
    result = run_cv_experiment(cfg)
    out_dir = args.out or "."
    os.makedirs(out_dir, exist_ok=True)
    csv_path = os.path.join(out_dir, "constellation.csv")
    _write_constellation_csv(result.constellation, csv_path)
    from .plotting import save_constellation
    save_constellation(result.constellation, os.path.join(out_dir, "constellation.png"))
    print(f"wrote {csv_path}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hybridqkd",
                                     description="Hybrid DV/CV QKD simulator and planner")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run an end-to-end experiment")
    sim.add_argument("mode", choices=("cv", "dv"))
    sim.add_argument("--config", help="JSON experiment config")
    sim.add_argument("--seed", type=int)
    sim.add_argument("--out", help="output directory (default: current)")
    sim.add_argument("--symbols", type=int, help="symbol/pulse count override")
    sim.set_defaults(func=_cmd_simulate)

    rate = sub.add_parser("rate", help="evaluate rate calculators, no simulation")
    rate.add_argument("mode", choices=("cv", "dv"))
    rate.add_argument("--config", help="JSON parameter file")
    rate.add_argument("--v-a", dest="v_a", type=float)
    rate.add_argument("--t", type=float)
    rate.add_argument("--loss-db", dest="loss_db", type=float)
    rate.add_argument("--xi-a", dest="xi_a", type=float)
    rate.add_argument("--eta", type=float)
    rate.add_argument("--v-el", dest="v_el", type=float)
    rate.add_argument("--beta", type=float)
    rate.add_argument("--symbol-rate", dest="symbol_rate", type=float)
    rate.add_argument("--sweep", help="<param>:<lo>:<hi>:<n> CSV sweep")
    rate.set_defaults(func=_cmd_rate)

    plan = sub.add_parser("plan", help="assign link modes and find the widest route")
    plan.add_argument("network", help="JSON network description")
    plan.add_argument("--src")
    plan.add_argument("--dst")
    plan.set_defaults(func=_cmd_plan)

    plot = sub.add_parser("plot-data", help="emit constellation CSV and figure")
    plot.add_argument("--config", help="JSON CV experiment config")
    plot.add_argument("--seed", type=int)
    plot.add_argument("--out")
    plot.add_argument("--symbols", type=int)
    plot.set_defaults(func=_cmd_plot_data)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # simulation/planning failure
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
