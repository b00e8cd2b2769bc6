"""Command-line front end: reproducible generate / fit / simulate / analyze
/ compare runs.

Every command that writes files also writes a ``<output>.manifest.json``
recording the subcommand and fully resolved options; ``thermrom replay``
re-executes a manifest and reproduces its outputs byte for byte. Exit
codes: 0 success, 2 input or data error, 3 fit non-convergence, 4 internal
error. THERMROM_THREADS caps internal parallelism (default 1).
"""
from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import __version__
from .errors import DataError
from .fit import FitOptions, fit
from .metrics import peak_lag, rmse_percent
from .model import load_model, modal_analysis, save_model, steady_state
from .refsim import PRESET_NAMES, WEATHER_PROFILES, aggregate_zones, preset, simulate_network, synth_weather
from .simulate import SimConfig, simulate
from .timeseries import read_csv, write_csv
from .model import to_state_space

EXIT_OK = 0
EXIT_DATA = 2
EXIT_NO_CONVERGENCE = 3
EXIT_INTERNAL = 4


def _n_jobs() -> int:
    raw = os.environ.get("THERMROM_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise DataError(f"THERMROM_THREADS must be an integer, got {raw!r}") from None


def _write_manifest(out_path: str, subcommand: str, options: dict, inputs: list, outputs: list) -> str:
    manifest = {
        "artifact_version": __version__,
        "subcommand": subcommand,
        "options": options,
        "inputs": inputs,
        "outputs": outputs,
    }
    path = f"{out_path}.manifest.json"
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")
    return path


def _dataset_columns(preset_name: str, net, w):
    zones = simulate_network(net, w)
    ordered = [zones[n.name] for n in net.zone_nodes()]
    columns = [w.outdoor_series()] + ordered
    if len(ordered) > 1:
        volumes = [n.volume for n in net.zone_nodes()]
        columns.append(aggregate_zones(ordered, volumes))
    return columns


def run_generate(preset_name: str, days: int, seed: int, profile: str, out: str) -> int:
    net = preset(preset_name)
    w = synth_weather(days, seed, profile)
    columns = _dataset_columns(preset_name, net, w)
    write_csv(out, columns)
    _write_manifest(
        out,
        "generate",
        {"preset_name": preset_name, "days": days, "seed": seed, "profile": profile, "out": out},
        [],
        [out],
    )
    print(f"wrote {out}: {len(w)} rows, columns {['hour'] + [c.label for c in columns]}")
    return EXIT_OK


def _column(columns: dict, name: str, path: str):
    if name not in columns:
        raise DataError(f"{path}: no column named {name!r} (has {sorted(columns)})")
    return columns[name]


def _print_model_summary(c, rmse=None) -> None:
    print(f"c1={c.c1:.6g} c2={c.c2:.6g} c3={c.c3:.6g} c4={c.c4:.6g}")
    if rmse is not None:
        print(f"rmse_percent={rmse:.6g}")
    mp = modal_analysis(c)
    eigs = ", ".join(f"{e.real:.6g}{e.imag:+.6g}j" for e in mp.eigenvalues)
    print(
        f"modal: omega_n={mp.omega_n:.6g} 1/h, xi={mp.xi:.6g}, {mp.regime}, eigenvalues [{eigs}]"
    )


def run_fit(
    data: str,
    indoor: str,
    outdoor: str,
    pin_c4: float | None,
    starts: int,
    seed: int,
    max_evals: int,
    out: str,
) -> int:
    columns = read_csv(data)
    indoor_s = _column(columns, indoor, data)
    outdoor_s = _column(columns, outdoor, data)
    opts = FitOptions(pinned_c4=pin_c4, n_starts=starts, seed=seed, max_evals=max_evals)
    result = fit(indoor_s, outdoor_s, opts, n_jobs=_n_jobs())
    save_model(result.coefficients, out)
    _write_manifest(
        out,
        "fit",
        {
            "data": data,
            "indoor": indoor,
            "outdoor": outdoor,
            "pin_c4": pin_c4,
            "starts": starts,
            "seed": seed,
            "max_evals": max_evals,
            "out": out,
        },
        [data],
        [out],
    )
    _print_model_summary(result.coefficients, result.rmse_percent)
    print(
        f"fit: start {result.start_index} of {starts} won after {result.n_evals} evaluations"
    )
    if not result.converged:
        print("warning: no start stalled within its evaluation budget", file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    return EXIT_OK


def run_simulate(model: str, data: str, outdoor: str, x0: float, v0: float, out: str) -> int:
    c = load_model(model)
    columns = read_csv(data)
    u = _column(columns, outdoor, data)
    cfg = SimConfig(dt=u.spacing(), x0=x0, v0=v0)
    modeled = simulate(to_state_space(c), u, cfg)
    write_csv(out, [u.with_label("t_out"), modeled])
    _write_manifest(
        out,
        "simulate",
        {"model": model, "data": data, "outdoor": outdoor, "x0": x0, "v0": v0, "out": out},
        [model, data],
        [out],
    )
    print(f"wrote {out}: {len(modeled)} rows")
    return EXIT_OK


def run_analyze(
    model: str | None,
    data: str | None,
    indoor: str,
    outdoor: str,
    u: float | None,
    max_lag: int,
) -> int:
    if model is None and data is None:
        raise DataError("analyze needs a model file, a dataset, or both")
    if model is not None:
        c = load_model(model)
        _print_model_summary(c)
        if u is not None:
            print(f"steady state at u={u:.6g}: {steady_state(c, u):.6g} C")
    if data is not None:
        columns = read_csv(data)
        indoor_s = _column(columns, indoor, data)
        outdoor_s = _column(columns, outdoor, data)
        lag = peak_lag(outdoor_s, indoor_s, max_lag)
        print(
            f"peak lag: indoor trails outdoor by {lag} samples "
            f"(max_lag {max_lag}, positive = indoor later)"
        )
    return EXIT_OK


def run_compare(
    presets: list[str],
    days: int,
    seed: int,
    starts: int,
    pin_c4: float | None,
    max_evals: int,
    out: str,
) -> int:
    if len(presets) < 2:
        raise DataError("compare needs at least 2 presets")
    rows = []
    for name in presets:
        try:
            net = preset(name)
            w = synth_weather(days, seed)
            columns = {c.label: c for c in _dataset_columns(name, net, w)}
            indoor = columns.get("t_in", columns.get("t_in_agg"))
            opts = FitOptions(pinned_c4=pin_c4, n_starts=starts, seed=seed, max_evals=max_evals)
            result = fit(indoor, columns["t_out"], opts, n_jobs=_n_jobs())
        except DataError as exc:
            raise DataError(f"preset {name!r}: {exc}") from None
        c = result.coefficients
        mp = modal_analysis(c)
        rows.append(
            {
                "preset": name,
                "c1": c.c1,
                "c2": c.c2,
                "c3": c.c3,
                "c4": c.c4,
                "rmse_percent": result.rmse_percent,
                "omega_n": mp.omega_n,
                "xi": mp.xi,
                "regime": mp.regime,
            }
        )

    spread = {"preset": "cv"}
    for key in ("c1", "c2", "c3", "c4"):
        vals = np.array([r[key] for r in rows])
        mean = vals.mean()
        spread[key] = float(np.std(vals) / abs(mean)) if mean != 0.0 else float("nan")

    header = ["preset", "c1", "c2", "c3", "c4", "rmse_percent", "omega_n", "xi", "regime"]
    with open(out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for r in rows:
            fh.write(",".join(_cell(r.get(k)) for k in header) + "\n")
        fh.write(",".join(_cell(spread.get(k)) for k in header) + "\n")
    _write_manifest(
        out,
        "compare",
        {
            "presets": presets,
            "days": days,
            "seed": seed,
            "starts": starts,
            "pin_c4": pin_c4,
            "max_evals": max_evals,
            "out": out,
        },
        [],
        [out],
    )

    fmt = "{:<28}" + "{:>12}" * 7 + "  {}"
    print(fmt.format(*header))
    for r in rows + [spread]:
        print(
            fmt.format(
                r.get("preset", ""),
                *(_short(r.get(k)) for k in header[1:-1]),
                r.get("regime", ""),
            )
        )
    return EXIT_OK


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _short(value) -> str:
    return "" if value is None else f"{value:.5g}"


def run_replay(manifest: str) -> int:
    with open(manifest, "r", encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise DataError(f"{manifest}: invalid JSON: {exc}") from None
    handlers = {
        "generate": run_generate,
        "fit": run_fit,
        "simulate": run_simulate,
        "compare": run_compare,
    }
    sub = obj.get("subcommand")
    if sub not in handlers:
        raise DataError(f"{manifest}: cannot replay subcommand {sub!r}")
    options = obj.get("options")
    if not isinstance(options, dict):
        raise DataError(f"{manifest}: missing options")
    return handlers[sub](**options)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="thermrom",
        description="Second-order thermal zone models: data generation, fitting, analysis.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("generate", help="write a reference-simulator dataset CSV")
    p.add_argument("--preset", required=True, choices=PRESET_NAMES)
    p.add_argument("--days", type=int, default=12)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--profile", choices=WEATHER_PROFILES, default="mild_coastal")
    p.add_argument("--out", required=True)

    p = sub.add_parser("fit", help="fit model coefficients to a dataset CSV")
    p.add_argument("--data", required=True)
    p.add_argument("--indoor", default="t_in")
    p.add_argument("--outdoor", default="t_out")
    p.add_argument("--pin-c4", type=float, default=None, dest="pin_c4")
    p.add_argument("--starts", type=int, default=16)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-evals", type=int, default=2000, dest="max_evals")
    p.add_argument("--out", required=True)

    p = sub.add_parser("simulate", help="run a fitted model forward under a weather CSV")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--outdoor", default="t_out")
    p.add_argument("--x0", type=float, default=0.0)
    p.add_argument("--v0", type=float, default=0.0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("analyze", help="modal parameters, steady state, indoor/outdoor lag")
    p.add_argument("--model", default=None)
    p.add_argument("--data", default=None)
    p.add_argument("--indoor", default="t_in")
    p.add_argument("--outdoor", default="t_out")
    p.add_argument("--u", type=float, default=None)
    p.add_argument("--max-lag", type=int, default=12, dest="max_lag")

    p = sub.add_parser("compare", help="generate + fit several presets, tabulate coefficients")
    p.add_argument("--presets", required=True, help="comma-separated preset names")
    p.add_argument("--days", type=int, default=12)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--starts", type=int, default=16)
    p.add_argument("--pin-c4", type=float, default=None, dest="pin_c4")
    p.add_argument("--max-evals", type=int, default=2000, dest="max_evals")
    p.add_argument("--out", required=True)

    p = sub.add_parser("replay", help="re-run a recorded manifest")
    p.add_argument("manifest")
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.subcommand == "generate":
            return run_generate(args.preset, args.days, args.seed, args.profile, args.out)
        if args.subcommand == "fit":
            return run_fit(
                args.data, args.indoor, args.outdoor, args.pin_c4,
                args.starts, args.seed, args.max_evals, args.out,
            )
        if args.subcommand == "simulate":
            return run_simulate(args.model, args.data, args.outdoor, args.x0, args.v0, args.out)
        if args.subcommand == "analyze":
            return run_analyze(args.model, args.data, args.indoor, args.outdoor, args.u, args.max_lag)
        if args.subcommand == "compare":
            return run_compare(
                [s for s in args.presets.split(",") if s],
                args.days, args.seed, args.starts, args.pin_c4, args.max_evals, args.out,
            )
        if args.subcommand == "replay":
            return run_replay(args.manifest)
        raise DataError(f"unknown subcommand {args.subcommand!r}")
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except Exception as exc:  # internal invariant violation
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
