"""Command-line interface: ``delay-esn {gen-data,train,predict,evaluate,ablate}``."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import persistence
from .embedding import TimeSeries
from .errors import (
    AblationError,
    DegenerateSeriesError,
    DelayEsnError,
    FormatError,
    GenerationError,
    InsufficientDataError,
    IntegrationError,
    SingularSystemError,
    ZeroReferenceError,
)
from .experiments import SYSTEM_PROFILES, SYSTEMS, AblationSpec, run_ablation
from .metrics import evaluate
from .prediction import free_run
from .profiles import HORIZONS, PROFILES, profile
from .systems import LorenzParams, RosslerParams, integrate_lorenz, integrate_rossler, observe, synth_traffic
from .training import train

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 2, 3, 4
SEED_ENV = "DELAY_ESN_SEED"

# flag dest -> EsnConfig field
ESN_FLAGS = {
    "m": "embedding_dimension",
    "n": "reservoir_size",
    "p": "connection_probability",
    "alpha": "leaking_rate",
    "beta": "regularization",
    "rho": "spectral_radius",
    "washout": "washout",
    "scale": "scaling",
    "train_length": "train_length",
    "activation": "activation",
    "input_halfwidth": "input_weight_halfwidth",
    "weight_scheme": "reservoir_weight_scheme",
    "bias": "bias_input",
}

log = logging.getLogger("delay_esn")


def positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def nonneg_int(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {v}")
    return v


def positive_float(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be > 0, got {v}")
    return v


def unit_interval(text: str) -> float:
    v = float(text)
    if not 0 < v <= 1:
        raise argparse.ArgumentTypeError(f"must lie in (0, 1], got {v}")
    return v


def seed_type(text: str) -> int:
    v = int(text)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return v


def int_list(text: str) -> list[int]:
    try:
        values = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not values or any(v < 1 for v in values) or any(b <= a for a, b in zip(values, values[1:])):
        raise argparse.ArgumentTypeError("grid must be a strictly increasing list of positive integers")
    return values


def default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None or raw == "":
        return 0
    try:
        return seed_type(raw)
    except (ValueError, argparse.ArgumentTypeError):
        raise SystemExit(f"delay-esn: error: {SEED_ENV}={raw!r} is not a valid seed")


def add_esn_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("ESN hyperparameters (override the profile)")
    g.add_argument("--profile", choices=sorted(PROFILES), help="hyperparameter preset")
    g.add_argument("--m", type=positive_int, help="embedding dimension")
    g.add_argument("--n", type=positive_int, help="reservoir size")
    g.add_argument("--p", type=unit_interval, help="connection probability")
    g.add_argument("--alpha", type=unit_interval, help="leaking rate")
    g.add_argument("--beta", type=positive_float, help="ridge regularization")
    g.add_argument("--rho", type=positive_float, help="target spectral radius")
    g.add_argument("--washout", type=nonneg_int)
    g.add_argument("--scale", choices=["none", "zscore", "minmax"], help="input scaling")
    g.add_argument("--train-length", type=positive_int, help="training length N")
    g.add_argument("--activation", choices=["tanh", "logistic"])
    g.add_argument("--input-halfwidth", type=positive_float, help="W_in entries in [-h, h]")
    g.add_argument("--weight-scheme", choices=["uniform_pm1", "binary01"])
    g.add_argument("--bias", action=argparse.BooleanOptionalAction, default=None, help="append a unit bias input")


def esn_config(args, profile_name: str):
    overrides = {field: getattr(args, dest) for dest, field in ESN_FLAGS.items() if getattr(args, dest, None) is not None}
    return profile(profile_name, **overrides)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="delay-esn", description="Delay-embedded echo-state network predictors.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def command(name, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", type=Path, help="JSON file of flag values; explicit flags win")
        return p

    g = command("gen-data", "generate a ground-truth series")
    g.add_argument("--system", choices=["lorenz", "rossler", "traffic"], default="lorenz")
    g.add_argument("--observe", choices=["x", "y", "z"], default="x")
    g.add_argument("--steps", type=positive_int, default=1300, help="number of samples")
    g.add_argument("--dt", type=positive_float, help="sampling interval (default 0.1, traffic 1 hour)")
    g.add_argument("--substeps", type=positive_int, default=10)
    g.add_argument("--transient", type=nonneg_int, default=1000)
    g.add_argument("--x0", type=lambda s: [float(v) for v in s.split(",")], help="initial state x,y,z")
    g.add_argument("--rossler-form", choices=["standard_yz", "variant_yx"], default="standard_yz")
    g.add_argument("--noise-std", type=float, default=5.0, help="traffic noise level")
    g.add_argument("--seed", type=seed_type)
    g.add_argument("--full-state", type=Path, help="also write t,x,y,z here")
    g.add_argument("-o", "--output", type=Path, required=True)

    t = command("train", "fit a model on a series CSV")
    t.add_argument("-i", "--input", type=Path, required=True)
    t.add_argument("-o", "--output", type=Path, required=True)
    t.add_argument("--seed", type=seed_type)
    add_esn_flags(t)

    p = command("predict", "free-run a trained model")
    p.add_argument("-m", "--model", type=Path, required=True)
    p.add_argument("-l", "--horizon", type=nonneg_int, default=300)
    p.add_argument("-o", "--output", type=Path, default=Path("forecast.csv"))
    p.add_argument("--truth", type=Path, help="series CSV containing the held-out continuation")
    p.add_argument("--eps", type=positive_float, default=1e-8, help="NMAE zero guard")

    e = command("evaluate", "score a forecast CSV against a truth series")
    e.add_argument("--truth", type=Path, required=True)
    e.add_argument("--forecast", type=Path, required=True)
    e.add_argument("--start-index", type=nonneg_int, help="truth index of the first forecast sample")
    e.add_argument("--eps", type=positive_float, default=1e-8)
    e.add_argument("-o", "--output", type=Path, help="write the metric JSON here as well")

    a = command("ablate", "Monte-Carlo sweep over the embedding dimension")
    a.add_argument("--system", choices=SYSTEMS, default="lorenz_x")
    a.add_argument("--m-grid", type=int_list, default=[1, 2, 5, 8])
    a.add_argument("--trials", type=positive_int, default=20)
    a.add_argument("-l", "--horizon", type=positive_int)
    a.add_argument("-i", "--input", type=Path, help="series CSV for --system csv_input")
    a.add_argument("--seed", type=seed_type)
    a.add_argument("--fix-data", action="store_true", help="reuse one data set for every trial")
    a.add_argument("--rossler-form", choices=["standard_yz", "variant_yx"], default="standard_yz")
    a.add_argument("--noise-std", type=float, default=5.0)
    a.add_argument("--jobs", type=positive_int, default=1, help="worker processes")
    a.add_argument("-o", "--output", type=Path, default=Path("ablation"), help="report prefix (.json/.csv added)")
    add_esn_flags(a)
    return parser


def parse_args(argv=None) -> argparse.Namespace:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config is None:
        return args
    try:
        values = json.loads(args.config.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        parser.error(f"cannot read --config {args.config}: {exc}")
    if not isinstance(values, dict):
        parser.error("--config must hold a JSON object")
    sub = parser._subparsers._group_actions[0].choices[args.command]
    known = {a.dest for a in sub._actions}
    defaults = {}
    for key, value in values.items():
        dest = key.lstrip("-").replace("-", "_")
        if dest not in known or dest in ("config", "help"):
            parser.error(f"--config: unknown option {key!r} for {args.command}")
        action = next(a for a in sub._actions if a.dest == dest)
        if action.type is not None and not isinstance(value, (bool, list)) and value is not None:
            try:
                value = action.type(str(value))
            except (argparse.ArgumentTypeError, ValueError) as exc:
                parser.error(f"--config: bad value for {key!r}: {exc}")
        if action.choices is not None and value not in action.choices:
            parser.error(f"--config: {key!r} must be one of {sorted(action.choices)}")
        defaults[dest] = value
    sub.set_defaults(**defaults)
    return parser.parse_args(argv)


def _seed(args) -> int:
    return args.seed if args.seed is not None else default_seed()


def cmd_gen_data(args) -> int:
    seed = _seed(args)
    comments = {"system": args.system, "seed": seed}
    if args.system == "traffic":
        dt = args.dt or 1.0
        per_day = 24.0 / dt
        days = -(-args.steps // int(round(per_day)))
        series = synth_traffic(days, dt, args.noise_std, seed).slice(0, args.steps)
        comments.update({"dt": dt, "noise_std": args.noise_std, "steps": args.steps})
        states = None
    else:
        dt = args.dt or 0.1
        rng = np.random.default_rng(seed)
        x0 = args.x0 if args.x0 is not None else list(np.ones(3) + rng.uniform(-0.5, 0.5, size=3))
        if len(x0) != 3:
            raise FormatError("--x0 needs three comma-separated values")
        if args.system == "lorenz":
            params = LorenzParams()
            traj = integrate_lorenz(params, x0, dt, args.steps, args.substeps, args.transient)
            comments["params"] = {"sigma": params.sigma, "rho": params.rho, "beta": params.beta_l}
        else:
            params = RosslerParams(first_equation=args.rossler_form)
            traj = integrate_rossler(params, x0, dt, args.steps, args.substeps, args.transient)
            comments["params"] = {"a": params.a, "b": params.b, "c": params.c, "first_equation": params.first_equation}
        comments.update({
            "observe": args.observe, "dt": dt, "steps": args.steps, "substeps": args.substeps,
            "transient": args.transient, "x0": [float(v) for v in x0],
        })
        series = observe(traj, args.observe, label=f"{args.system}_{args.observe}")
        states = traj.states
    persistence.write_series_csv(args.output, series, comments)
    if args.full_state is not None:
        if states is None:
            raise FormatError("--full-state only applies to lorenz and rossler")
        t = np.arange(states.shape[0]) * series.dt
        cols = {"t": t, "x": states[:, 0], "y": states[:, 1], "z": states[:, 2]}
        persistence.write_text(args.full_state, persistence.format_series_csv(cols, comments))
    print(json.dumps({"output": str(args.output), "samples": len(series), "dt": series.dt, "seed": seed}))
    return EXIT_OK


def cmd_train(args) -> int:
    series = persistence.ingest_csv(args.input)
    config = esn_config(args, args.profile or "custom").replace(seed=_seed(args))
    model = train(series, config)
    persistence.save_model(model, args.output)
    meta = model.train_meta
    print(json.dumps({
        "model": str(args.output),
        "training_nrmse": meta["training_nrmse"],
        "train_length": meta["train_length"],
        "embedding_dimension": meta["embedding_dimension"],
        "seed": meta["seed"],
    }, sort_keys=True))
    return EXIT_OK


def cmd_predict(args) -> int:
    model = persistence.load_model(args.model)
    forecast = free_run(model, args.horizon)
    columns = {"t": forecast.times, "prediction": forecast.predictions}
    report = None
    if args.truth is not None:
        truth = persistence.ingest_csv(args.truth).samples
        start = forecast.start_index
        segment = truth[start : start + args.horizon]
        if segment.size < args.horizon:
            raise InsufficientDataError(
                f"truth has {truth.size} samples; forecast covers indices {start}..{start + args.horizon - 1}"
            )
        columns["truth"] = segment
        if args.horizon:
            report = evaluate(segment, forecast.predictions, args.eps)
    comments = {"model": str(args.model), "horizon": args.horizon, "start_index": forecast.start_index, "dt": forecast.dt}
    persistence.write_text(args.output, persistence.format_series_csv(columns, comments))
    if report is not None:
        print(json.dumps(report.to_dict(), sort_keys=True))
    return EXIT_OK


def cmd_evaluate(args) -> int:
    truth = persistence.ingest_csv(args.truth).samples
    meta, header, rows = persistence.read_csv_table(args.forecast)
    if "prediction" not in header:
        raise FormatError(f"{args.forecast} has no 'prediction' column")
    col = header.index("prediction")
    try:
        pred = np.array([float(cells[col]) for _, cells in rows])
    except (ValueError, IndexError):
        raise FormatError(f"{args.forecast}: unreadable prediction column") from None
    start = args.start_index if args.start_index is not None else int(meta.get("start_index", 0))
    segment = truth[start : start + pred.size]
    if segment.size < pred.size:
        raise InsufficientDataError("truth series is shorter than the forecast window")
    report = evaluate(segment, pred, args.eps)
    text = json.dumps(report.to_dict(), sort_keys=True)
    if args.output is not None:
        persistence.write_text(args.output, text + "\n")
    print(text)
    return EXIT_OK


def cmd_ablate(args) -> int:
    profile_name = args.profile or SYSTEM_PROFILES[args.system]
    config = esn_config(args, profile_name)
    csv_series: TimeSeries | None = None
    if args.system == "csv_input":
        if args.input is None:
            raise FormatError("--system csv_input needs -i/--input")
        csv_series = persistence.ingest_csv(args.input)
    elif args.input is not None:
        raise FormatError("-i/--input only applies to --system csv_input")
    spec = AblationSpec(
        system=args.system,
        m_grid=tuple(args.m_grid),
        trials=args.trials,
        horizon=args.horizon or HORIZONS[profile_name],
        base_config=config,
        base_seed=_seed(args),
        fix_data=args.fix_data or args.system == "csv_input",
        rossler_form=args.rossler_form,
        noise_std=args.noise_std,
        csv_series=csv_series,
        csv_path=str(args.input) if args.input else None,
    )
    report = run_ablation(spec, jobs=args.jobs)
    prefix = str(args.output)
    persistence.write_text(prefix + ".json", persistence.dumps_json(report.to_dict()))
    persistence.write_text(prefix + ".csv", report.to_csv())
    print(report.table())
    print(f"records: {len(report.records)}  failures: {report.failures}  -> {prefix}.json, {prefix}.csv")
    return EXIT_OK


COMMANDS = {
    "gen-data": cmd_gen_data,
    "train": cmd_train,
    "predict": cmd_predict,
    "evaluate": cmd_evaluate,
    "ablate": cmd_ablate,
}


def main(argv=None) -> int:
    args = parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR, format="%(levelname)s %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (FormatError, InsufficientDataError, DegenerateSeriesError, ZeroReferenceError, OSError) as exc:
        print(f"delay-esn: error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (SingularSystemError, IntegrationError, GenerationError, AblationError, ArithmeticError) as exc:
        print(f"delay-esn: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (DelayEsnError, ValueError) as exc:
        print(f"delay-esn: error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
