"""Command-line front end: simulate, fit-ols, train, predict, evaluate,
cycle-life.

Every run writes a manifest JSON next to its outputs with the fully
resolved configuration, so any result can be reproduced from the manifest
alone. Exit codes: 0 success, 1 usage or validation error, 2 numeric
failure (rank deficiency, divergence).
"""
from __future__ import annotations

import argparse
import json
import sys
import warnings
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

from . import __version__, metrics, mlp, regress, simulate
from .dataset import (
    CyclingDataset,
    fit_normalization,
    read_csv,
    split_even_odd,
    target_value,
    write_csv,
)
from .errors import (
    DivergenceError,
    LeocellError,
    ModelFileError,
    RankDeficiencyError,
    ValidationError,
)
from .kvconfig import read_kv

_TARGET_UNITS = {"rc": "%", "eodv": "V"}
_DEFAULT_ERROR_TARGET = {"rc": 0.7, "eodv": 0.2}


# ---------------------------------------------------------------- plumbing

class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; this artifact reserves 2 for
    numeric failures, so usage errors exit 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


@dataclass
class RunManifest:
    subcommand: str
    tool_version: str
    timestamp: str
    seed: int | None
    config: dict
    inputs: dict
    outputs: dict

    def to_dict(self) -> dict:
        return {
            "subcommand": self.subcommand,
            "tool_version": self.tool_version,
            "timestamp": self.timestamp,
            "seed": self.seed,
            "config": self.config,
            "inputs": self.inputs,
            "outputs": self.outputs,
        }


def _write_manifest(out_dir: Path, subcommand: str, seed: int | None,
                    config: dict, inputs: dict, outputs: dict) -> Path:
    manifest = RunManifest(
        subcommand=subcommand,
        tool_version=__version__,
        timestamp=datetime.now(timezone.utc).isoformat(),
        seed=seed,
        config=config,
        inputs=inputs,
        outputs=outputs,
    )
    path = out_dir / f"{subcommand.replace('-', '_')}_manifest.json"
    path.write_text(json.dumps(manifest.to_dict(), indent=2, sort_keys=True) + "\n")
    return path


class _Run:
    """Resolved common options plus config-file fallback for the rest.

    Precedence: explicit flag > config file key > built-in default.
    """

    def __init__(self, args):
        self.args = args
        self.config = read_kv(args.config) if args.config is not None else {}
        self.used: dict = {}
        out = self.pick("out", str, ".")
        self.out_dir = Path(out)
        self.quiet = self.pick("quiet", _parse_bool, False)
        self.seed = self.pick("seed", int, 0)

    def pick(self, key: str, cast, default):
        value = getattr(self.args, key, None)
        if value is None and key in self.config:
            try:
                value = cast(self.config[key])
            except (ValueError, TypeError) as e:
                raise ValidationError(f"config key {key!r}: {e}") from e
        if value is None:
            value = default
        self.used[key] = value
        return value

    def ensure_out(self) -> Path:
        self.out_dir.mkdir(parents=True, exist_ok=True)
        return self.out_dir

    def say(self, message: str) -> None:
        if not self.quiet:
            print(message)


def _parse_bool(text: str) -> bool:
    value = text.strip().lower()
    if value in ("true", "1", "yes", "on"):
        return True
    if value in ("false", "0", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _parse_setting(text: str) -> tuple[float, float]:
    parts = text.split(":")
    if len(parts) != 2:
        raise ValidationError(
            f"setting must look like TEMPERATURE:DOD, for example 10:20, got {text!r}")
    try:
        return float(parts[0]), float(parts[1])
    except ValueError:
        raise ValidationError(f"setting {text!r} has non-numeric parts") from None


def _parse_settings_list(text: str) -> tuple[tuple[float, float], ...]:
    return tuple(_parse_setting(part) for part in text.split(",") if part.strip())


def _detect_model_kind(path) -> str:
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise ModelFileError(f"cannot read {path}: {e}") from e
    for line in text.splitlines():
        if "=" in line:
            key, _, value = line.partition("=")
            if key.strip() == "kind":
                return value.strip()
    raise ModelFileError(f"{path}: no 'kind' header key, not a model file")


def _load_any_model(path):
    kind = _detect_model_kind(path)
    if kind == "linear":
        return kind, regress.load_linear_model(path)
    if kind == "mlp":
        return kind, mlp.load_model(path)
    raise ModelFileError(f"{path}: unknown model kind {kind!r}")


def _model_ranges(kind, model) -> dict[str, tuple[float, float]] | None:
    if kind == "mlp":
        spec = model.normalization
        return {
            "temperature_c": (spec.temperature_min, spec.temperature_max),
            "dod_pct": (spec.dod_min, spec.dod_max),
            "cycle": (spec.cycle_min, spec.cycle_max),
        }
    if model.train_ranges is None:
        return None
    return {
        "temperature_c": model.train_ranges["temperature"],
        "dod_pct": model.train_ranges["dod"],
        "cycle": model.train_ranges["cycle"],
    }


def _check_in_range(kind, model, t, dod, cycle, allow: bool) -> None:
    ranges = _model_ranges(kind, model)
    if ranges is None or allow:
        return
    query = {"temperature_c": t, "dod_pct": dod, "cycle": cycle}
    violations = []
    for name, value in query.items():
        mn, mx = ranges[name]
        if value < mn or value > mx:
            violations.append(f"{name}={value!r} not in [{mn!r}, {mx!r}]")
    if violations:
        raise ValidationError(
            "query outside the model's fitted range: " + "; ".join(violations)
            + " (pass --allow-extrapolation to predict anyway)")


def _model_predict(kind, model, t: float, dod: float, cycle: float) -> float:
    if kind == "linear":
        return regress.predict_linear(model, t, dod, cycle)
    return mlp.forward(model, t, dod, cycle)[0]


def _write_rows(path: Path, header: str, rows) -> None:
    lines = [header]
    for row in rows:
        lines.append(",".join(repr(v) if isinstance(v, float) else str(v) for v in row))
    path.write_text("\n".join(lines) + "\n", newline="\n")


# ------------------------------------------------------------- subcommands

def cmd_simulate(args) -> int:
    run = _Run(args)
    if args.default_grid and args.setting:
        raise ValidationError("--default-grid and --setting are mutually exclusive")
    if args.noise is not None and (args.noise_rc is not None or args.noise_eodv is not None):
        raise ValidationError("--noise is mutually exclusive with --noise-rc/--noise-eodv")

    if args.setting:
        settings = tuple(_parse_setting(s) for s in args.setting)
    elif "settings" in run.config and not args.default_grid:
        settings = _parse_settings_list(run.config["settings"])
    else:
        settings = simulate.DEFAULT_SETTINGS
    run.used["settings"] = [list(s) for s in settings]

    noise_all = run.pick("noise", float, None)
    if noise_all is not None:
        noise_rc = noise_eodv = noise_all
        run.used["noise_rc"] = noise_rc
        run.used["noise_eodv"] = noise_eodv
    else:
        noise_rc = run.pick("noise_rc", float, 0.0)
        noise_eodv = run.pick("noise_eodv", float, 0.0)

    plan = simulate.SimulationPlan(
        settings=settings,
        cycle_start=run.pick("cycle_start", int, 0),
        cycle_end=run.pick("cycle_end", int, 25000),
        cycle_step=run.pick("cycle_step", int, 1000),
        noise_sd_rc=noise_rc,
        noise_sd_eodv=noise_eodv,
        seed=run.seed,
        rc_knee_cycle=run.pick("knee_cycle", int, None),
        rc_knee_multiplier=run.pick("knee_multiplier", float, 1.0),
    )
    dataset = simulate.generate(plan)
    out = run.ensure_out()
    csv_path = out / "dataset.csv"
    write_csv(dataset, csv_path)
    manifest = _write_manifest(out, "simulate", run.seed, run.used,
                               inputs={}, outputs={"dataset": str(csv_path)})
    run.say(f"wrote {len(dataset)} records to {csv_path}")
    run.say(f"manifest: {manifest}")
    return 0


def cmd_fit_ols(args) -> int:
    run = _Run(args)
    target = args.target
    dataset = read_csv(args.dataset)
    model = regress.fit_ols(dataset, target)
    out = run.ensure_out()
    model_path = out / f"{target}_linear_model.txt"
    regress.save_linear_model(model, model_path)
    run.used.update({"target": target})
    manifest = _write_manifest(out, "fit-ols", run.seed, run.used,
                               inputs={"dataset": str(args.dataset)},
                               outputs={"model": str(model_path)})
    stats = model.residual_stats
    run.say(regress.format_equation(model))
    run.say(f"n = {stats.n}, rmse = {stats.rmse:.6g}, "
            f"max |residual| = {stats.max_abs_residual:.6g}")
    run.say(f"model file: {model_path}")
    run.say(f"manifest: {manifest}")
    return 0


def cmd_train(args) -> int:
    run = _Run(args)
    target = args.target
    dataset = read_csv(args.dataset)
    error_target = run.pick("error_target", float, _DEFAULT_ERROR_TARGET[target])
    config = mlp.TrainingConfig(
        error_target_pct=error_target,
        learning_rate=run.pick("learning_rate", float, mlp.DEFAULT_LEARNING_RATE),
        momentum=run.pick("momentum", float, 0.0),
        max_epochs=run.pick("max_epochs", int, 200000),
        seed=run.seed,
        shuffle_each_epoch=run.pick("shuffle", _parse_bool, False),
        eval_every=run.pick("eval_every", int, 100),
    )
    run.used.update({"target": target, "resume": args.resume})

    if args.resume is not None:
        model, report = mlp.resume_train(args.resume, dataset, config)
        run.used["topology"] = ",".join(str(s) for s in model.topology.layer_sizes)
    else:
        topology_text = run.pick("topology", str, "3,9,9,1")
        try:
            sizes = tuple(int(s) for s in topology_text.split(","))
        except ValueError:
            raise ValidationError(
                f"topology must be comma-separated integers, got {topology_text!r}") from None
        topology = mlp.NetworkTopology(layer_sizes=sizes)
        normalization = fit_normalization(dataset, target)
        model = mlp.init_network(topology, run.seed, target, normalization,
                                 learning_rate=config.learning_rate)
        model, report = mlp.train(model, dataset, config)

    out = run.ensure_out()
    model_path = out / f"{target}_mlp_model.txt"
    mlp.save_model(model, model_path)
    report_path = out / "training_report.json"
    report_path.write_text(json.dumps({
        "epochs_run": report.epochs_run,
        "final_train_mape_pct": report.final_train_mape_pct,
        "converged": report.converged,
        "epochs_trained_total": model.epochs_trained,
        "error_history": [[epoch, mape] for epoch, mape in report.error_history],
    }, indent=2) + "\n")
    manifest = _write_manifest(out, "train", run.seed, run.used,
                               inputs={"dataset": str(args.dataset)},
                               outputs={"model": str(model_path),
                                        "report": str(report_path)})
    status = "converged" if report.converged else "did NOT converge"
    run.say(f"{status} after {report.epochs_run} epochs, "
            f"final error {report.final_train_mape_pct:.4g}% "
            f"(target {config.error_target_pct:g}%)")
    run.say(f"model file: {model_path}")
    run.say(f"report: {report_path}")
    run.say(f"manifest: {manifest}")
    return 0


def _sweep_settings(args, run) -> tuple[tuple[float, float], ...]:
    if args.setting:
        return tuple(_parse_setting(s) for s in args.setting)
    if "settings" in run.config:
        return _parse_settings_list(run.config["settings"])
    return simulate.DEFAULT_SETTINGS


def cmd_predict(args) -> int:
    run = _Run(args)
    if (args.at is None) == (not args.sweep):
        raise ValidationError("exactly one of --at or --sweep is required")
    kind, model = _load_any_model(args.model)
    allow = bool(args.allow_extrapolation)
    run.used.update({"model_kind": kind, "allow_extrapolation": allow})
    units = _TARGET_UNITS[model.target]

    if args.at is not None:
        parts = args.at.split(",")
        if len(parts) != 3:
            raise ValidationError(
                f"--at expects TEMPERATURE,DOD,CYCLE, got {args.at!r}")
        try:
            t, dod = float(parts[0]), float(parts[1])
            cycle = float(parts[2])
        except ValueError:
            raise ValidationError(f"--at {args.at!r} has non-numeric parts") from None
        _check_in_range(kind, model, t, dod, cycle, allow)
        value = _model_predict(kind, model, t, dod, cycle)
        run.used["at"] = [t, dod, cycle]
        out = run.ensure_out()
        manifest = _write_manifest(out, "predict", run.seed, run.used,
                                   inputs={"model": str(args.model)},
                                   outputs={})
        run.say(f"{model.target} at temperature_c={t:g}, dod_pct={dod:g}, "
                f"cycle={cycle:g}: {value!r} {units}")
        run.say(f"manifest: {manifest}")
        return 0

    # sweep mode: per-setting curves over a cycle progression
    settings = _sweep_settings(args, run)
    start = run.pick("cycle_start", int, 0)
    end = run.pick("cycle_end", int, 25000)
    step = run.pick("cycle_step", int, 1000)
    if step <= 0:
        raise ValidationError(f"cycle_step must be > 0, got {step}")
    if end < start:
        raise ValidationError("cycle_end must be >= cycle_start")
    run.used["settings"] = [list(s) for s in settings]
    cycles = range(start, end + 1, step)
    for t, dod in settings:
        _check_in_range(kind, model, t, dod, float(start), allow)
        _check_in_range(kind, model, t, dod, float(end), allow)
    out = run.ensure_out()
    combined = []
    outputs = {}
    for t, dod in sorted(settings):
        rows = []
        for cycle in cycles:
            value = _model_predict(kind, model, t, dod, float(cycle))
            rows.append((cycle, value))
            combined.append((t, dod, cycle, value))
        path = out / f"sweep_t{t:g}_dod{dod:g}.csv"
        _write_rows(path, "cycle,prediction", rows)
        outputs[f"setting {t:g}:{dod:g}"] = str(path)
    combined_path = out / "sweep.csv"
    _write_rows(combined_path, "temperature_c,dod_pct,cycle,prediction", combined)
    outputs["combined"] = str(combined_path)
    manifest = _write_manifest(out, "predict", run.seed, run.used,
                               inputs={"model": str(args.model)}, outputs=outputs)
    run.say(f"wrote {len(settings)} per-setting sweep files and {combined_path}")
    run.say(f"manifest: {manifest}")
    return 0


def cmd_evaluate(args) -> int:
    run = _Run(args)
    kind, model = _load_any_model(args.model)
    dataset = read_csv(args.dataset)
    split = run.pick("split", str, "none")
    if split not in ("none", "even-odd"):
        raise ValidationError(f"--split must be none or even-odd, got {split!r}")
    ba_mode_flag = run.pick("ba_mode", str, "absolute")
    if ba_mode_flag not in ("absolute", "percent"):
        raise ValidationError(f"--ba-mode must be absolute or percent, got {ba_mode_flag!r}")
    ba_mode = metrics.BA_ABSOLUTE if ba_mode_flag == "absolute" else metrics.BA_PERCENT

    if split == "even-odd":
        # assess interpolation: the model was (presumably) fitted on the
        # even-rank half; score it on the odd-rank half only
        _, evaluation = split_even_odd(dataset)
    else:
        evaluation = dataset

    pairs = []
    for i, r in enumerate(evaluation.records):
        observed = target_value(r, model.target)
        if observed is None:
            raise ValidationError(
                f"record {i} has no {model.target} value; cannot evaluate")
        predicted = _model_predict(kind, model, r.temperature_c, r.dod_pct,
                                   float(r.cycle))
        pairs.append((observed, predicted))
    series = metrics.PairedSeries(tuple(pairs), label=model.target,
                                  units=_TARGET_UNITS[model.target])
    report = metrics.comparison_report(series, ba_mode)

    out = run.ensure_out()
    report_path = out / "report.json"
    report_path.write_text(json.dumps(metrics.report_to_dict(report), indent=2) + "\n")
    one_path = out / "one_to_one.csv"
    _write_rows(one_path, "observed,predicted,role", metrics.one_to_one_export(series))
    outputs = {"report": str(report_path), "one_to_one": str(one_path)}
    if report.bland_altman is not None:
        ba_path = out / "bland_altman.csv"
        # difference = predicted - observed (positive bias = over-prediction)
        _write_rows(ba_path, "mean,difference", report.bland_altman.points)
        outputs["bland_altman"] = str(ba_path)
    run.used.update({"model_kind": kind})
    manifest = _write_manifest(out, "evaluate", run.seed, run.used,
                               inputs={"model": str(args.model),
                                       "dataset": str(args.dataset)},
                               outputs=outputs)

    def fmt(value):
        return "unavailable" if value is None else f"{value:.6g}"

    run.say(f"n = {report.n} ({model.target}, {report.units})")
    run.say(f"AAPE = {fmt(report.aape_pct)} %")
    run.say(f"pearson r = {fmt(report.pearson_r)}, r^2 = {fmt(report.r_squared)}")
    run.say(f"CV = {fmt(report.cv)}")
    if report.bland_altman is not None:
        ba = report.bland_altman
        run.say(f"Bland-Altman ({ba.mode}): bias = {ba.bias:.6g}, "
                f"limits of agreement [{ba.loa_low:.6g}, {ba.loa_high:.6g}]")
    for field, reason in report.unavailable.items():
        run.say(f"note: {field} unavailable: {reason}")
    run.say(f"manifest: {manifest}")
    return 0


def cmd_cycle_life(args) -> int:
    run = _Run(args)
    t = args.temperature
    dod = args.dod
    rc_floor = run.pick("rc_floor", float, simulate.DEFAULT_RC_FLOOR)
    eodv_floor = run.pick("eodv_floor", float, simulate.DEFAULT_EODV_FLOOR)
    max_cycle = run.pick("max_cycle", int, 100000)
    use_mlp = args.rc_model is not None or args.eodv_model is not None
    if use_mlp and args.params is not None:
        raise ValidationError("--params is mutually exclusive with --rc-model/--eodv-model")
    run.used.update({"temperature": t, "dod": dod, "params": args.params,
                     "rc_model": args.rc_model, "eodv_model": args.eodv_model})

    criterion_names = {"rc": f"retained capacity floor {rc_floor:g} %",
                       "eodv": f"voltage floor {eodv_floor:g} V"}
    inputs = {}
    if use_mlp:
        # scan every cycle with network forward passes (slower than the
        # closed form available for affine parameters)
        models = {}
        if args.rc_model is not None:
            kind, model = _load_any_model(args.rc_model)
            if kind != "mlp" or model.target != "rc":
                raise ValidationError(f"--rc-model must be a network model with target rc")
            models["rc"] = (model, rc_floor)
            inputs["rc_model"] = str(args.rc_model)
        if args.eodv_model is not None:
            kind, model = _load_any_model(args.eodv_model)
            if kind != "mlp" or model.target != "eodv":
                raise ValidationError(f"--eodv-model must be a network model with target eodv")
            models["eodv"] = (model, eodv_floor)
            inputs["eodv_model"] = str(args.eodv_model)
        result = simulate.CycleLifeResult(None, None)
        for cycle in range(0, max_cycle + 1):
            for name in ("rc", "eodv"):
                if name in models:
                    model, floor = models[name]
                    if mlp.forward(model, t, dod, float(cycle))[0] < floor:
                        result = simulate.CycleLifeResult(cycle, name)
                        break
            if result.cycle is not None:
                break
    else:
        params = simulate.DEFAULT_PARAMS
        if args.params is not None:
            params = simulate.params_from_kv(read_kv(args.params))
            inputs["params"] = str(args.params)
        result = simulate.cycle_life(params, t, dod, rc_floor, eodv_floor, max_cycle)

    out = run.ensure_out()
    manifest = _write_manifest(out, "cycle-life", run.seed, run.used,
                               inputs=inputs, outputs={})
    if result.cycle is None:
        run.say(f"no failure within {max_cycle} cycles")
    else:
        run.say(f"failure at cycle {result.cycle} ({criterion_names[result.criterion]})")
    run.say(f"manifest: {manifest}")
    return 0


# ------------------------------------------------------------------ parser

def _add_common(parser: _Parser) -> None:
    parser.add_argument("--config", help="key = value file supplying defaults for flags")
    parser.add_argument("--seed", type=int, help="deterministic seed (default 0)")
    parser.add_argument("--out", help="output directory (default current directory)")
    parser.add_argument("--quiet", action="store_true", default=None,
                        help="suppress normal output")


def build_parser() -> _Parser:
    parser = _Parser(prog="leocell",
                     description="Cell degradation modeling over charge-discharge cycles")
    parser.add_argument("--version", action="version", version=f"leocell {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    p = sub.add_parser("simulate", help="generate a synthetic cycling dataset")
    _add_common(p)
    p.add_argument("--default-grid", action="store_true",
                   help="use the six standard (temperature, DOD) settings")
    p.add_argument("--setting", action="append", metavar="T:DOD",
                   help="add one setting, repeatable (default: the standard grid)")
    p.add_argument("--cycle-start", type=int)
    p.add_argument("--cycle-end", type=int)
    p.add_argument("--cycle-step", type=int)
    p.add_argument("--noise", type=float, help="Gaussian noise sd for both outputs")
    p.add_argument("--noise-rc", type=float, help="Gaussian noise sd, capacity (%%)")
    p.add_argument("--noise-eodv", type=float, help="Gaussian noise sd, voltage (V)")
    p.add_argument("--knee-cycle", type=int, dest="knee_cycle",
                   help="piecewise capacity fade: knee cycle")
    p.add_argument("--knee-multiplier", type=float, dest="knee_multiplier",
                   help="piecewise capacity fade: pre-knee slope multiplier")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("fit-ols", help="fit the affine model by least squares")
    _add_common(p)
    p.add_argument("dataset", help="dataset CSV path")
    p.add_argument("--target", required=True, choices=("rc", "eodv"))
    p.set_defaults(func=cmd_fit_ols)

    p = sub.add_parser("train", help="train a network to an error target")
    _add_common(p)
    p.add_argument("dataset", help="dataset CSV path")
    p.add_argument("--target", required=True, choices=("rc", "eodv"))
    p.add_argument("--topology", help="comma-separated layer sizes (default 3,9,9,1)")
    p.add_argument("--learning-rate", type=float, dest="learning_rate")
    p.add_argument("--momentum", type=float)
    p.add_argument("--error-target", type=float, dest="error_target",
                   help="stop at this dataset error in %% (default 0.7 rc, 0.2 eodv)")
    p.add_argument("--max-epochs", type=int, dest="max_epochs")
    p.add_argument("--eval-every", type=int, dest="eval_every")
    p.add_argument("--shuffle", action="store_true", default=None,
                   dest="shuffle", help="reshuffle pattern order every epoch")
    p.add_argument("--resume", help="continue training from this model file")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="query a saved model")
    _add_common(p)
    p.add_argument("model", help="model file (kind auto-detected)")
    p.add_argument("--at", metavar="T,DOD,CYCLE", help="single query point")
    p.add_argument("--sweep", action="store_true",
                   help="cycle sweep per setting, written as CSV curves")
    p.add_argument("--setting", action="append", metavar="T:DOD",
                   help="sweep setting, repeatable (default: the standard grid)")
    p.add_argument("--cycle-start", type=int)
    p.add_argument("--cycle-end", type=int)
    p.add_argument("--cycle-step", type=int)
    p.add_argument("--allow-extrapolation", action="store_true",
                   help="permit queries outside the model's fitted range")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("evaluate", help="score a model against a dataset")
    _add_common(p)
    p.add_argument("model", help="model file (kind auto-detected)")
    p.add_argument("dataset", help="dataset CSV path")
    p.add_argument("--split", choices=("none", "even-odd"),
                   help="even-odd: score on the odd-rank half only")
    p.add_argument("--ba-mode", choices=("absolute", "percent"), dest="ba_mode",
                   help="Bland-Altman difference mode (default absolute)")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("cycle-life", help="first cycle crossing a failure floor")
    _add_common(p)
    p.add_argument("--params", help="affine model parameter file (default: built-in)")
    p.add_argument("--rc-model", dest="rc_model", help="network model file, capacity")
    p.add_argument("--eodv-model", dest="eodv_model", help="network model file, voltage")
    p.add_argument("--temperature", type=float, required=True)
    p.add_argument("--dod", type=float, required=True)
    p.add_argument("--rc-floor", type=float, dest="rc_floor")
    p.add_argument("--eodv-floor", type=float, dest="eodv_floor")
    p.add_argument("--max-cycle", type=int, dest="max_cycle")
    p.set_defaults(func=cmd_cycle_life)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return args.func(args)
    except (RankDeficiencyError, DivergenceError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except LeocellError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
