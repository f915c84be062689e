"""Command-line harness: run, robustness, fsweep, theory, classify.

Configs are flat INI files (one key=value section per concern). Unknown keys
are rejected, every default is filled in, and the fully-resolved config is
echoed into the output directory, so a run directory is self-describing.
Outputs are CSV (UTF-8, LF, fixed column order) with shortest round-trip
float formatting; reruns are byte-identical.
"""

from __future__ import annotations

import argparse
import configparser
import json
import math
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .noise import NOISE_KINDS, NoiseSpec
from .problems import make_problem
from .runner import (
    FSWEEP_DEFAULTS,
    GREEDY_GRID_DEFAULTS,
    GridSpec,
    NOISE_PRESETS,
    PROBLEM_PRESETS,
    RunConfig,
    build_problem,
    build_scheduler_cfg,
    classify,
    f_sweep,
    optimal_factor_sweep,
    optimal_factor_value,
    run_grid,
    run_one,
    summarize,
    theorem1_check,
)
from .schedulers import GreedyConfig


class ConfigError(Exception):
    """Config problem; the message names the offending section/field."""


# Schema: section -> key -> (coercion, default). A default of REQUIRED means
# the key must be supplied (possibly via another rule, e.g. a problem preset).
REQUIRED = object()


def _bool(s: str) -> bool:
    v = s.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {s!r}")


def _csv_floats(s: str) -> tuple[float, ...]:
    return tuple(float(tok) for tok in s.split(",") if tok.strip())


def _csv_strs(s: str) -> tuple[str, ...]:
    return tuple(tok.strip() for tok in s.split(",") if tok.strip())


def _opt_int(s: str):
    return None if not s.strip() else int(s)


SCHEMA = {
    "run": {
        "total_steps": (int, 200),
        "seed": (int, 0),
        "optimizer": (str, "sgd"),
        "record_iterates": (_bool, False),
        "scheduler_variant": (str, "detailed"),
    },
    "problem": {
        "preset": (str, ""),
        "kind": (str, ""),
        "dimension": (int, 8),
        "n_components": (int, 8),
        "condition_number": (float, 10.0),
        "seed": (int, 0),
        "l_max": (float, 10.0),
        "b_scale": (float, 1.0),
        "margin_noise": (float, 0.5),
        "width": (_opt_int, None),
        "target_noise": (float, 0.05),
        "init_scale": (float, 1.0),
    },
    "scheduler": {
        "kind": (str, "greedy"),
        "initial_lr": (float, REQUIRED),
        "min_lr": (float, None),
        "max_lr": (float, None),
        "factor": (float, 0.95),
        "patience": (int, 10),
        "threshold": (float, 0.0),
        "cooldown": (int, 0),
        "warmup": (int, 0),
        "eps": (float, 1e-8),
        "smoothing": (_bool, True),
        "window_size": (int, 50),
        "reset_start": (int, 10_000),
        "mode": (str, "min"),
        "warmup_steps": (_opt_int, None),
        "restart_period": (_opt_int, None),
        "decay_rate": (float, None),
        "power": (float, 2.0),
    },
    "noise": {
        "kind": (str, "none"),
        "strength": (float, 0.0),
        "period": (_opt_int, None),
        "spike_prob": (float, 0.02),
    },
    "grid": {
        "schedulers": (_csv_strs, ("greedy", "cosine", "cosine_restarts", "exponential")),
        "problems": (_csv_strs, tuple(PROBLEM_PRESETS)),
        "noises": (_csv_strs, tuple(NOISE_PRESETS)),
        "seeds": (int, 5),
        "total_steps": (int, 200),
        "optimizer": (str, "sgd"),
    },
    "fsweep": {
        "f_values": (_csv_floats, FSWEEP_DEFAULTS["f_values"]),
        "seeds": (int, len(FSWEEP_DEFAULTS["seeds"])),
        "total_steps": (int, FSWEEP_DEFAULTS["total_steps"]),
        "problem": (str, FSWEEP_DEFAULTS["problem"]),
        "initial_lr": (float, FSWEEP_DEFAULTS["initial_lr"]),
        "min_lr": (float, FSWEEP_DEFAULTS["min_lr"]),
        "max_lr": (float, FSWEEP_DEFAULTS["max_lr"]),
        "patience": (int, FSWEEP_DEFAULTS["patience"]),
        "threshold": (float, FSWEEP_DEFAULTS["threshold"]),
        "warmup": (int, FSWEEP_DEFAULTS["warmup"]),
        "smoothing": (_bool, FSWEEP_DEFAULTS["smoothing_enabled"]),
        "window_size": (int, FSWEEP_DEFAULTS["window_size"]),
        "reset_start": (int, FSWEEP_DEFAULTS["reset_start"]),
        "variant": (str, "detailed"),
        "noise": (str, "none"),
    },
    "theory": {
        "dimension": (int, 8),
        "l_max": (float, 2.0),
        "condition_number": (float, 10.0),
        "n_components": (int, 8),
        "b_scale": (float, 1.0),
        "problem_seed": (int, 7),
        "t_ladder": (_csv_floats, (100.0, 1000.0, 10000.0)),
        "seeds": (int, 20),
        "min_lr": (float, 0.05),
        "max_lr": (float, 0.5),
        "initial_lr": (float, None),
        "factor": (float, 0.5),
        "f_values": (_csv_floats, (0.1, 0.3, 0.5, 0.7, 0.9, 0.99)),
        "f_seeds": (int, 10),
        "f_total_steps": (int, 150),
        "f_min_lr": (float, 1e-3),
        "f_max_lr": (float, 0.3),
        "f_initial_lr": (float, 1e-3),
    },
    "classify": {
        "greedy_results": (str, REQUIRED),
        "baseline_results": (str, REQUIRED),
        "greedy_scheduler": (str, ""),
        "baseline_scheduler": (str, ""),
        "cutoff": (float, 0.1),
        "relative": (_bool, False),
    },
    "output": {
        "format": (str, "csv"),
        "jobs": (int, 1),
    },
}


def load_config(path: str | Path, sections: list[str]) -> dict:
    """Parse and validate the INI config; fill defaults for `sections`."""
    parser = configparser.ConfigParser(interpolation=None)
    try:
        read = parser.read(path, encoding="utf-8")
    except configparser.Error as exc:
        raise ConfigError(f"config parse error in {path}: {exc}") from exc
    if not read:
        raise ConfigError(f"config file not found: {path}")

    for section in parser.sections():
        if section not in SCHEMA:
            raise ConfigError(f"unknown config section [{section}]")
        for key in parser[section]:
            if key not in SCHEMA[section]:
                raise ConfigError(f"unknown key {section}.{key}")

    resolved: dict[str, dict] = {}
    for section in sections:
        resolved[section] = {}
        for key, (coerce, default) in SCHEMA[section].items():
            if parser.has_option(section, key):
                raw = parser.get(section, key)
                try:
                    resolved[section][key] = coerce(raw)
                except (ValueError, TypeError) as exc:
                    raise ConfigError(f"bad value for {section}.{key}: {raw!r} ({exc})") from exc
            else:
                resolved[section][key] = default
    return resolved


# --- serialization -----------------------------------------------------------

def fmt(value) -> str:
    """Shortest round-trip text for a CSV cell."""
    if value is None or value is REQUIRED:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_table(path: Path, header: list[str], rows: list[list], fmt_kind: str = "csv") -> None:
    if fmt_kind == "json":
        records = [
            {h: (None if isinstance(v, float) and not math.isfinite(v) else v)
             for h, v in zip(header, row)}
            for row in rows
        ]
        path = path.with_suffix(".json")
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(json.dumps(records, indent=1) + "\n")
        return
    lines = [",".join(header)]
    lines.extend(",".join(fmt(v) for v in row) for row in rows)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def write_json(path: Path, obj) -> None:
    def clean(v):
        if isinstance(v, float) and not math.isfinite(v):
            return None
        if isinstance(v, dict):
            return {k: clean(x) for k, x in v.items()}
        if isinstance(v, (list, tuple)):
            return [clean(x) for x in v]
        return v

    path.write_text(json.dumps(clean(obj), indent=1) + "\n", encoding="utf-8", newline="\n")


def echo_config(out_dir: Path, resolved: dict) -> None:
    """Write the fully-resolved config (all defaults filled) next to results."""
    echo = configparser.ConfigParser(interpolation=None)
    for section, keys in resolved.items():
        echo[section] = {}
        for key, value in keys.items():
            if isinstance(value, tuple):
                echo[section][key] = ",".join(fmt(v) for v in value)
            else:
                echo[section][key] = fmt(value)
    with open(out_dir / "config_echo.ini", "w", encoding="utf-8", newline="\n") as fh:
        echo.write(fh)


def write_trace_csv(path: Path, trace, fmt_kind: str = "csv") -> None:
    rows = [
        [t, float(trace.true_loss[t]), float(trace.observed_loss[t]),
         float(trace.lr[t]), float(trace.grad_norm[t])]
        for t in range(len(trace))
    ]
    write_table(path, ["step", "true_loss", "observed_loss", "lr", "grad_norm"], rows, fmt_kind)


# --- resolution helpers ------------------------------------------------------

def _resolve_problem(cfg: dict):
    """Problem plus its suggested base LR from [problem]."""
    p = cfg["problem"]
    if p["preset"]:
        if p["preset"] not in PROBLEM_PRESETS:
            raise ConfigError(f"unknown problem.preset {p['preset']!r}")
        problem, base_lr = build_problem(p["preset"])
        return problem, base_lr
    if not p["kind"]:
        raise ConfigError("missing problem.kind (or problem.preset)")
    kwargs = dict(kind=p["kind"], dimension=p["dimension"], n_components=p["n_components"],
                  condition_number=p["condition_number"], seed=p["seed"])
    if p["kind"] == "quadratic_sum":
        kwargs.update(l_max=p["l_max"], b_scale=p["b_scale"], init_scale=p["init_scale"])
    elif p["kind"] == "logistic":
        kwargs.update(margin_noise=p["margin_noise"], init_scale=p["init_scale"])
        kwargs.pop("condition_number")
    elif p["kind"] == "mlp":
        kwargs.update(width=p["width"], target_noise=p["target_noise"],
                      init_scale=p["init_scale"])
        kwargs.pop("condition_number")
    elif p["kind"] == "rosenbrock":
        kwargs.update(init_scale=p["init_scale"])
        kwargs.pop("condition_number")
    else:
        raise ConfigError(f"unknown problem.kind {p['kind']!r}")
    try:
        return make_problem(**kwargs), None
    except ValueError as exc:
        raise ConfigError(f"invalid [problem]: {exc}") from exc


def _resolve_scheduler(cfg: dict, total_steps: int, base_lr):
    s = cfg["scheduler"]
    initial_lr = s["initial_lr"]
    if initial_lr is REQUIRED:
        if base_lr is None:
            raise ConfigError("missing scheduler.initial_lr")
        initial_lr = base_lr
        cfg["scheduler"]["initial_lr"] = base_lr
    overrides = dict(
        factor_F=s["factor"], patience=s["patience"], threshold=s["threshold"],
        cooldown=s["cooldown"], warmup=s["warmup"], eps=s["eps"],
        smoothing_enabled=s["smoothing"], window_size=s["window_size"],
        reset_start=s["reset_start"], mode=s["mode"],
    )
    if s["min_lr"] is not None:
        overrides["min_lr"] = s["min_lr"]
    if s["max_lr"] is not None:
        overrides["max_lr"] = s["max_lr"]
    kind = s["kind"]
    try:
        if kind in ("greedy", "greedy_simple"):
            return build_scheduler_cfg("greedy", initial_lr, total_steps, overrides)
        sched = build_scheduler_cfg(kind, initial_lr, total_steps, None)
        extra = {}
        if s["min_lr"] is not None:
            extra["min_lr"] = s["min_lr"]
        if s["warmup_steps"] is not None:
            extra["warmup_steps"] = s["warmup_steps"]
        if s["restart_period"] is not None:
            extra["restart_period"] = s["restart_period"]
        if s["decay_rate"] is not None:
            extra["decay_rate"] = s["decay_rate"]
        if kind == "polynomial":
            extra["power"] = s["power"]
        return replace(sched, **extra) if extra else sched
    except ValueError as exc:
        raise ConfigError(f"invalid [scheduler]: {exc}") from exc


def _resolve_noise(cfg: dict) -> NoiseSpec:
    n = cfg["noise"]
    if n["kind"] not in NOISE_KINDS:
        raise ConfigError(f"unknown noise.kind {n['kind']!r}")
    try:
        return NoiseSpec(kind=n["kind"], strength=n["strength"], period=n["period"],
                         spike_prob=n["spike_prob"])
    except ValueError as exc:
        raise ConfigError(f"invalid [noise]: {exc}") from exc


# --- subcommands -------------------------------------------------------------

def cmd_run(cfg: dict, out_dir: Path, fmt_kind: str, jobs: int, seed_override) -> int:
    problem, base_lr = _resolve_problem(cfg)
    run = cfg["run"]
    if seed_override is not None:
        run["seed"] = seed_override
    scheduler = _resolve_scheduler(cfg, run["total_steps"], base_lr)
    noise = _resolve_noise(cfg)
    variant = "simple" if cfg["scheduler"]["kind"] == "greedy_simple" else run["scheduler_variant"]
    rc = RunConfig(problem=problem, scheduler=scheduler, optimizer=run["optimizer"],
                   noise=noise, total_steps=run["total_steps"], seed=run["seed"],
                   record_iterates=run["record_iterates"], scheduler_variant=variant)
    trace = run_one(rc)
    summary = summarize(trace)
    echo_config(out_dir, cfg)
    write_trace_csv(out_dir / "trace.csv", trace, fmt_kind)
    write_json(out_dir / "summary.json", {
        "stage10": summary.stage_losses[0],
        "stage50": summary.stage_losses[1],
        "stage100": summary.stage_losses[2],
        "final_loss": summary.final_loss,
        "max_loss": summary.max_loss,
        "recovery_ratio": summary.recovery_ratio,
        "recovery_speed": summary.recovery_speed,
        "diverged": summary.diverged,
        "final_full_loss": trace.final_full_loss,
        "avg_iterate_full_loss": trace.avg_iterate_full_loss,
        "steps_recorded": len(trace),
    })
    return 0


RESULT_COLUMNS = ["run_id", "scheduler", "F", "problem", "noise", "seed",
                  "stage10", "stage50", "stage100", "final_loss", "max_loss",
                  "recovery_ratio", "recovery_speed", "diverged"]


def _result_row(row) -> list:
    s = row.summary
    return [row.run_id, row.scheduler, row.factor_F, row.problem, row.noise, row.seed,
            s.stage_losses[0], s.stage_losses[1], s.stage_losses[2], s.final_loss,
            s.max_loss, s.recovery_ratio, s.recovery_speed, s.diverged]


def cmd_robustness(cfg: dict, out_dir: Path, fmt_kind: str, jobs: int, seed_override) -> int:
    g = cfg["grid"]
    seeds = tuple(range(g["seeds"]))
    if seed_override is not None:
        seeds = tuple(seed_override + s for s in range(g["seeds"]))
    s = cfg["scheduler"]
    greedy_overrides = dict(
        factor_F=s["factor"], patience=s["patience"], threshold=s["threshold"],
        cooldown=s["cooldown"], warmup=s["warmup"], eps=s["eps"],
        smoothing_enabled=s["smoothing"], window_size=s["window_size"],
        reset_start=s["reset_start"], mode=s["mode"],
    )
    spec = GridSpec(schedulers=g["schedulers"], problems=g["problems"], noises=g["noises"],
                    seeds=seeds, total_steps=g["total_steps"], optimizer=g["optimizer"],
                    greedy_overrides=greedy_overrides)
    result = run_grid(spec, jobs=jobs)
    echo_config(out_dir, cfg)
    write_table(out_dir / "results.csv", RESULT_COLUMNS,
                [_result_row(r) for r in result.rows], fmt_kind)
    med_rows = [[s_, n, v] for (s_, n), v in sorted(result.median_table().items())]
    write_table(out_dir / "medians.csv", ["scheduler", "noise", "median_final_loss"],
                med_rows, fmt_kind)
    pct_rows = [[s_, *p] for s_, p in sorted(result.percentile_table().items())]
    write_table(out_dir / "percentiles.csv", ["scheduler", "p10", "p50", "p90"],
                pct_rows, fmt_kind)
    band_rows = []
    for s_, bands in sorted(result.lr_band_table().items()):
        for step in range(bands.shape[0]):
            band_rows.append([s_, step, *map(float, bands[step])])
    write_table(out_dir / "lr_bands.csv", ["scheduler", "step", "p10", "p50", "p90"],
                band_rows, fmt_kind)
    return 0


def cmd_fsweep(cfg: dict, out_dir: Path, fmt_kind: str, jobs: int, seed_override) -> int:
    f = cfg["fsweep"]
    problem, _ = build_problem(f["problem"]) if f["problem"] in PROBLEM_PRESETS else (None, None)
    if problem is None:
        raise ConfigError(f"unknown fsweep.problem {f['problem']!r}")
    base = GreedyConfig(
        initial_lr=f["initial_lr"], min_lr=f["min_lr"], max_lr=f["max_lr"],
        patience=f["patience"], threshold=f["threshold"], warmup=f["warmup"],
        smoothing_enabled=f["smoothing"], window_size=f["window_size"],
        reset_start=f["reset_start"], factor_F=0.5,
    )
    seeds = tuple(range(f["seeds"]))
    if seed_override is not None:
        seeds = tuple(seed_override + s for s in range(f["seeds"]))
    noise = NOISE_PRESETS.get(f["noise"])
    if noise is None:
        raise ConfigError(f"unknown fsweep.noise {f['noise']!r}")
    results = f_sweep(problem, f["f_values"], base, seeds=seeds,
                      total_steps=f["total_steps"], noise=noise, variant=f["variant"])
    echo_config(out_dir, cfg)
    write_table(out_dir / "fsweep.csv", ["F", "final_loss", "diverged"],
                [[r.factor_F, r.median_final_loss, r.diverged] for r in results], fmt_kind)
    for r in results:
        write_trace_csv(out_dir / f"trace_F{r.factor_F}.csv", r.first_seed_trace, fmt_kind)
    return 0


def cmd_theory(cfg: dict, out_dir: Path, fmt_kind: str, jobs: int, seed_override) -> int:
    t = cfg["theory"]
    problem = make_problem("quadratic_sum", t["dimension"], t["n_components"],
                           condition_number=t["condition_number"], seed=t["problem_seed"],
                           l_max=t["l_max"], b_scale=t["b_scale"])
    initial_lr = t["initial_lr"] if t["initial_lr"] is not None else t["max_lr"]
    base = GreedyConfig(initial_lr=initial_lr, min_lr=t["min_lr"], max_lr=t["max_lr"],
                        factor_F=t["factor"], patience=0, smoothing_enabled=False)
    seeds = tuple(range(t["seeds"]))
    rows = []
    for T in t["t_ladder"]:
        res = theorem1_check(problem, base, int(T), seeds=seeds)
        rows.append([int(T), res.lhs, res.rhs, res.holds])
    echo_config(out_dir, cfg)
    write_table(out_dir / "theorem1.csv", ["T", "lhs", "rhs", "holds"], rows, fmt_kind)

    f_values = list(t["f_values"])
    f_star = optimal_factor_value(problem.L_max) if problem.L_max > 1 else None
    if f_star is not None and not any(abs(f_star - F) < 1e-12 for F in f_values):
        f_values.append(f_star)
    sweep_cfg = GreedyConfig(initial_lr=t["f_initial_lr"], min_lr=t["f_min_lr"],
                             max_lr=t["f_max_lr"], factor_F=0.5, patience=0,
                             smoothing_enabled=False)
    sweep = optimal_factor_sweep(problem, sorted(f_values), sweep_cfg,
                                 seeds=tuple(range(t["f_seeds"])),
                                 total_steps=t["f_total_steps"])
    write_table(out_dir / "theorem2.csv", ["F", "final_suboptimality"],
                [[F, sub] for F, sub in sweep], fmt_kind)
    return 0


def _read_results_csv(path: Path) -> list[dict]:
    import csv as _csv

    with open(path, newline="", encoding="utf-8") as fh:
        reader = _csv.DictReader(fh)
        missing = [c for c in RESULT_COLUMNS if c not in (reader.fieldnames or [])]
        if missing:
            raise ConfigError(f"{path}: missing columns {missing}")
        return list(reader)


def _pick_rows(rows: list[dict], scheduler: str, path: Path) -> dict:
    names = sorted({r["scheduler"] for r in rows})
    if not scheduler:
        if len(names) != 1:
            raise ConfigError(
                f"{path} contains schedulers {names}; set classify.greedy_scheduler /"
                " classify.baseline_scheduler to choose one"
            )
        scheduler = names[0]
    picked = {}
    for r in rows:
        if r["scheduler"] != scheduler:
            continue
        key = (r["problem"], r["noise"], r["seed"])
        if key in picked:
            raise ConfigError(f"{path}: duplicate pairing key {key} for {scheduler}")
        picked[key] = r
    if not picked:
        raise ConfigError(f"{path}: no rows for scheduler {scheduler!r}")
    return picked


def _summary_from_row(row: dict):
    from .runner import RunSummary

    def num(v):
        return math.inf if v == "inf" else float(v)

    return RunSummary(
        stage_losses=(num(row["stage10"]), num(row["stage50"]), num(row["stage100"])),
        final_loss=num(row["final_loss"]),
        max_loss=num(row["max_loss"]),
        recovery_ratio=None if row["recovery_ratio"] == "" else float(row["recovery_ratio"]),
        recovery_speed=None if row["recovery_speed"] == "" else int(row["recovery_speed"]),
        diverged=row["diverged"] == "true",
    )


def cmd_classify(cfg: dict, out_dir: Path, fmt_kind: str, jobs: int, seed_override) -> int:
    c = cfg["classify"]
    for field in ("greedy_results", "baseline_results"):
        if c[field] is REQUIRED:
            raise ConfigError(f"missing classify.{field}")
    left = _pick_rows(_read_results_csv(Path(c["greedy_results"])),
                      c["greedy_scheduler"], Path(c["greedy_results"]))
    right = _pick_rows(_read_results_csv(Path(c["baseline_results"])),
                       c["baseline_scheduler"], Path(c["baseline_results"]))
    keys = sorted(left.keys() & right.keys())
    if not keys:
        raise ConfigError("no common (problem, noise, seed) pairs between the inputs")

    verdict_rows = []
    counts = {"yes": 0, "yes_star": 0, "no": 0, "no_star": 0}
    deltas = []
    for key in keys:
        g = _summary_from_row(left[key])
        b = _summary_from_row(right[key])
        v = classify(g, b, cutoff=c["cutoff"], relative=c["relative"],
                     greedy_key=key, baseline_key=key)
        for stage_v in v.stage_verdicts():
            counts[stage_v] += 1
        deltas.extend(v.deltas)
        verdict_rows.append([*key, v.stage10, v.stage50, v.stage100, v.overall,
                             *v.deltas, v.overall_delta])

    echo_config(out_dir, cfg)
    write_table(out_dir / "verdicts.csv",
                ["problem", "noise", "seed", "stage10", "stage50", "stage100", "overall",
                 "delta10", "delta50", "delta100", "overall_delta"],
                verdict_rows, fmt_kind)
    total = sum(counts.values())
    finite = [d for d in deltas if math.isfinite(d)]
    pct = lambda n: 100.0 * n / total
    count_rows = [
        ["yes", counts["yes"]],
        ["yes_star", counts["yes_star"]],
        ["no", counts["no"]],
        ["no_star", counts["no_star"]],
        ["sum", total],
        ["overall_as_good_or_better_pct", pct(counts["yes"] + counts["yes_star"] + counts["no_star"])],
        ["overall_better_pct", pct(counts["yes"] + counts["yes_star"])],
        ["overall_worse_pct", pct(counts["no"] + counts["no_star"])],
        ["overall_as_good_pct", pct(counts["yes_star"] + counts["no_star"])],
        ["clearly_better_pct", pct(counts["yes"])],
        ["average_benefit", float(np.mean(finite)) if finite else None],
        ["max_benefit", float(np.max(finite)) if finite else None],
        ["max_deficit", float(np.min(finite)) if finite else None],
    ]
    write_table(out_dir / "summary_counts.csv", ["metric", "value"], count_rows, fmt_kind)
    return 0


COMMANDS = {
    "run": (cmd_run, ["run", "problem", "scheduler", "noise", "output"]),
    "robustness": (cmd_robustness, ["grid", "scheduler", "output"]),
    "fsweep": (cmd_fsweep, ["fsweep", "output"]),
    "theory": (cmd_theory, ["theory", "output"]),
    "classify": (cmd_classify, ["classify", "output"]),
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="greedylr",
                                     description="Adaptive LR scheduler benchmark harness")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="INI config file")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--jobs", type=int, default=None, help="parallel workers")
        p.add_argument("--seed", type=int, default=None, help="base seed override")
        p.add_argument("--format", choices=("csv", "json"), default=None)

    args = parser.parse_args(argv)
    fn, sections = COMMANDS[args.command]
    try:
        cfg = load_config(args.config, sections)
        out_cfg = cfg.get("output", {"format": "csv", "jobs": 1})
        fmt_kind = args.format or out_cfg["format"]
        if fmt_kind not in ("csv", "json"):
            raise ConfigError(f"bad output.format {fmt_kind!r}")
        jobs = args.jobs if args.jobs is not None else out_cfg["jobs"]
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        return fn(cfg, out_dir, fmt_kind, jobs, args.seed)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
