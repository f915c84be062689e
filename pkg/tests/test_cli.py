"""CLI contract tests: config handling, file schemas, byte-stable outputs."""

import json

import pytest

from greedylr.cli import main

RUN_CONFIG = """
[run]
total_steps = 40
seed = 3

[problem]
kind = quadratic_sum
dimension = 4
n_components = 4
condition_number = 5
l_max = 2.0
b_scale = 0.0
seed = 1

[scheduler]
kind = greedy
initial_lr = 0.1
window_size = 5
patience = 2

[noise]
kind = gaussian
strength = 0.2
"""


def write(path, text):
    path.write_text(text, encoding="utf-8")
    return str(path)


def read_rows(path):
    lines = path.read_text(encoding="utf-8").splitlines()
    header = lines[0].split(",")
    return header, [dict(zip(header, line.split(","))) for line in lines[1:]]


def test_run_writes_trace_and_summary(tmp_path):
    cfg = write(tmp_path / "run.ini", RUN_CONFIG)
    out = tmp_path / "out"
    assert main(["run", "--config", cfg, "--out", str(out)]) == 0
    header, rows = read_rows(out / "trace.csv")
    assert header == ["step", "true_loss", "observed_loss", "lr", "grad_norm"]
    assert len(rows) == 40
    summary = json.loads((out / "summary.json").read_text())
    assert set(summary) >= {"stage10", "stage50", "stage100", "final_loss", "max_loss",
                            "recovery_ratio", "recovery_speed", "diverged"}
    assert (out / "config_echo.ini").exists()
    echo = (out / "config_echo.ini").read_text()
    assert "total_steps = 40" in echo
    assert "factor = 0.95" in echo  # defaults are recorded too


def test_run_rerun_byte_identical(tmp_path):
    cfg = write(tmp_path / "run.ini", RUN_CONFIG)
    out1, out2 = tmp_path / "a", tmp_path / "b"
    main(["run", "--config", cfg, "--out", str(out1)])
    main(["run", "--config", cfg, "--out", str(out2)])
    assert (out1 / "trace.csv").read_bytes() == (out2 / "trace.csv").read_bytes()
    assert (out1 / "summary.json").read_bytes() == (out2 / "summary.json").read_bytes()


def test_missing_problem_field_names_it(tmp_path, capsys):
    cfg = write(tmp_path / "bad.ini", "[run]\ntotal_steps = 20\n")
    assert main(["run", "--config", cfg, "--out", str(tmp_path / "o")]) != 0
    assert "problem.kind" in capsys.readouterr().err


def test_unknown_key_rejected(tmp_path, capsys):
    cfg = write(tmp_path / "bad.ini", RUN_CONFIG + "volume = 11\n")
    assert main(["run", "--config", cfg, "--out", str(tmp_path / "o")]) != 0
    assert "noise.volume" in capsys.readouterr().err


def test_bad_value_diagnostic_names_field(tmp_path, capsys):
    cfg = write(tmp_path / "bad.ini", RUN_CONFIG.replace("seed = 3", "seed = three"))
    assert main(["run", "--config", cfg, "--out", str(tmp_path / "o")]) != 0
    assert "run.seed" in capsys.readouterr().err


GRID_CONFIG = """
[grid]
schedulers = greedy,cosine,exponential
problems = quad_easy,rosenbrock
noises = none,periodic_spike
seeds = 2
total_steps = 40

[scheduler]
initial_lr = 0.1
window_size = 5
patience = 2
"""


def test_robustness_outputs(tmp_path):
    cfg = write(tmp_path / "grid.ini", GRID_CONFIG)
    out = tmp_path / "out"
    assert main(["robustness", "--config", cfg, "--out", str(out)]) == 0
    header, rows = read_rows(out / "results.csv")
    assert header == ["run_id", "scheduler", "F", "problem", "noise", "seed",
                      "stage10", "stage50", "stage100", "final_loss", "max_loss",
                      "recovery_ratio", "recovery_speed", "diverged"]
    assert len(rows) == 3 * 2 * 2 * 2
    _, med = read_rows(out / "medians.csv")
    assert len(med) == 3 * 2  # scheduler x noise cells
    _, pct = read_rows(out / "percentiles.csv")
    assert len(pct) == 3
    _, bands = read_rows(out / "lr_bands.csv")
    assert len(bands) == 3 * 40


def test_robustness_rerun_byte_identical_and_jobs_invariant(tmp_path):
    cfg = write(tmp_path / "grid.ini", GRID_CONFIG)
    outs = []
    for name, jobs in (("a", "1"), ("b", "1"), ("c", "2")):
        out = tmp_path / name
        assert main(["robustness", "--config", cfg, "--out", str(out),
                     "--jobs", jobs]) == 0
        outs.append((out / "results.csv").read_bytes())
    assert outs[0] == outs[1] == outs[2]


FSWEEP_CONFIG = """
[fsweep]
f_values = 0.25,0.5,0.75,0.99
seeds = 2
total_steps = 40
problem = quad_easy
initial_lr = 0.1
min_lr = 0.001
max_lr = 1.0
"""


def test_fsweep_outputs(tmp_path):
    cfg = write(tmp_path / "f.ini", FSWEEP_CONFIG)
    out = tmp_path / "out"
    assert main(["fsweep", "--config", cfg, "--out", str(out)]) == 0
    header, rows = read_rows(out / "fsweep.csv")
    assert header == ["F", "final_loss", "diverged"]
    assert len(rows) == 4
    assert all(r["diverged"] in ("true", "false") for r in rows)
    for F in ("0.25", "0.5", "0.75", "0.99"):
        trace_path = out / f"trace_F{F}.csv"
        assert trace_path.exists()


THEORY_CONFIG = """
[theory]
dimension = 4
l_max = 2.0
t_ladder = 50,200
seeds = 3
f_seeds = 2
f_total_steps = 60
f_values = 0.3,0.7
"""


def test_theory_outputs(tmp_path):
    cfg = write(tmp_path / "t.ini", THEORY_CONFIG)
    out = tmp_path / "out"
    assert main(["theory", "--config", cfg, "--out", str(out)]) == 0
    header, rows = read_rows(out / "theorem1.csv")
    assert header == ["T", "lhs", "rhs", "holds"]
    assert [r["T"] for r in rows] == ["50", "200"]
    assert all(r["holds"] == "true" for r in rows)
    header2, rows2 = read_rows(out / "theorem2.csv")
    assert header2 == ["F", "final_suboptimality"]
    # the rate-optimal factor 1 - 1/L = 0.5 is injected into the sweep
    assert "0.5" in [r["F"] for r in rows2]
    assert all(float(r["final_suboptimality"]) >= -1e-9 for r in rows2)


def test_classify_identical_inputs_all_starred(tmp_path):
    grid_cfg = write(tmp_path / "grid.ini", GRID_CONFIG)
    gout = tmp_path / "gout"
    main(["robustness", "--config", grid_cfg, "--out", str(gout)])
    cls_cfg = write(tmp_path / "c.ini", f"""
[classify]
greedy_results = {gout / 'results.csv'}
baseline_results = {gout / 'results.csv'}
greedy_scheduler = greedy
baseline_scheduler = greedy
cutoff = 0.1
""")
    out = tmp_path / "cls"
    assert main(["classify", "--config", cls_cfg, "--out", str(out)]) == 0
    _, verdicts = read_rows(out / "verdicts.csv")
    assert len(verdicts) == 8  # 2 problems x 2 noises x 2 seeds
    for v in verdicts:
        assert v["stage10"].endswith("_star")
        assert v["stage50"].endswith("_star")
        assert v["stage100"].endswith("_star")
    _, counts = read_rows(out / "summary_counts.csv")
    table = {r["metric"]: r["value"] for r in counts}
    assert int(table["sum"]) == 3 * len(verdicts)
    assert int(table["yes"]) == 0 and int(table["no"]) == 0


def test_classify_antisymmetric_under_swap(tmp_path):
    grid_cfg = write(tmp_path / "grid.ini", GRID_CONFIG)
    gout = tmp_path / "gout"
    main(["robustness", "--config", grid_cfg, "--out", str(gout)])

    def run_classify(a, b, out):
        cfg = write(tmp_path / f"{out}.ini", f"""
[classify]
greedy_results = {gout / 'results.csv'}
baseline_results = {gout / 'results.csv'}
greedy_scheduler = {a}
baseline_scheduler = {b}
""")
        dest = tmp_path / out
        assert main(["classify", "--config", cfg, "--out", str(dest)]) == 0
        return read_rows(dest / "verdicts.csv")[1]

    fwd = run_classify("greedy", "cosine", "fwd")
    rev = run_classify("cosine", "greedy", "rev")
    flip = {"yes": "no", "no": "yes", "yes_star": "no_star", "no_star": "yes_star"}
    for a, b in zip(fwd, rev):
        for stage in ("stage10", "stage50", "stage100"):
            assert flip[a[stage]] == b[stage]


def test_classify_requires_scheduler_choice_when_ambiguous(tmp_path, capsys):
    grid_cfg = write(tmp_path / "grid.ini", GRID_CONFIG)
    gout = tmp_path / "gout"
    main(["robustness", "--config", grid_cfg, "--out", str(gout)])
    cls_cfg = write(tmp_path / "c.ini", f"""
[classify]
greedy_results = {gout / 'results.csv'}
baseline_results = {gout / 'results.csv'}
""")
    assert main(["classify", "--config", cls_cfg, "--out", str(tmp_path / "cls")]) != 0
    assert "greedy_scheduler" in capsys.readouterr().err


def test_json_format_option(tmp_path):
    cfg = write(tmp_path / "run.ini", RUN_CONFIG)
    out = tmp_path / "out"
    assert main(["run", "--config", cfg, "--out", str(out), "--format", "json"]) == 0
    records = json.loads((out / "trace.json").read_text())
    assert len(records) == 40
    assert set(records[0]) == {"step", "true_loss", "observed_loss", "lr", "grad_norm"}


def test_seed_override_changes_run(tmp_path):
    cfg = write(tmp_path / "run.ini", RUN_CONFIG)
    a, b = tmp_path / "a", tmp_path / "b"
    main(["run", "--config", cfg, "--out", str(a)])
    main(["run", "--config", cfg, "--out", str(b), "--seed", "99"])
    assert (a / "trace.csv").read_bytes() != (b / "trace.csv").read_bytes()
