"""Acceptance suite: one test per release criterion, each printing a
PASS/FAIL line (run with `pytest -s tests/test_acceptance.py` to see them).

The reference settings used here are the library defaults: the 600-run
robustness grid, the factor-sweep configuration, and the theory-check
instances are exactly what the CLI commands run.
"""

import math
from dataclasses import replace

import numpy as np
import pytest

from greedylr.cli import main
from greedylr.noise import NoiseSpec
from greedylr.problems import eval_component, make_problem
from greedylr.runner import (
    FSWEEP_DEFAULTS,
    GridSpec,
    RunConfig,
    RunSummary,
    build_problem,
    classify,
    f_sweep,
    optimal_factor_sweep,
    optimal_factor_value,
    run_grid,
    run_one,
    theorem1_check,
)
from greedylr.schedulers import (
    BaselineConfig,
    GreedyConfig,
    greedy_detailed_step,
    greedy_init,
)

from test_schedulers import GOLDEN


def report(criterion: str, ok: bool, detail: str = "") -> None:
    print(f"ACCEPTANCE {criterion}: {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, f"{criterion} failed: {detail}"


@pytest.fixture(scope="module")
def grid_result():
    return run_grid(GridSpec())


def test_criterion_01_scheduler_golden_table():
    transitions = 0
    for name, cfg, metrics, expected in GOLDEN:
        state = greedy_init(cfg)
        got = [greedy_detailed_step(state, cfg, m) for m in metrics]
        assert got == expected, f"{name}: {got} != {expected}"
        transitions += len(metrics)
    report("1 scheduler golden table", transitions >= 20,
           f"{transitions} hand-derived transitions matched exactly")


def test_criterion_02_lr_bounds_invariant():
    cfg = GreedyConfig(initial_lr=0.01, min_lr=1e-4, max_lr=0.3, patience=1,
                       smoothing_enabled=True, window_size=5)
    rng = np.random.default_rng(2024)
    metrics = rng.normal(0, 5, size=(100_000, 12))
    violations = 0
    for row in metrics:
        state = greedy_init(cfg)
        for m in row:
            lr = greedy_detailed_step(state, cfg, float(m))
            if not (cfg.min_lr <= lr <= cfg.max_lr):
                violations += 1
    report("2 LR bounds invariant", violations == 0,
           f"100000 sequences, {violations} violations")


def test_criterion_03_gradient_correctness():
    worst = 0.0
    for kind, dim, n in [("quadratic_sum", 6, 5), ("logistic", 8, 24),
                         ("mlp", 4, 16), ("rosenbrock", 2, 1)]:
        p = make_problem(kind, dim, n, seed=321)
        rng = np.random.default_rng(99)
        for _ in range(10):
            x = rng.normal(scale=0.8, size=p.dimension)
            i = int(rng.integers(0, p.n_components))
            _, grad = eval_component(p, i, x)
            fd = np.zeros_like(x)
            for j in range(len(x)):
                xp, xm = x.copy(), x.copy()
                xp[j] += 1e-5
                xm[j] -= 1e-5
                fd[j] = (eval_component(p, i, xp)[0] - eval_component(p, i, xm)[0]) / 2e-5
            rel = np.linalg.norm(grad - fd) / max(np.linalg.norm(grad), 1.0)
            worst = max(worst, rel)
    report("3 gradient correctness", worst < 1e-4, f"worst relative error {worst:.2e}")


def test_criterion_04_averaged_iterate_bound():
    ok = True
    details = []
    for d, l_max in [(2, 2.0), (8, 5.0), (32, 10.0)]:
        p = make_problem("quadratic_sum", d, 8, condition_number=10.0,
                         seed=100 + d, l_max=l_max)
        max_lr = 0.9 * 2.0 / l_max
        cfg = GreedyConfig(initial_lr=max_lr / 2, min_lr=0.05 * 2.0 / l_max, max_lr=max_lr)
        lhss = []
        for T in (100, 1000, 10000):
            res = theorem1_check(p, cfg, T, seeds=tuple(range(20)))
            ok &= res.holds
            lhss.append(res.lhs)
        decreasing = lhss[0] > lhss[1] > lhss[2]
        ok &= decreasing
        details.append(f"d={d} lhs={lhss[0]:.3g}->{lhss[2]:.3g} dec={decreasing}")
    report("4 averaged-iterate bound", ok, "; ".join(details))


def test_criterion_05_optimal_factor():
    p = make_problem("quadratic_sum", 8, 8, condition_number=10.0, seed=7,
                     l_max=2.0, b_scale=1.0)
    f_star = optimal_factor_value(p.L_max)
    assert f_star == 0.5
    cfg = GreedyConfig(initial_lr=1e-3, min_lr=1e-3, max_lr=0.3)
    grid = [0.1, 0.3, f_star, 0.7, 0.9, 0.99]
    sweep = dict(optimal_factor_sweep(p, grid, cfg, seeds=tuple(range(10)),
                                      total_steps=150))
    best = min(sweep.values())
    ratio = sweep[f_star] / best
    report("5 optimal factor", ratio <= 2.0,
           f"subopt at F*={f_star}: {sweep[f_star]:.3g}, best {best:.3g}, ratio {ratio:.2f}")


def test_criterion_06_factor_stability_threshold():
    problem, _ = build_problem(FSWEEP_DEFAULTS["problem"])
    base = GreedyConfig(
        initial_lr=FSWEEP_DEFAULTS["initial_lr"], min_lr=FSWEEP_DEFAULTS["min_lr"],
        max_lr=FSWEEP_DEFAULTS["max_lr"], patience=FSWEEP_DEFAULTS["patience"],
        threshold=FSWEEP_DEFAULTS["threshold"], warmup=FSWEEP_DEFAULTS["warmup"],
        smoothing_enabled=FSWEEP_DEFAULTS["smoothing_enabled"],
        window_size=FSWEEP_DEFAULTS["window_size"],
        reset_start=FSWEEP_DEFAULTS["reset_start"], factor_F=0.5,
    )
    results = f_sweep(problem, FSWEEP_DEFAULTS["f_values"], base,
                      seeds=FSWEEP_DEFAULTS["seeds"],
                      total_steps=FSWEEP_DEFAULTS["total_steps"])
    meds = {r.factor_F: r.median_final_loss for r in results}
    diverged = {r.factor_F: r.diverged for r in results}
    stable = [meds[F] for F in (0.5, 0.75, 0.99)]
    band = max(stable) / min(stable)
    smallest_bad = diverged[0.25] or meds[0.25] >= max(stable)
    report("6 factor stability threshold",
           smallest_bad and band <= 1.10,
           f"medians {meds}, F>=0.5 band {band:.3f} (<=1.10), "
           f"F=0.25 worst-or-diverged: {smallest_bad}")


def test_criterion_07_robustness_ordering(grid_result):
    assert len(grid_result.rows) == 600
    pct = grid_result.percentile_table()
    greedy_med = pct["greedy"][1]
    others = {s: pct[s][1] for s in ("cosine", "cosine_restarts", "exponential")}
    ok = all(greedy_med <= m for m in others.values())
    report("7 robustness ordering", ok,
           f"greedy median {greedy_med:.4g} vs " +
           ", ".join(f"{s}={m:.4g}" for s, m in others.items()))


def test_criterion_08_recovery_ordering(grid_result):
    def spike_recovery(s):
        vals = [r.summary.recovery_ratio for r in grid_result.rows
                if r.scheduler == s and r.noise in ("periodic_spike", "random_spike")
                and r.summary.recovery_ratio is not None]
        return float(np.median(vals))

    g_rec, e_rec = spike_recovery("greedy"), spike_recovery("exponential")
    pct = grid_result.percentile_table()
    g_range = pct["greedy"][2] / pct["greedy"][0]
    e_range = pct["exponential"][2] / pct["exponential"][0]
    ok = g_rec >= e_rec and g_range <= e_range
    report("8 recovery ordering", ok,
           f"spike recovery greedy {g_rec:.3g} >= exponential {e_rec:.3g}; "
           f"final-loss range greedy {g_range:.3g}x <= exponential {e_range:.3g}x")


def test_criterion_09_noise_gradient_separation():
    p = make_problem("mlp", 3, 12, seed=5)
    sched = BaselineConfig(kind="constant_warmup", initial_lr=0.05, total_steps=80,
                           warmup_steps=0)
    specs = [
        NoiseSpec(kind="none"),
        NoiseSpec(kind="gaussian", strength=2.0),
        NoiseSpec(kind="periodic_spike", strength=5.0, period=9),
        NoiseSpec(kind="random_spike", strength=5.0, spike_prob=0.3),
        NoiseSpec(kind="adversarial", strength=3.0),
    ]
    traces = [run_one(RunConfig(problem=p, scheduler=sched, noise=spec,
                                total_steps=80, seed=11)) for spec in specs]
    ref = traces[0]
    ok = all(
        tr.true_loss.tobytes() == ref.true_loss.tobytes()
        and tr.grad_norm.tobytes() == ref.grad_norm.tobytes()
        for tr in traces
    )
    report("9 noise/gradient separation", ok,
           "true-loss and gradient streams bitwise identical across 5 noise kinds")


def test_criterion_10_classification_methodology():
    def summary(stages):
        return RunSummary(stage_losses=stages, final_loss=stages[-1],
                          max_loss=max(stages), recovery_ratio=None,
                          recovery_speed=None, diverged=False)

    g = summary((1.0, 1.0, 1.0))
    checks = [
        (classify(g, summary((1.05, 1.05, 1.05)), cutoff=0.1).stage10, "yes_star"),
        (classify(g, summary((0.95, 0.95, 0.95)), cutoff=0.1).stage10, "no_star"),
        (classify(g, summary((1.5, 1.5, 1.5)), cutoff=0.1).stage10, "yes"),
        (classify(g, summary((0.5, 0.5, 0.5)), cutoff=0.1).stage10, "no"),
    ]
    verdict_ok = all(got == want for got, want in checks)

    # synthetic verdict table with known counts: 4 pairs x 3 stages
    pairs = [
        (g, summary((1.5, 1.05, 0.95))),   # yes, yes_star, no_star
        (g, summary((0.5, 1.5, 1.05))),    # no, yes, yes_star
        (g, summary((1.05, 0.95, 1.5))),   # yes_star, no_star, yes
        (g, summary((1.5, 1.5, 1.5))),     # yes, yes, yes
    ]
    counts = {"yes": 0, "yes_star": 0, "no": 0, "no_star": 0}
    for a, b in pairs:
        for v in classify(a, b, cutoff=0.1).stage_verdicts():
            counts[v] += 1
    hand = {"yes": 6, "yes_star": 3, "no": 1, "no_star": 2}
    total = sum(counts.values())
    as_good_or_better = 100.0 * (counts["yes"] + counts["yes_star"] + counts["no_star"]) / total
    clearly_better = 100.0 * counts["yes"] / total
    counts_ok = counts == hand and total == 3 * len(pairs)
    pct_ok = (as_good_or_better == pytest.approx(100.0 * 11 / 12)
              and clearly_better == pytest.approx(50.0))
    report("10 classification methodology", verdict_ok and counts_ok and pct_ok,
           f"verdicts {[g for g, _ in checks]}, counts {counts}, "
           f"as-good-or-better {as_good_or_better:.2f}%, clearly-better {clearly_better:.1f}%")


def test_criterion_11_determinism_byte_identical(tmp_path):
    cfg = tmp_path / "defaults.ini"
    cfg.write_text("", encoding="utf-8")
    outs = []
    for tag in ("a", "b"):
        fdir, rdir = tmp_path / f"fsweep_{tag}", tmp_path / f"robust_{tag}"
        assert main(["fsweep", "--config", str(cfg), "--out", str(fdir)]) == 0
        assert main(["robustness", "--config", str(cfg), "--out", str(rdir)]) == 0
        blobs = {}
        for d in (fdir, rdir):
            for f in sorted(d.glob("*.csv")):
                blobs[f"{d.name[:-2]}/{f.name}"] = f.read_bytes()
        outs.append(blobs)
    same = outs[0].keys() == outs[1].keys() and all(
        outs[0][k] == outs[1][k] for k in outs[0]
    )
    report("11 determinism", same,
           f"{len(outs[0])} CSV files byte-identical across reruns")
