"""Single runs, experiment grids, and the theory-verification experiments.

A run couples one problem, one scheduler, one optimizer and one noise regime
into a training loop; every stream the loop consumes (component sampling,
noise draws, the initial iterate) comes from its own counter-based Philox
substream of the run seed, so two runs with the same seed see identical data
no matter which scheduler sits in the loop. That pairing is what makes the
grid comparisons and the paired classifier meaningful.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .noise import NoiseSpec, NoiseState, perturb
from .optim import DIVERGENCE_LIMIT, Iterate, OptimizerState, has_diverged, optimizer_step
from .problems import Problem, eval_component, eval_full, make_problem
from .schedulers import BaselineConfig, GreedyConfig, make_scheduler


@dataclass(frozen=True)
class RunConfig:
    problem: Problem
    scheduler: GreedyConfig | BaselineConfig
    optimizer: str = "sgd"
    noise: NoiseSpec = NoiseSpec()
    total_steps: int = 200
    seed: int = 0
    record_iterates: bool = False
    scheduler_variant: str = "detailed"  # greedy only: "detailed" | "simple"
    x0: np.ndarray | None = None

    def __post_init__(self):
        if self.total_steps < 10:
            raise ValueError("total_steps must be >= 10 (stage metrics need 10% resolution)")
        if self.scheduler_variant not in ("detailed", "simple"):
            raise ValueError(f"unknown scheduler variant {self.scheduler_variant!r}")


@dataclass
class Trace:
    true_loss: np.ndarray
    observed_loss: np.ndarray
    lr: np.ndarray
    grad_norm: np.ndarray
    diverged: bool
    total_steps: int
    average_iterate: np.ndarray
    final_full_loss: float
    avg_iterate_full_loss: float
    component: np.ndarray | None = None
    iterates: np.ndarray | None = None

    def __len__(self) -> int:
        return len(self.true_loss)


@dataclass
class RunSummary:
    stage_losses: tuple[float, float, float]
    final_loss: float
    max_loss: float
    recovery_ratio: float | None
    recovery_speed: int | None
    diverged: bool


def _streams(seed: int):
    root = np.random.SeedSequence(seed)
    sample_ss, noise_ss, init_ss = root.spawn(3)
    gen = lambda ss: np.random.Generator(np.random.Philox(ss))
    return gen(sample_ss), gen(noise_ss), gen(init_ss)


def run_one(cfg: RunConfig) -> Trace:
    """Execute one training run and record its per-step streams.

    Per step: sample a component, evaluate its loss and gradient, perturb the
    loss into the observed metric, ask the scheduler for an LR, and take the
    optimizer step. Divergence (non-finite or > 1e12 iterate/loss) truncates
    the trace and sets the flag; it is recorded data, never an exception.
    """
    problem = cfg.problem
    sample_rng, noise_rng, init_rng = _streams(cfg.seed)
    if cfg.x0 is not None:
        x0 = np.asarray(cfg.x0, dtype=float).copy()
    else:
        x0 = problem.init_scale * init_rng.standard_normal(problem.dimension)

    scheduler = make_scheduler(cfg.scheduler, simple=cfg.scheduler_variant == "simple")
    noise_state = NoiseState(cfg.noise, noise_rng)
    opt_state = OptimizerState(kind=cfg.optimizer)
    it = Iterate(x=x0)

    T = cfg.total_steps
    true_loss = np.empty(T)
    observed = np.empty(T)
    lrs = np.empty(T)
    grad_norms = np.empty(T)
    components = np.empty(T, dtype=np.int64)
    iterates = np.empty((T, problem.dimension)) if cfg.record_iterates else None
    x_sum = np.zeros(problem.dimension)
    steps = 0
    diverged = False

    with np.errstate(over="ignore", invalid="ignore"):
        for t in range(T):
            i_t = int(sample_rng.integers(0, problem.n_components))
            loss, grad = eval_component(problem, i_t, it.x)
            if not math.isfinite(loss) or abs(loss) > DIVERGENCE_LIMIT:
                diverged = True
                break
            x_sum += it.x
            obs = perturb(noise_state, cfg.noise, loss, t)
            lr = scheduler.step(obs)
            true_loss[t] = loss
            observed[t] = obs
            lrs[t] = lr
            grad_norms[t] = float(np.linalg.norm(grad))
            components[t] = i_t
            if iterates is not None:
                iterates[t] = it.x
            it = optimizer_step(opt_state, it, grad, lr)
            steps = t + 1
            if has_diverged(it.x):
                diverged = True
                break

        avg = x_sum / steps if steps else x0.copy()
        final_full = eval_full(problem, it.x)[0] if np.all(np.isfinite(it.x)) else math.inf
        avg_full = eval_full(problem, avg)[0]

    return Trace(
        true_loss=true_loss[:steps],
        observed_loss=observed[:steps],
        lr=lrs[:steps],
        grad_norm=grad_norms[:steps],
        diverged=diverged,
        total_steps=T,
        average_iterate=avg,
        final_full_loss=float(final_full),
        avg_iterate_full_loss=float(avg_full),
        component=components[:steps],
        iterates=iterates[:steps] if iterates is not None else None,
    )


def stage_indices(total_steps: int) -> tuple[int, int, int]:
    """1-based step numbers at 10%, 50% and 100% of the horizon (ceiling)."""
    return (
        math.ceil(0.1 * total_steps),
        math.ceil(0.5 * total_steps),
        total_steps,
    )


def summarize(trace: Trace) -> RunSummary:
    """Derive the comparison metrics of one run from its trace.

    final_loss is the mean true loss over the last 10 steps; the recovery
    ratio divides the peak loss by it, and recovery speed counts steps from
    the peak until true loss first drops below its immediately pre-peak
    value. Diverged runs get an infinite final loss and no recovery metrics.
    """
    if len(trace) == 0:
        return RunSummary((math.inf,) * 3, math.inf, math.inf, None, None, True)

    losses = trace.true_loss
    stages = tuple(
        float(losses[s - 1]) if s - 1 < len(losses) else math.inf
        for s in stage_indices(trace.total_steps)
    )
    max_loss = float(losses.max())

    if trace.diverged:
        return RunSummary(stages, math.inf, max_loss, None, None, True)

    final_loss = float(losses[-10:].mean())
    recovery_ratio = max_loss / final_loss if final_loss != 0 else None

    t_peak = int(losses.argmax())
    recovery_speed = None
    if t_peak > 0:
        pre_spike = losses[t_peak - 1]
        after = np.nonzero(losses[t_peak + 1 :] < pre_spike)[0]
        if after.size:
            recovery_speed = int(after[0]) + 1

    return RunSummary(stages, final_loss, max_loss, recovery_ratio, recovery_speed, False)


@dataclass(frozen=True)
class ComparisonVerdict:
    stage10: str
    stage50: str
    stage100: str
    overall: str
    deltas: tuple[float, float, float]
    overall_delta: float

    def stage_verdicts(self) -> tuple[str, str, str]:
        return (self.stage10, self.stage50, self.stage100)


def _verdict(delta: float, reference: float, cutoff: float, relative: bool) -> str:
    limit = cutoff * abs(reference) if relative else cutoff
    base = "yes" if delta > 0 else "no"
    return base + ("_star" if abs(delta) < limit else "")


def _delta(baseline: float, greedy: float) -> float:
    if math.isinf(baseline) and math.isinf(greedy):
        return 0.0
    return baseline - greedy


def classify(
    greedy: RunSummary,
    baseline: RunSummary,
    cutoff: float = 0.1,
    relative: bool = False,
    greedy_key=None,
    baseline_key=None,
) -> ComparisonVerdict:
    """Stage-wise paired verdict: yes/no by sign of (baseline - greedy) loss,
    starred when the delta is below the significance cutoff.

    With relative=True the cutoff is a fraction of the greedy loss at the
    same stage (the large-model convention); otherwise it is absolute.
    """
    if greedy_key is not None and baseline_key is not None and greedy_key != baseline_key:
        raise ValueError(f"pairing mismatch: {greedy_key} vs {baseline_key}")
    deltas = tuple(
        _delta(b, g) for b, g in zip(baseline.stage_losses, greedy.stage_losses)
    )
    verdicts = [
        _verdict(d, g, cutoff, relative) for d, g in zip(deltas, greedy.stage_losses)
    ]
    overall_delta = _delta(baseline.final_loss, greedy.final_loss)
    overall = _verdict(overall_delta, greedy.final_loss, cutoff, relative)
    return ComparisonVerdict(verdicts[0], verdicts[1], verdicts[2], overall, deltas, overall_delta)


# --- grid -------------------------------------------------------------------

#: Default desk-scale problem catalog: name -> (factory kwargs, per-problem base LR).
PROBLEM_PRESETS: dict[str, tuple[dict, float]] = {
    "quad_easy": (
        dict(kind="quadratic_sum", dimension=8, n_components=8, condition_number=100.0,
             seed=101, l_max=4.0, b_scale=0.0),
        0.02,
    ),
    "quad_hard": (
        dict(kind="quadratic_sum", dimension=32, n_components=16, condition_number=1000.0,
             seed=102, l_max=8.0, b_scale=0.0),
        0.01,
    ),
    "logistic_sep": (
        dict(kind="logistic", dimension=10, n_components=32, seed=103, margin_noise=0.6),
        0.5,
    ),
    "logistic_noisy": (
        dict(kind="logistic", dimension=20, n_components=64, seed=104, margin_noise=0.8),
        0.5,
    ),
    "mlp_small": (
        dict(kind="mlp", dimension=4, n_components=48, seed=105, width=8, target_noise=0.2),
        0.1,
    ),
    "mlp_sweep": (
        dict(kind="mlp", dimension=4, n_components=64, seed=33, width=4, target_noise=0.3),
        0.3,
    ),
    "rosenbrock": (
        dict(kind="rosenbrock", dimension=2, n_components=1, seed=106, init_scale=1.0),
        1e-3,
    ),
}

#: Problems exercised by the default robustness grid (mlp_sweep is the
#: factor-sweep testbed, not a grid member).
DEFAULT_GRID_PROBLEMS = (
    "quad_easy", "quad_hard", "logistic_sep", "logistic_noisy", "mlp_small", "rosenbrock",
)

#: Factor-sweep defaults: the aggressive-start configuration used by the
#: stability-threshold experiment.
FSWEEP_DEFAULTS = dict(
    problem="mlp_sweep",
    f_values=(0.25, 0.5, 0.75, 0.99),
    initial_lr=0.3,
    min_lr=0.05,
    max_lr=2.0,
    patience=3,
    threshold=0.0,
    warmup=5,
    smoothing_enabled=True,
    window_size=50,
    reset_start=25,
    total_steps=400,
    seeds=(0, 1, 2, 3, 4),
)

#: Default noise catalog: name -> NoiseSpec.
NOISE_PRESETS: dict[str, NoiseSpec] = {
    "none": NoiseSpec(kind="none"),
    "gaussian": NoiseSpec(kind="gaussian", strength=0.5),
    "periodic_spike": NoiseSpec(kind="periodic_spike", strength=3.0),
    "random_spike": NoiseSpec(kind="random_spike", strength=3.0, spike_prob=0.02),
    "adversarial": NoiseSpec(kind="adversarial", strength=2.0),
}

GRID_SCHEDULERS = ("greedy", "cosine", "cosine_restarts", "exponential")

#: Greedy defaults for grid runs (smoothing window 50, patience 10,
#: min LR at 10% of the initial LR).
GREEDY_GRID_DEFAULTS = dict(
    factor_F=0.95,
    patience=10,
    threshold=0.0,
    cooldown=0,
    warmup=0,
    eps=1e-8,
    smoothing_enabled=True,
    window_size=50,
    reset_start=10_000,
    mode="min",
)


def build_problem(name: str) -> tuple[Problem, float]:
    """Instantiate a preset problem; returns (problem, base LR)."""
    if name not in PROBLEM_PRESETS:
        raise ValueError(f"unknown problem preset {name!r}")
    kwargs, base_lr = PROBLEM_PRESETS[name]
    return make_problem(**kwargs), base_lr


def build_scheduler_cfg(
    name: str,
    initial_lr: float,
    total_steps: int,
    greedy_overrides: dict | None = None,
) -> GreedyConfig | BaselineConfig:
    """Scheduler config for a grid cell, with the shared LR conventions.

    Every scheduler gets min_lr at 10% of the initial LR; the exponential
    decay rate is chosen to reach min_lr at the horizon, and restarts use a
    quarter-horizon period.
    """
    min_lr = 0.1 * initial_lr
    if name in ("greedy", "greedy_simple"):
        params = dict(GREEDY_GRID_DEFAULTS)
        params.update(greedy_overrides or {})
        params.setdefault("min_lr", min_lr)
        params.setdefault("max_lr", 10.0 * initial_lr)
        return GreedyConfig(initial_lr=initial_lr, **params)
    if name == "cosine":
        return BaselineConfig(kind="cosine", initial_lr=initial_lr, min_lr=min_lr,
                              total_steps=total_steps)
    if name == "cosine_restarts":
        return BaselineConfig(kind="cosine_restarts", initial_lr=initial_lr, min_lr=min_lr,
                              total_steps=total_steps,
                              restart_period=max(1, total_steps // 4))
    if name == "exponential":
        decay = (min_lr / initial_lr) ** (1.0 / total_steps)
        return BaselineConfig(kind="exponential", initial_lr=initial_lr, min_lr=min_lr,
                              total_steps=total_steps, decay_rate=decay)
    if name == "linear":
        return BaselineConfig(kind="linear", initial_lr=initial_lr, min_lr=min_lr,
                              total_steps=total_steps)
    if name == "polynomial":
        return BaselineConfig(kind="polynomial", initial_lr=initial_lr, min_lr=min_lr,
                              total_steps=total_steps, power=2.0)
    if name == "constant_warmup":
        return BaselineConfig(kind="constant_warmup", initial_lr=initial_lr, min_lr=min_lr,
                              total_steps=total_steps,
                              warmup_steps=max(1, total_steps // 20))
    raise ValueError(f"unknown scheduler {name!r}")


@dataclass(frozen=True)
class GridSpec:
    schedulers: tuple[str, ...] = GRID_SCHEDULERS
    problems: tuple[str, ...] = DEFAULT_GRID_PROBLEMS
    noises: tuple[str, ...] = tuple(NOISE_PRESETS)
    seeds: tuple[int, ...] = (0, 1, 2, 3, 4)
    total_steps: int = 200
    optimizer: str = "sgd"
    greedy_overrides: dict = field(default_factory=dict)
    noise_specs: dict[str, NoiseSpec] = field(default_factory=dict)


@dataclass
class GridRow:
    run_id: str
    scheduler: str
    factor_F: float | None
    problem: str
    noise: str
    seed: int
    summary: RunSummary
    error: str | None = None


@dataclass
class GridResult:
    rows: list[GridRow]
    lr_traces: dict[str, list[np.ndarray]]  # scheduler -> full-length LR trajectories
    total_steps: int

    def final_losses(self, scheduler: str, noise: str | None = None) -> np.ndarray:
        vals = [
            r.summary.final_loss
            for r in self.rows
            if r.scheduler == scheduler and (noise is None or r.noise == noise)
        ]
        return np.array(vals)

    def median_table(self) -> dict[tuple[str, str], float]:
        """(scheduler, noise) -> median final loss; the heatmap data."""
        out = {}
        schedulers = sorted({r.scheduler for r in self.rows})
        noises = sorted({r.noise for r in self.rows})
        for s in schedulers:
            for n in noises:
                out[(s, n)] = float(np.median(self.final_losses(s, n)))
        return out

    def percentile_table(self) -> dict[str, tuple[float, float, float]]:
        """scheduler -> (p10, p50, p90) of final loss over all its runs."""
        out = {}
        for s in sorted({r.scheduler for r in self.rows}):
            vals = self.final_losses(s)
            out[s] = tuple(float(np.percentile(vals, q)) for q in (10, 50, 90))
        return out

    def lr_band_table(self) -> dict[str, np.ndarray]:
        """scheduler -> array (steps, 3) of per-step LR p10/p50/p90."""
        out = {}
        for s, traces in sorted(self.lr_traces.items()):
            full = [t for t in traces if len(t) == self.total_steps]
            if full:
                stacked = np.stack(full)
                out[s] = np.percentile(stacked, (10, 50, 90), axis=0).T
        return out


def _grid_cell(args):
    scheduler_name, problem_name, noise_name, seed, spec = args
    run_id = f"{scheduler_name}-{problem_name}-{noise_name}-s{seed}"
    factor = None
    try:
        problem, base_lr = build_problem(problem_name)
        sched_cfg = build_scheduler_cfg(
            scheduler_name, base_lr, spec.total_steps, spec.greedy_overrides
        )
        factor = sched_cfg.factor_F if isinstance(sched_cfg, GreedyConfig) else None
        noise_spec = spec.noise_specs.get(noise_name, NOISE_PRESETS.get(noise_name))
        if noise_spec is None:
            raise ValueError(f"unknown noise preset {noise_name!r}")
        cfg = RunConfig(
            problem=problem,
            scheduler=sched_cfg,
            optimizer=spec.optimizer,
            noise=noise_spec,
            total_steps=spec.total_steps,
            seed=seed,
        )
        trace = run_one(cfg)
        return GridRow(run_id, scheduler_name, factor, problem_name, noise_name, seed,
                       summarize(trace)), trace.lr
    except Exception as exc:  # a failed cell is data, never aborts the grid
        empty = RunSummary((math.inf,) * 3, math.inf, math.inf, None, None, True)
        return GridRow(run_id, scheduler_name, factor, problem_name, noise_name, seed,
                       empty, error=str(exc)), np.empty(0)


def run_grid(spec: GridSpec, jobs: int = 1) -> GridResult:
    """Run every (scheduler, problem, noise, seed) cell of the grid.

    Cells are independent; results are folded in cell order so the output is
    identical for any parallelism degree.
    """
    cells = [
        (s, p, n, seed, spec)
        for s in spec.schedulers
        for p in spec.problems
        for n in spec.noises
        for seed in spec.seeds
    ]
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_grid_cell, cells, chunksize=8))
    else:
        results = [_grid_cell(c) for c in cells]

    rows = []
    lr_traces: dict[str, list[np.ndarray]] = {}
    for row, lr in results:
        rows.append(row)
        lr_traces.setdefault(row.scheduler, []).append(lr)
    return GridResult(rows=rows, lr_traces=lr_traces, total_steps=spec.total_steps)


# --- factor sweep and theory checks ----------------------------------------

@dataclass
class FSweepResult:
    factor_F: float
    median_final_loss: float
    diverged: bool  # majority vote across seeds
    n_diverged: int
    summaries: list[RunSummary]
    first_seed_trace: Trace


def f_sweep(
    problem: Problem,
    f_values,
    base_cfg: GreedyConfig,
    seeds=(0, 1, 2, 3, 4),
    total_steps: int = 200,
    optimizer: str = "sgd",
    noise: NoiseSpec = NoiseSpec(),
    variant: str = "detailed",
) -> list[FSweepResult]:
    """Run the greedy scheduler once per factor value, all else paired."""
    out = []
    for F in f_values:
        if not (0.0 < F < 1.0):
            raise ValueError(f"factor {F} outside (0, 1)")
        cfg_f = replace(base_cfg, factor_F=F)
        summaries, first_trace, n_div = [], None, 0
        for seed in seeds:
            trace = run_one(RunConfig(
                problem=problem, scheduler=cfg_f, optimizer=optimizer, noise=noise,
                total_steps=total_steps, seed=seed, scheduler_variant=variant,
            ))
            if first_trace is None:
                first_trace = trace
            s = summarize(trace)
            summaries.append(s)
            n_div += int(s.diverged)
        finals = [s.final_loss for s in summaries]
        out.append(FSweepResult(
            factor_F=float(F),
            median_final_loss=float(np.median(finals)),
            diverged=n_div > len(summaries) // 2,
            n_diverged=n_div,
            summaries=summaries,
            first_seed_trace=first_trace,
        ))
    return out


@dataclass
class BoundCheckResult:
    T: int
    lhs: float
    rhs: float
    holds: bool
    per_seed_lhs: list[float]


def default_x0(problem: Problem, tag: int = 7) -> np.ndarray:
    """Deterministic start point shared by every seed of a theory experiment."""
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([problem.seed, tag])))
    return problem.init_scale * rng.standard_normal(problem.dimension)


def theorem1_check(
    problem: Problem,
    cfg: GreedyConfig,
    T: int,
    seeds=(0,),
    x0: np.ndarray | None = None,
) -> BoundCheckResult:
    """Check the averaged-iterate convergence bound on one quadratic problem.

    lhs is the mean over seeds of f(x_bar_T) - f_star for the minimal greedy
    scheduler under SGD; rhs is ||x0 - x_star||^2 / (2 min_lr T)
    + max_lr^2 L_max / (2 min_lr). The bound's hypotheses require LR bounds
    and max_lr < 2 / L_max.
    """
    if problem.f_star is None or problem.x_star is None:
        raise ValueError("problem must carry f_star and x_star (use quadratic_sum)")
    if problem.L_max is None or cfg.max_lr >= 2.0 / problem.L_max:
        raise ValueError("bound hypotheses need known L_max and max_lr < 2 / L_max")
    if x0 is None:
        x0 = default_x0(problem)
    per_seed = []
    for seed in seeds:
        trace = run_one(RunConfig(
            problem=problem, scheduler=cfg, optimizer="sgd", noise=NoiseSpec(),
            total_steps=T, seed=seed, scheduler_variant="simple", x0=x0,
        ))
        per_seed.append(trace.avg_iterate_full_loss - problem.f_star)
    lhs = float(np.mean(per_seed))
    rhs = float(
        np.linalg.norm(x0 - problem.x_star) ** 2 / (2.0 * cfg.min_lr * T)
        + cfg.max_lr**2 * problem.L_max / (2.0 * cfg.min_lr)
    )
    return BoundCheckResult(T=T, lhs=lhs, rhs=rhs, holds=lhs <= rhs, per_seed_lhs=per_seed)


def optimal_factor_value(l_max: float) -> float:
    """The rate-optimal factor 1 - 1/L_max (meaningful only for L_max > 1)."""
    if l_max <= 1.0:
        raise ValueError("the optimal-factor formula needs L_max > 1")
    return 1.0 - 1.0 / l_max


def optimal_factor_sweep(
    problem: Problem,
    f_values,
    cfg: GreedyConfig,
    seeds=(0,),
    total_steps: int = 500,
) -> list[tuple[float, float]]:
    """Median final suboptimality per factor value, minimal scheduler, SGD."""
    if problem.f_star is None:
        raise ValueError("problem must carry f_star")
    x0 = default_x0(problem)
    out = []
    for F in f_values:
        subopts = []
        for seed in seeds:
            trace = run_one(RunConfig(
                problem=problem, scheduler=replace(cfg, factor_F=F), optimizer="sgd",
                noise=NoiseSpec(), total_steps=total_steps, seed=seed,
                scheduler_variant="simple", x0=x0,
            ))
            subopts.append(trace.final_full_loss - problem.f_star)
        out.append((float(F), float(np.median(subopts))))
    return out
