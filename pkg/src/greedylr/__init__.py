"""greedylr: loss-adaptive LR scheduling with a desk-scale benchmark harness."""

from .schedulers import (
    BaselineConfig,
    BaselineScheduler,
    GreedyConfig,
    GreedyLR,
    GreedyLRSimple,
    GreedyState,
    InvalidMetricError,
    SchedulerConfigError,
    baseline_lr,
    greedy_detailed_step,
    greedy_init,
    greedy_simple_step,
    increase_lr,
    is_better,
    make_scheduler,
    reduce_lr,
    smooth,
)
from .optim import Iterate, OptimizerState, adam_step, has_diverged, sgd_step
from .problems import Problem, eval_component, eval_full, make_problem
from .noise import NoiseSpec, NoiseState, gradient_untouched_check, perturb
from .runner import (
    ComparisonVerdict,
    GridSpec,
    RunConfig,
    RunSummary,
    Trace,
    classify,
    f_sweep,
    optimal_factor_sweep,
    optimal_factor_value,
    run_grid,
    run_one,
    summarize,
    theorem1_check,
)

__version__ = "0.1.0"
