"""Run one training loop end to end: problem, scheduler, optimizer, metrics.

Compares the greedy scheduler against cosine annealing on the same quadratic
with identical seeds, so every difference comes from the LR policy alone.
"""

from greedylr import GreedyConfig, RunConfig, run_one, summarize
from greedylr.runner import build_problem, build_scheduler_cfg

problem, base_lr = build_problem("quad_easy")
print(f"problem: quadratic sum, d={problem.dimension}, n={problem.n_components}, "
      f"L_max={problem.L_max}, f*={problem.f_star:.4g}")

for name in ("greedy", "cosine"):
    sched = build_scheduler_cfg(name, base_lr, total_steps=200)
    trace = run_one(RunConfig(problem=problem, scheduler=sched, total_steps=200, seed=0))
    s = summarize(trace)
    print(f"\n{name}:")
    print(f"  stage losses (10/50/100%): "
          + ", ".join(f"{v:.4g}" for v in s.stage_losses))
    print(f"  final loss (last-10 mean): {s.final_loss:.4g}")
    print(f"  LR path: start {trace.lr[0]:.3g},"
          f" mid {trace.lr[100]:.3g}, end {trace.lr[-1]:.3g}")
    print(f"  f(average iterate) = {trace.avg_iterate_full_loss:.4g}")
