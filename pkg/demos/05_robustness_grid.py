"""A reduced robustness grid: schedulers x noises, median final losses.

The full 600-run default grid is what `greedylr robustness` executes; this
demo shrinks it to two problems and three seeds so it finishes in a couple of
seconds while showing the same aggregation.
"""

import numpy as np

from greedylr import GridSpec, run_grid

spec = GridSpec(problems=("quad_easy", "mlp_small"), seeds=(0, 1, 2))
result = run_grid(spec)
print(f"{len(result.rows)} runs "
      f"({len(spec.schedulers)} schedulers x {len(spec.problems)} problems "
      f"x {len(spec.noises)} noises x {len(spec.seeds)} seeds)\n")

medians = result.median_table()
noises = sorted({n for _, n in medians})
print(f"{'scheduler':<16}" + "".join(f"{n:>16}" for n in noises))
for s in sorted({s for s, _ in medians}):
    print(f"{s:<16}" + "".join(f"{medians[(s, n)]:>16.4g}" for n in noises))

print("\nfinal-loss percentiles over each scheduler's runs:")
for s, (p10, p50, p90) in result.percentile_table().items():
    print(f"  {s:<16} p10={p10:.4g}  p50={p50:.4g}  p90={p90:.4g}  spread={p90 / p10:.1f}x")

print("\nmedian recovery ratio under spike noise:")
for s in sorted({r.scheduler for r in result.rows}):
    vals = [r.summary.recovery_ratio for r in result.rows
            if r.scheduler == s and r.noise in ("periodic_spike", "random_spike")
            and r.summary.recovery_ratio is not None]
    print(f"  {s:<16} {np.median(vals):.1f}x")
