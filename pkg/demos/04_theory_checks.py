"""Check the library's two theoretical guarantees numerically.

First: with the LR clamped to [min_lr, max_lr] and max_lr below 2/L_max, the
average iterate's suboptimality is bounded by

    f(x_bar_T) - f*  <=  ||x0 - x*||^2 / (2 min_lr T)  +  max_lr^2 L_max / (2 min_lr).

Second: the rate-optimal multiplicative factor is F = 1 - 1/L_max; its final
suboptimality should sit near the best over a factor grid.
"""

from greedylr import GreedyConfig, make_problem, optimal_factor_sweep, theorem1_check
from greedylr.runner import optimal_factor_value

problem = make_problem("quadratic_sum", 8, 8, condition_number=10.0, seed=7, l_max=2.0)
cfg = GreedyConfig(initial_lr=0.25, min_lr=0.05, max_lr=0.5)

print("averaged-iterate bound over a horizon ladder (20 seeds):")
print(f"{'T':>6} {'lhs':>12} {'rhs':>10} {'holds':>6}")
for T in (100, 1000, 10000):
    r = theorem1_check(problem, cfg, T, seeds=tuple(range(20)))
    print(f"{T:>6} {r.lhs:>12.3e} {r.rhs:>10.3f} {str(r.holds):>6}")

f_star = optimal_factor_value(problem.L_max)
print(f"\nfactor sweep on the same problem (F* = 1 - 1/L_max = {f_star}):")
sweep_cfg = GreedyConfig(initial_lr=1e-3, min_lr=1e-3, max_lr=0.3)
for F, sub in optimal_factor_sweep(problem, [0.1, 0.3, f_star, 0.7, 0.9, 0.99],
                                   sweep_cfg, seeds=tuple(range(10)), total_steps=150):
    marker = "  <- F*" if F == f_star else ""
    print(f"  F={F:<5} median final suboptimality = {sub:.4g}{marker}")
