"""Walk through the greedy scheduler's two forms on a synthetic loss curve.

The minimal form reacts to every step: divide LR by F when the loss improves,
multiply by F otherwise. The detailed form adds patience, cooldown/warmup,
smoothing and bounds, so it reacts to streaks instead of single steps.
"""

import math

from greedylr import (
    BaselineConfig,
    GreedyConfig,
    GreedyLR,
    GreedyLRSimple,
    baseline_lr,
)

# a loss curve that improves, stalls, spikes, then recovers
losses = (
    [2.0 - 0.08 * t for t in range(15)]        # steady improvement
    + [0.8] * 6                                 # plateau
    + [3.0, 2.8, 2.6]                           # spike
    + [0.7 - 0.01 * t for t in range(10)]       # recovery
)

simple = GreedyLRSimple(GreedyConfig(factor_F=0.7, initial_lr=0.1, min_lr=1e-3, max_lr=1.0))
detailed = GreedyLR(GreedyConfig(factor_F=0.7, initial_lr=0.1, min_lr=1e-3, max_lr=1.0,
                                 patience=3, cooldown=2, smoothing_enabled=True,
                                 window_size=5))

print(f"{'step':>4} {'loss':>6} {'simple lr':>10} {'detailed lr':>11}")
for t, loss in enumerate(losses):
    print(f"{t:>4} {loss:>6.2f} {simple.step(loss):>10.4f} {detailed.step(loss):>11.4f}")

print("\nClosed-form baselines at a few checkpoints (T=100):")
for kind in ("cosine", "linear", "exponential"):
    cfg = BaselineConfig(kind=kind, initial_lr=1e-2, min_lr=1e-4, total_steps=100,
                         decay_rate=0.955)
    row = "  ".join(f"t={t}: {baseline_lr(cfg, t):.2e}" for t in (0, 25, 50, 100))
    print(f"  {kind:<12} {row}")
