"""Additive loss perturbations for robustness benchmarking.

Five regimes: none, gaussian, periodic_spike, random_spike, adversarial.
Noise touches only the observed loss handed to the scheduler; gradients and
true losses are computed from the unperturbed objective, so constant-LR runs
are bitwise identical across all noise kinds.

Spike magnitudes are proportional to the running mean of |true loss| so the
regimes stay comparable across problems with different loss scales. The
adversarial regime adds strength * max(0, l_prev - l_cur): exactly the recent
improvement, masking apparent progress.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

import numpy as np

NOISE_KINDS = ("none", "gaussian", "periodic_spike", "random_spike", "adversarial")


@dataclass(frozen=True)
class NoiseSpec:
    kind: str = "none"
    strength: float = 0.0
    period: int | None = None  # periodic_spike; None -> drawn per run from [50, 100]
    spike_prob: float = 0.02  # random_spike

    def __post_init__(self):
        if self.kind not in NOISE_KINDS:
            raise ValueError(f"unknown noise kind {self.kind!r}")
        if self.strength < 0:
            raise ValueError("strength must be nonnegative")
        if self.period is not None and self.period < 1:
            raise ValueError("period must be a positive integer")
        if not (0.0 <= self.spike_prob <= 1.0):
            raise ValueError("spike_prob must lie in [0, 1]")


class NoiseState:
    """Per-run noise state: a dedicated RNG stream plus loss memory."""

    def __init__(self, spec: NoiseSpec, rng: np.random.Generator):
        self.rng = rng
        self.prev_losses: deque[float] = deque(maxlen=2)
        self._abs_sum = 0.0
        self._count = 0
        self.period = spec.period
        if spec.kind == "periodic_spike" and self.period is None:
            self.period = int(rng.integers(50, 101))

    def _observe(self, true_loss: float) -> float:
        """Update running stats; returns the running mean of |true loss|."""
        self._abs_sum += abs(true_loss)
        self._count += 1
        return self._abs_sum / self._count


def perturb(state: NoiseState, spec: NoiseSpec, true_loss: float, t: int) -> float:
    """Observed loss at step t; may be negative (gaussian) and the scheduler
    must tolerate that."""
    if not math.isfinite(true_loss):
        raise ValueError("true_loss must be finite")
    prev = state.prev_losses[-1] if state.prev_losses else None
    scale = state._observe(true_loss)
    state.prev_losses.append(true_loss)

    if spec.kind == "none":
        return true_loss
    if spec.kind == "gaussian":
        return true_loss + spec.strength * state.rng.standard_normal()
    if spec.kind == "periodic_spike":
        if t > 0 and t % state.period == 0:
            return true_loss + spec.strength * abs(scale)
        return true_loss
    if spec.kind == "random_spike":
        if state.rng.uniform() < spec.spike_prob:
            return true_loss + spec.strength * abs(scale)
        return true_loss
    # adversarial: mask recent improvement
    improvement = max(0.0, (prev - true_loss)) if prev is not None else 0.0
    return true_loss + spec.strength * improvement


def gradient_untouched_check(problem, x: np.ndarray, spec: NoiseSpec, seed: int = 0) -> bool:
    """Verify the gradient oracle is bitwise unaffected by any noise spec.

    Perturbation applies to the observed metric only, so evaluating the
    component gradient before and after driving the noise machinery must give
    identical bits.
    """
    from .problems import eval_component

    _, g_before = eval_component(problem, 0, x)
    state = NoiseState(spec, np.random.Generator(np.random.Philox(np.random.SeedSequence(seed))))
    loss, _ = eval_component(problem, 0, x)
    for t in range(5):
        perturb(state, spec, loss, t)
    _, g_after = eval_component(problem, 0, x)
    return bool(np.array_equal(g_before, g_after)) and g_before.tobytes() == g_after.tobytes()
