"""Learning-rate schedulers: the greedy loss-reactive scheduler and six baselines.

The greedy scheduler comes in two forms. The minimal form compares each
observed loss against the previous one and divides the LR by a factor F on
improvement (multiplies on deterioration). The detailed form adds the
production controls: a relative improvement threshold, patience counters for
good/bad streaks, cooldown/warmup windows that suppress reactions right after
an adjustment, optional streaming-average smoothing of the metric, LR bounds,
and a state reset that can fire after the LR has sat at its lower bound.

Baselines are closed-form schedules (cosine, cosine with restarts,
exponential, linear, polynomial, constant with linear warmup) driven purely by
the step index.

All schedulers expose ``step(observed_metric) -> lr`` and are deterministic:
the same config and metric sequence reproduce the same LR sequence bit for
bit.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field


class SchedulerConfigError(ValueError):
    """A scheduler config violates one of its invariants."""


class InvalidMetricError(ValueError):
    """A non-finite metric was fed to a scheduler; state is unchanged."""


BASELINE_KINDS = (
    "cosine",
    "cosine_restarts",
    "exponential",
    "linear",
    "polynomial",
    "constant_warmup",
)


@dataclass(frozen=True)
class GreedyConfig:
    """Configuration for the greedy scheduler (both forms).

    factor_F is the multiplicative factor in (0, 1): LR is divided by it on a
    good streak and multiplied by it on a bad streak. patience is the number
    of consecutive good (bad) steps beyond which an increase (reduction)
    fires. threshold is the relative improvement required to beat the best
    metric seen. cooldown/warmup are the post-adjustment windows during which
    bad (good) steps are ignored. eps is the minimum LR change considered
    meaningful; smaller adjustments are skipped. reset_start arms the
    reset countdown that ticks while the LR sits at min_lr.
    """

    factor_F: float = 0.95
    patience: int = 10
    threshold: float = 0.0
    cooldown: int = 0
    warmup: int = 0
    min_lr: float = 1e-6
    max_lr: float = 1.0
    eps: float = 1e-8
    smoothing_enabled: bool = False
    window_size: int = 50
    reset_start: int = 10_000
    mode: str = "min"
    initial_lr: float = 1e-3

    def __post_init__(self):
        if not (0.0 < self.factor_F < 1.0):
            raise SchedulerConfigError(f"factor_F must be in (0, 1), got {self.factor_F}")
        if not (0.0 < self.min_lr <= self.initial_lr <= self.max_lr):
            raise SchedulerConfigError(
                "requires 0 < min_lr <= initial_lr <= max_lr, got "
                f"min_lr={self.min_lr}, initial_lr={self.initial_lr}, max_lr={self.max_lr}"
            )
        if self.window_size < 1:
            raise SchedulerConfigError(f"window_size must be >= 1, got {self.window_size}")
        if self.mode not in ("min", "max"):
            raise SchedulerConfigError(f"mode must be 'min' or 'max', got {self.mode!r}")
        for name in ("patience", "cooldown", "warmup", "reset_start"):
            if getattr(self, name) < 0:
                raise SchedulerConfigError(f"{name} must be nonnegative")
        if self.threshold < 0 or self.eps < 0:
            raise SchedulerConfigError("threshold and eps must be nonnegative")


@dataclass
class GreedyState:
    """Mutable per-run state of the greedy scheduler."""

    current_lr: float
    best: float
    num_bad_epochs: int = 0
    num_good_epochs: int = 0
    cooldown_counter: int = 0
    warmup_counter: int = 0
    last_epoch: int = 0
    reset_countdown: int = 0
    smoothing_buffer: deque = field(default_factory=deque)


def mode_worse(mode: str) -> float:
    """The worst possible metric for a mode; the sentinel `best` starts at."""
    return -math.inf if mode == "max" else math.inf


def greedy_init(cfg: GreedyConfig) -> GreedyState:
    """Fresh state: best at the mode-worst sentinel, all counters zero."""
    return GreedyState(
        current_lr=cfg.initial_lr,
        best=mode_worse(cfg.mode),
        reset_countdown=cfg.reset_start,
    )


def is_better(a: float, best: float, mode: str, threshold: float) -> bool:
    """Whether metric `a` improves on `best` by more than the relative threshold.

    min mode: a < best * (1 - threshold); max mode: a > best * (1 + threshold).
    Against the mode-worst sentinel (infinite best) any finite value improves.
    """
    if math.isinf(best):
        return math.isfinite(a)
    if mode == "max":
        return a > best * (1.0 + threshold)
    return a < best * (1.0 - threshold)


def smooth(buffer: deque, window_size: int, value: float) -> float:
    """Push `value` into the streaming window and return the current average.

    The buffer keeps at most `window_size` values; with fewer observations the
    average runs over what exists.
    """
    buffer.append(value)
    while len(buffer) > window_size:
        buffer.popleft()
    return sum(buffer) / len(buffer)


def reduce_lr(state: GreedyState, cfg: GreedyConfig) -> None:
    """Multiply the LR by F, floored at min_lr; skip changes smaller than eps."""
    old = state.current_lr
    new = max(old * cfg.factor_F, cfg.min_lr)
    if old - new > cfg.eps:
        state.current_lr = new


def increase_lr(state: GreedyState, cfg: GreedyConfig) -> None:
    """Divide the LR by F, capped at max_lr; skip changes smaller than eps."""
    old = state.current_lr
    new = min(old / cfg.factor_F, cfg.max_lr)
    if new - old > cfg.eps:
        state.current_lr = new


def _reset(state: GreedyState, cfg: GreedyConfig) -> None:
    """Clear controller state (best, counters, smoothing) but keep the LR."""
    state.best = mode_worse(cfg.mode)
    state.reset_countdown = cfg.reset_start
    state.cooldown_counter = 0
    state.num_bad_epochs = 0
    state.warmup_counter = 0
    state.num_good_epochs = 0
    state.smoothing_buffer.clear()


def _require_finite(metric: float) -> float:
    metric = float(metric)
    if not math.isfinite(metric):
        raise InvalidMetricError(f"metric must be finite, got {metric}")
    return metric


def greedy_simple_step(state: GreedyState, cfg: GreedyConfig, loss: float) -> float:
    """One step of the minimal form: compare against the previous loss only.

    Improvement divides the LR by F, anything else (including equality)
    multiplies by F; the result is clamped to [min_lr, max_lr]. `state.best`
    holds the previous loss and is overwritten unconditionally.
    """
    loss = _require_finite(loss)
    if loss < state.best:
        lr = state.current_lr / cfg.factor_F
    else:
        lr = state.current_lr * cfg.factor_F
    state.current_lr = min(max(lr, cfg.min_lr), cfg.max_lr)
    state.best = loss
    state.last_epoch += 1
    return state.current_lr


def greedy_detailed_step(state: GreedyState, cfg: GreedyConfig, raw_metric: float) -> float:
    """One step of the detailed form; returns the (possibly adjusted) LR.

    Order of operations per step: smooth the metric, update the good/bad
    streak against `best`, let an active cooldown (warmup) swallow the bad
    (good) count, fire a reduction or increase once a streak exceeds
    patience, perform a full controller reset when the countdown has hit
    zero, and finally tick the countdown if the LR sits at its lower bound.
    """
    raw_metric = _require_finite(raw_metric)
    current = raw_metric
    if cfg.smoothing_enabled:
        current = smooth(state.smoothing_buffer, cfg.window_size, raw_metric)
    state.last_epoch += 1

    if is_better(current, state.best, cfg.mode, cfg.threshold):
        state.best = current
        state.num_bad_epochs = 0
        state.num_good_epochs += 1
    else:
        state.num_bad_epochs += 1
        state.num_good_epochs = 0

    if state.cooldown_counter > 0:
        state.cooldown_counter -= 1
        state.num_bad_epochs = 0
    if state.warmup_counter > 0:
        state.warmup_counter -= 1
        state.num_good_epochs = 0

    if state.num_bad_epochs > cfg.patience:
        reduce_lr(state, cfg)
        state.cooldown_counter = cfg.cooldown
        state.num_bad_epochs = 0
    if state.num_good_epochs > cfg.patience:
        increase_lr(state, cfg)
        state.warmup_counter = cfg.warmup
        state.num_good_epochs = 0

    if state.reset_countdown == 0:
        _reset(state, cfg)
    if state.current_lr <= cfg.min_lr + cfg.eps:
        # tick toward a reset while stuck at the lower bound; never below zero
        state.reset_countdown = max(0, state.reset_countdown - 1)

    return state.current_lr


@dataclass(frozen=True)
class BaselineConfig:
    """Closed-form baseline schedule parameters.

    total_steps is the horizon T; warmup_steps applies to constant_warmup,
    restart_period to cosine_restarts, decay_rate to exponential and power to
    polynomial. Unused fields are ignored by the other kinds.
    """

    kind: str
    initial_lr: float
    total_steps: int
    min_lr: float = 0.0
    warmup_steps: int = 0
    restart_period: int = 1
    decay_rate: float = 1.0
    power: float = 1.0

    def __post_init__(self):
        if self.kind not in BASELINE_KINDS:
            raise SchedulerConfigError(f"unknown baseline kind {self.kind!r}")
        if not (0.0 <= self.min_lr <= self.initial_lr):
            raise SchedulerConfigError(
                f"requires 0 <= min_lr <= initial_lr, got {self.min_lr}, {self.initial_lr}"
            )
        if self.total_steps < 1:
            raise SchedulerConfigError("total_steps must be positive")
        if not (0 <= self.warmup_steps < self.total_steps):
            raise SchedulerConfigError("requires 0 <= warmup_steps < total_steps")
        if self.restart_period < 1:
            raise SchedulerConfigError("restart_period must be positive")
        if not (0.0 < self.decay_rate <= 1.0):
            raise SchedulerConfigError("decay_rate must be in (0, 1]")
        if self.power <= 0:
            raise SchedulerConfigError("power must be positive")


def baseline_lr(cfg: BaselineConfig, t: int) -> float:
    """LR of a closed-form schedule at step t, for 0 <= t <= total_steps."""
    if not (0 <= t <= cfg.total_steps):
        raise ValueError(f"step {t} outside [0, {cfg.total_steps}]")
    init, lo, T = cfg.initial_lr, cfg.min_lr, cfg.total_steps
    if cfg.kind == "cosine":
        return lo + 0.5 * (init - lo) * (1.0 + math.cos(math.pi * t / T))
    if cfg.kind == "cosine_restarts":
        tc, Tc = t % cfg.restart_period, cfg.restart_period
        return lo + 0.5 * (init - lo) * (1.0 + math.cos(math.pi * tc / Tc))
    if cfg.kind == "exponential":
        return max(lo, init * cfg.decay_rate**t)
    if cfg.kind == "linear":
        return init + (lo - init) * t / T
    if cfg.kind == "polynomial":
        return lo + (init - lo) * (1.0 - t / T) ** cfg.power
    # constant_warmup: linear ramp over warmup_steps, then flat
    if t < cfg.warmup_steps:
        return init * t / cfg.warmup_steps
    return init


class GreedyLR:
    """Detailed greedy scheduler behind the ``step(metric) -> lr`` interface."""

    def __init__(self, cfg: GreedyConfig):
        self.cfg = cfg
        self.state = greedy_init(cfg)

    @property
    def lr(self) -> float:
        return self.state.current_lr

    def step(self, metric: float) -> float:
        return greedy_detailed_step(self.state, self.cfg, metric)


class GreedyLRSimple:
    """Minimal greedy scheduler: one comparison against the previous loss."""

    def __init__(self, cfg: GreedyConfig):
        self.cfg = cfg
        self.state = greedy_init(cfg)

    @property
    def lr(self) -> float:
        return self.state.current_lr

    def step(self, loss: float) -> float:
        return greedy_simple_step(self.state, self.cfg, loss)


class BaselineScheduler:
    """Closed-form schedule driven by an internal step counter.

    ``step`` ignores the metric (it exists so all schedulers share one
    interface) and returns the LR for the current step index, starting at 0.
    """

    def __init__(self, cfg: BaselineConfig):
        self.cfg = cfg
        self.t = 0

    @property
    def lr(self) -> float:
        return baseline_lr(self.cfg, min(self.t, self.cfg.total_steps))

    def step(self, metric: float | None = None) -> float:
        lr = baseline_lr(self.cfg, self.t)
        self.t += 1
        return lr


def make_scheduler(cfg: GreedyConfig | BaselineConfig, simple: bool = False):
    """Instantiate the scheduler matching a config object."""
    if isinstance(cfg, GreedyConfig):
        return GreedyLRSimple(cfg) if simple else GreedyLR(cfg)
    return BaselineScheduler(cfg)
