"""Minimal first-order optimizers consuming per-step learning rates.

Divergence is data, not an exception: non-finite or absurdly large iterates
are detected with `has_diverged` so a run harness can record the event and
stop, rather than crash mid-grid.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

DIVERGENCE_LIMIT = 1e12


@dataclass
class Iterate:
    """Parameter vector plus its step counter."""

    x: np.ndarray
    step: int = 0


@dataclass
class OptimizerState:
    """Adam moment buffers; unused for plain SGD."""

    kind: str = "sgd"
    beta1: float = 0.9
    beta2: float = 0.999
    adam_eps: float = 1e-8
    first_moment: np.ndarray | None = field(default=None, repr=False)
    second_moment: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.kind not in ("sgd", "adam"):
            raise ValueError(f"unknown optimizer kind {self.kind!r}")
        if not (0.0 <= self.beta1 < 1.0 and 0.0 <= self.beta2 < 1.0):
            raise ValueError("betas must lie in [0, 1)")


def _check_dims(x: np.ndarray, g: np.ndarray) -> None:
    if x.shape != g.shape:
        raise ValueError(f"gradient shape {g.shape} does not match iterate shape {x.shape}")


def sgd_step(it: Iterate, g: np.ndarray, lr: float) -> Iterate:
    """x' = x - lr * g."""
    _check_dims(it.x, g)
    return Iterate(x=it.x - lr * g, step=it.step + 1)


def adam_step(state: OptimizerState, it: Iterate, g: np.ndarray, lr: float) -> Iterate:
    """Bias-corrected Adam update (no weight decay)."""
    _check_dims(it.x, g)
    if state.first_moment is None:
        state.first_moment = np.zeros_like(it.x)
        state.second_moment = np.zeros_like(it.x)
    t = it.step + 1
    state.first_moment = state.beta1 * state.first_moment + (1.0 - state.beta1) * g
    state.second_moment = state.beta2 * state.second_moment + (1.0 - state.beta2) * g * g
    m_hat = state.first_moment / (1.0 - state.beta1**t)
    v_hat = state.second_moment / (1.0 - state.beta2**t)
    return Iterate(x=it.x - lr * m_hat / (np.sqrt(v_hat) + state.adam_eps), step=t)


def optimizer_step(state: OptimizerState, it: Iterate, g: np.ndarray, lr: float) -> Iterate:
    if state.kind == "adam":
        return adam_step(state, it, g, lr)
    return sgd_step(it, g, lr)


def has_diverged(x: np.ndarray, loss: float | None = None) -> bool:
    """True if any component (or the loss) is non-finite or beyond 1e12."""
    if loss is not None and (not np.isfinite(loss) or abs(loss) > DIVERGENCE_LIMIT):
        return True
    return bool(not np.all(np.isfinite(x)) or np.any(np.abs(x) > DIVERGENCE_LIMIT))
