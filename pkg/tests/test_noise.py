"""Noise regime tests: formulas, statistics, and the gradient-separation invariant."""

import numpy as np
import pytest

from greedylr.noise import NoiseSpec, NoiseState, gradient_untouched_check, perturb
from greedylr.problems import make_problem
from greedylr.runner import RunConfig, run_one
from greedylr.schedulers import BaselineConfig


def fresh_state(spec, seed=0):
    return NoiseState(spec, np.random.Generator(np.random.Philox(np.random.SeedSequence(seed))))


def test_none_is_identity():
    spec = NoiseSpec(kind="none")
    state = fresh_state(spec)
    for t, loss in enumerate([1.0, -2.0, 0.5]):
        assert perturb(state, spec, loss, t) == loss


def test_gaussian_zero_strength_is_identity():
    spec = NoiseSpec(kind="gaussian", strength=0.0)
    state = fresh_state(spec)
    assert perturb(state, spec, 3.14, 0) == 3.14


def test_adversarial_masks_improvement():
    spec = NoiseSpec(kind="adversarial", strength=1.0)
    state = fresh_state(spec)
    assert perturb(state, spec, 1.0, 0) == 1.0  # no previous loss yet
    assert perturb(state, spec, 0.8, 1) == pytest.approx(1.0)  # 0.8 + 1.0 * 0.2


def test_adversarial_ignores_deterioration():
    spec = NoiseSpec(kind="adversarial", strength=5.0)
    state = fresh_state(spec)
    perturb(state, spec, 1.0, 0)
    assert perturb(state, spec, 1.5, 1) == 1.5  # no improvement to mask


def test_gaussian_empirical_std():
    strength = 0.7
    spec = NoiseSpec(kind="gaussian", strength=strength)
    state = fresh_state(spec, seed=5)
    diffs = [perturb(state, spec, 1.0, t) - 1.0 for t in range(10_000)]
    assert strength * 0.95 <= np.std(diffs) <= strength * 1.05


def test_random_spike_frequency():
    spec = NoiseSpec(kind="random_spike", strength=2.0, spike_prob=0.02)
    state = fresh_state(spec, seed=6)
    hits = sum(perturb(state, spec, 1.0, t) != 1.0 for t in range(10_000))
    assert 0.015 <= hits / 10_000 <= 0.025


def test_periodic_spike_steps_exact():
    spec = NoiseSpec(kind="periodic_spike", strength=1.0, period=50)
    state = fresh_state(spec)
    spiked = [t for t in range(301) if perturb(state, spec, 1.0, t) != 1.0]
    assert spiked == [50, 100, 150, 200, 250, 300]


def test_periodic_spike_default_period_drawn_per_run():
    spec = NoiseSpec(kind="periodic_spike", strength=1.0)
    periods = {fresh_state(spec, seed=s).period for s in range(30)}
    assert all(50 <= p <= 100 for p in periods)
    assert len(periods) > 3


def test_spike_magnitude_proportional_to_running_mean():
    spec = NoiseSpec(kind="periodic_spike", strength=2.0, period=2)
    state = fresh_state(spec)
    perturb(state, spec, 4.0, 0)
    perturb(state, spec, 2.0, 1)
    # at t=2 the running mean of |loss| is (4 + 2 + 3) / 3 = 3
    assert perturb(state, spec, 3.0, 2) == pytest.approx(3.0 + 2.0 * 3.0)


def test_invalid_specs_rejected():
    with pytest.raises(ValueError):
        NoiseSpec(kind="solar_flare")
    with pytest.raises(ValueError):
        NoiseSpec(kind="gaussian", strength=-1.0)
    with pytest.raises(ValueError):
        NoiseSpec(kind="random_spike", spike_prob=1.5)


def test_gradient_untouched_for_all_kinds():
    p = make_problem("quadratic_sum", 4, 3, seed=0)
    x = np.random.default_rng(0).normal(size=4)
    for spec in [
        NoiseSpec(kind="none"),
        NoiseSpec(kind="gaussian", strength=10.0),
        NoiseSpec(kind="periodic_spike", strength=4.0, period=2),
        NoiseSpec(kind="random_spike", strength=4.0, spike_prob=0.5),
        NoiseSpec(kind="adversarial", strength=5.0),
    ]:
        assert gradient_untouched_check(p, x, spec)


def test_constant_lr_streams_identical_across_noise_kinds():
    """With a constant-LR scheduler the true-loss and gradient-norm streams
    must be bitwise identical whatever the noise, since noise only feeds the
    scheduler."""
    p = make_problem("mlp", 3, 10, seed=3)
    sched = BaselineConfig(kind="constant_warmup", initial_lr=0.05, total_steps=60,
                           warmup_steps=0)
    specs = {
        "none": NoiseSpec(kind="none"),
        "gaussian": NoiseSpec(kind="gaussian", strength=3.0),
        "periodic": NoiseSpec(kind="periodic_spike", strength=5.0, period=7),
        "random": NoiseSpec(kind="random_spike", strength=5.0, spike_prob=0.3),
        "adversarial": NoiseSpec(kind="adversarial", strength=4.0),
    }
    traces = {
        name: run_one(RunConfig(problem=p, scheduler=sched, noise=spec,
                                total_steps=60, seed=9))
        for name, spec in specs.items()
    }
    ref = traces["none"]
    for name, tr in traces.items():
        assert tr.true_loss.tobytes() == ref.true_loss.tobytes(), name
        assert tr.grad_norm.tobytes() == ref.grad_norm.tobytes(), name
