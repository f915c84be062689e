"""Show what each loss-noise regime does to the observed metric.

Noise is additive on the observed loss only; the gradient stream is computed
from the clean objective, which is what makes paired comparisons across noise
kinds meaningful.
"""

import numpy as np

from greedylr import NoiseSpec, NoiseState, perturb

true_losses = np.concatenate([np.linspace(2.0, 0.4, 40), np.full(20, 0.4)])

specs = {
    "none": NoiseSpec(kind="none"),
    "gaussian": NoiseSpec(kind="gaussian", strength=0.3),
    "periodic_spike": NoiseSpec(kind="periodic_spike", strength=2.0, period=15),
    "random_spike": NoiseSpec(kind="random_spike", strength=2.0, spike_prob=0.1),
    "adversarial": NoiseSpec(kind="adversarial", strength=1.0),
}

for name, spec in specs.items():
    state = NoiseState(spec, np.random.Generator(np.random.Philox(np.random.SeedSequence(0))))
    observed = [perturb(state, spec, float(l), t) for t, l in enumerate(true_losses)]
    deltas = np.asarray(observed) - true_losses
    touched = int(np.sum(deltas != 0))
    print(f"{name:<15} perturbed steps: {touched:>2}/60, "
          f"max |delta| = {np.abs(deltas).max():.3f}, "
          f"mean delta = {deltas.mean():+.4f}")

print("\nadversarial masking, step by step (strength 1.0):")
spec = specs["adversarial"]
state = NoiseState(spec, np.random.Generator(np.random.Philox(np.random.SeedSequence(0))))
for t, l in enumerate([1.0, 0.8, 0.7, 0.9, 0.6]):
    print(f"  t={t} true={l:.2f} observed={perturb(state, spec, l, t):.2f}")
