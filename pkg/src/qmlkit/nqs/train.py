"""Stochastic ground-state search with a neural wavefunction."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..optim import Adam, Optimizer
from ..quantum import PauliHamiltonian
from .estimator import energy_and_grad
from .sampler import McmcChain, mcmc_sample


@dataclass
class NqsTrace:
    energy: list[float] = field(default_factory=list)
    stderr: list[float] = field(default_factory=list)
    variance: list[float] = field(default_factory=list)
    acceptance: list[float] = field(default_factory=list)

    def __len__(self):
        return len(self.energy)

    def rows(self):
        return list(zip(range(len(self.energy)), self.energy, self.stderr, self.variance, self.acceptance))


def train_nqs(model, h: PauliHamiltonian, optimizer: Optimizer | None = None, epochs: int = 1000,
              samples: int = 1024, rng=None, n_chains: int = 64, kernel: str = "mixed",
              burn_in: int | None = None, thinning: int | None = None) -> NqsTrace:
    """Persistent-chain VMC. The parameters with the lowest
    (energy + 2 stderr) seen are restored at the end."""
    if epochs < 1 or samples < 2:
        raise ValueError("epochs must be positive and samples at least 2")
    rng = np.random.default_rng() if rng is None else rng
    optimizer = Adam(lr=0.01) if optimizer is None else optimizer
    chain = McmcChain.start(model.n_sites, n_chains, rng)
    trace = NqsTrace()
    best, best_flat = np.inf, model.get_flat()
    warm = burn_in
    for epoch in range(epochs):
        chain.reset_counts()
        x, chain = mcmc_sample(model, samples, burn_in=warm, thinning=thinning, chain=chain, kernel=kernel)
        warm = 0  # chains persist across epochs, so only the first call burns in
        est = energy_and_grad(model, x, h)
        trace.energy.append(est.energy)
        trace.stderr.append(est.stderr)
        trace.variance.append(est.variance)
        trace.acceptance.append(chain.acceptance)
        score = est.energy + 2 * est.stderr
        if score < best:
            best, best_flat = score, model.get_flat()
        optimizer.step(model.params, est.gradient)
    model.set_flat(best_flat)
    return trace
