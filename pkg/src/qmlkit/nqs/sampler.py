"""Metropolis sampling of |psi(b)|^2 over bitstrings with batched independent chains."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class McmcChain:
    """Current configurations of ``n_chains`` parallel chains and their acceptance counts."""

    states: np.ndarray
    accepted: int = 0
    proposed: int = 0
    rng: np.random.Generator = field(default_factory=np.random.default_rng)

    @classmethod
    def start(cls, n_sites: int, n_chains: int, rng) -> "McmcChain":
        return cls(rng.integers(0, 1 << n_sites, size=n_chains, dtype=np.int64), rng=rng)

    @property
    def acceptance(self) -> float:
        return self.accepted / self.proposed if self.proposed else 0.0

    def reset_counts(self) -> None:
        self.accepted = self.proposed = 0


def propose(states: np.ndarray, n_sites: int, rng, kernel: str = "flip") -> np.ndarray:
    """Symmetric proposals: ``flip`` one uniform site, ``pair`` two distinct sites,
    ``mixed`` either with probability 1/2."""
    n = states.size
    one = np.int64(1) << rng.integers(0, n_sites, n)
    if kernel == "flip":
        return states ^ one
    i = rng.integers(0, n_sites, n)
    j = (i + rng.integers(1, n_sites, n)) % n_sites
    two = (np.int64(1) << i) | (np.int64(1) << j)
    if kernel == "pair":
        return states ^ two
    if kernel == "mixed":
        return states ^ np.where(rng.random(n) < 0.5, one, two)
    raise ValueError(f"unknown proposal kernel {kernel!r}")


def metropolis_steps(model, chain: McmcChain, n_steps: int, kernel: str = "flip") -> None:
    rng = chain.rng
    p_cur = model.prob_unnormalized(chain.states)
    for _ in range(n_steps):
        prop = propose(chain.states, model.n_sites, rng, kernel)
        p_new = model.prob_unnormalized(prop)
        u = rng.random(prop.size)
        # accept with min(1, p_new / p_cur), written without division
        acc = u * p_cur < p_new
        chain.states = np.where(acc, prop, chain.states)
        p_cur = np.where(acc, p_new, p_cur)
        chain.accepted += int(acc.sum())
        chain.proposed += acc.size


def mcmc_sample(model, n: int, burn_in: int | None = None, thinning: int | None = None, rng=None,
                n_chains: int = 1, chain: McmcChain | None = None, kernel: str = "flip") -> tuple[np.ndarray, McmcChain]:
    """``n`` configurations pooled from parallel chains.

    ``burn_in`` and ``thinning`` count proposals per chain; defaults are
    10 L sweeps of L proposals and L proposals between kept samples. Passing a
    ``chain`` continues it (persistent chains), otherwise fresh random starts.
    """
    if n < 1:
        raise ValueError("n must be positive")
    L = model.n_sites
    burn_in = 10 * L * L if burn_in is None else burn_in
    thinning = L if thinning is None else thinning
    if chain is None:
        rng = np.random.default_rng() if rng is None else rng
        chain = McmcChain.start(L, n_chains, rng)
    metropolis_steps(model, chain, burn_in, kernel)
    rounds = -(-n // chain.states.size)
    out = []
    for _ in range(rounds):
        metropolis_steps(model, chain, thinning, kernel)
        out.append(chain.states.copy())
    return np.concatenate(out)[:n], chain
