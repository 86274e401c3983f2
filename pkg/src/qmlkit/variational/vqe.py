"""Variational quantum eigensolver for the open XXZ chain."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..optim import Adam, Optimizer
from ..quantum import CNOT, PauliHamiltonian, entanglement_entropy, exact_diagonalize, xxz_chain
from .circuit import ParamCircuit, energy, energy_and_grad


def build_xxz(L: int, delta: float) -> PauliHamiltonian:
    """-(1/4) sum_i (X_i X_{i+1} + Y_i Y_{i+1} + delta Z_i Z_{i+1}), open boundaries."""
    return xxz_chain(L, delta, scale=-0.25)


def build_vqe_ansatz(L: int = 4, layers: int = 3) -> ParamCircuit:
    """Per layer: Ry on every site, Rz on every site, then a CNOT ladder; starts from |1...1>."""
    if L < 2 or layers < 1:
        raise ValueError("need L >= 2 and at least one layer")
    c = ParamCircuit(L, initial=(1,) * L)
    for _ in range(layers):
        for kind in ("Ry", "Rz"):
            for site in range(L):
                c.add_rotation(kind, (site,))
        for site in range(L - 1):
            c.add(CNOT(site, site + 1))
    return c


def vqe_energy(circuit: ParamCircuit, theta, h: PauliHamiltonian) -> float:
    return energy(circuit, theta, h)


@dataclass
class TrainTrace:
    energy: list[float] = field(default_factory=list)
    entropy: list[float] = field(default_factory=list)

    def __len__(self):
        return len(self.energy)

    def __post_init__(self):
        for v in self.energy + self.entropy:
            if not np.isfinite(v):
                raise ValueError("trace entries must be finite")

    def rows(self):
        ent = self.entropy or [float("nan")] * len(self.energy)
        return [(k, e, s) for k, (e, s) in enumerate(zip(self.energy, ent))]


def random_init(n_params: int, rng) -> np.ndarray:
    """theta ~ uniform(-pi, pi)."""
    return rng.uniform(-np.pi, np.pi, n_params)


def train_vqe(circuit: ParamCircuit, h: PauliHamiltonian, optimizer: Optimizer | None = None,
              epochs: int = 500, rng=None, theta0=None, track_entropy: bool = True,
              tol: float | None = None, target: float | None = None) -> tuple[np.ndarray, TrainTrace]:
    """Gradient descent on C(theta); returns the best-seen theta and the per-epoch trace.

    ``target`` with ``tol`` stops early once ``C <= target + tol``.
    """
    if epochs < 1:
        raise ValueError("epochs must be positive")
    rng = np.random.default_rng() if rng is None else rng
    optimizer = Adam(lr=0.05) if optimizer is None else optimizer
    theta = random_init(circuit.n_params, rng) if theta0 is None else np.array(theta0, dtype=float)
    cut = circuit.n_sites // 2
    trace = TrainTrace()
    best, best_theta = np.inf, theta.copy()
    for _ in range(epochs):
        e, g = energy_and_grad(circuit, theta, h)
        trace.energy.append(e)
        if track_entropy:
            trace.entropy.append(entanglement_entropy(circuit.state(theta), cut))
        if e < best:
            best, best_theta = e, theta.copy()
        if target is not None and tol is not None and e <= target + tol:
            break
        optimizer.step([theta], [g])
    e = vqe_energy(circuit, theta, h)
    if e < best:
        best_theta = theta.copy()
    return best_theta, trace


@dataclass
class VQEResult:
    delta: float
    theta: np.ndarray
    energy: float
    exact: float
    entropy: float
    exact_entropy: float
    trace: TrainTrace

    @property
    def gap(self) -> float:
        return self.energy - self.exact


def run_vqe(L: int = 4, delta: float = 0.0, layers: int = 3, epochs: int = 500, lr: float = 0.05,
            rng=None) -> VQEResult:
    h = build_xxz(L, delta)
    evals, ground = exact_diagonalize(h)
    circuit = build_vqe_ansatz(L, layers)
    theta, trace = train_vqe(circuit, h, Adam(lr=lr), epochs, rng)
    cut = L // 2
    return VQEResult(delta, theta, vqe_energy(circuit, theta, h), float(evals[0]),
                     entanglement_entropy(circuit.state(theta), cut), entanglement_entropy(ground, cut), trace)
