"""QAOA for weighted Max-Cut with a brute-force oracle."""
from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass

import numpy as np

from ..optim import Adam, Optimizer
from ..quantum import MAX_SITES, H, PauliHamiltonian, sample_bitstrings, zz_weighted
from .circuit import ParamCircuit, energy_and_grad
from .vqe import TrainTrace, random_init


@dataclass(frozen=True)
class MaxCutGraph:
    weights: np.ndarray

    def __post_init__(self):
        w = np.array(self.weights, dtype=float)
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise ValueError("weights must be a square matrix")
        if not np.allclose(w, w.T) or np.any(np.diag(w) != 0) or np.any(w < 0):
            raise ValueError("weights must be symmetric, non-negative, zero on the diagonal")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @classmethod
    def from_edges(cls, n: int, edges) -> "MaxCutGraph":
        w = np.zeros((n, n))
        for e in edges:
            i, j, *rest = e
            w[i, j] = w[j, i] = rest[0] if rest else 1.0
        return cls(w)

    @classmethod
    def random(cls, n: int, rng, p_edge: float = 0.6, low: float = 0.1, high: float = 1.0) -> "MaxCutGraph":
        """Erdos-Renyi edges with uniform(low, high) weights."""
        w = np.zeros((n, n))
        for i, j in itertools.combinations(range(n), 2):
            if rng.random() < p_edge:
                w[i, j] = w[j, i] = rng.uniform(low, high)
        return cls(w)

    @property
    def n(self) -> int:
        return len(self.weights)

    def edges(self):
        return [(i, j, self.weights[i, j]) for i, j in itertools.combinations(range(self.n), 2)
                if self.weights[i, j] != 0]


def cut_value(graph: MaxCutGraph, bits) -> float:
    """sum_{i<j} W_ij (1 - s_i s_j) / 2 with s = 1 - 2b; ``bits`` indexed by site."""
    s = 1 - 2 * np.array([int(b) for b in bits])
    w = graph.weights
    return float(np.sum(np.triu(w, 1) * (1 - np.outer(s, s))) / 2)


def brute_force_maxcut(graph: MaxCutGraph) -> tuple[float, list[str]]:
    """Optimal cut value and all optimal site-0-first bitstrings."""
    if graph.n > MAX_SITES:
        raise ValueError(f"brute force limited to {MAX_SITES} nodes")
    best, arg = -np.inf, []
    for bits in itertools.product((0, 1), repeat=graph.n):
        v = cut_value(graph, bits)
        key = "".join(map(str, bits))
        if v > best + 1e-12:
            best, arg = v, [key]
        elif abs(v - best) <= 1e-12:
            arg.append(key)
    return best, arg


def build_qaoa(graph: MaxCutGraph, p: int) -> tuple[PauliHamiltonian, ParamCircuit]:
    """H_C = sum W_ij Z_i Z_j and the depth-p circuit, parameters (g1, b1, ..., gp, bp).

    exp(-i g W_ij Z_i Z_j) = Rzz(2 g W_ij); exp(-i b sum X) = prod Rx(2 b).
    """
    if p < 1:
        raise ValueError("p must be at least 1")
    cost = zz_weighted(graph.weights)
    c = ParamCircuit(graph.n, initial=(0,) * graph.n)
    for site in range(graph.n):
        c.add(H(site))
    for layer in range(p):
        gamma, beta = 2 * layer, 2 * layer + 1
        for i, j, w in graph.edges():
            c.add_rotation("Rzz", (i, j), gamma, 2.0 * w)
        for site in range(graph.n):
            c.add_rotation("Rx", (site,), beta, 2.0)
        c.n_params = max(c.n_params, 2 * p)
    return cost, c


def histogram_peak(hist: Counter) -> str:
    """Most frequent bitstring; ties go to the lexicographically smallest."""
    top = max(hist.values())
    return min(k for k, v in hist.items() if v == top)


@dataclass
class MaxCutResult:
    bitstring: str
    cut: float
    histogram: Counter
    traces: list[TrainTrace]
    thetas: list[np.ndarray]


def solve_maxcut(graph: MaxCutGraph, p: int = 2, restarts: int = 5, optimizer_factory=None,
                 epochs: int = 200, shots: int = 10000, rng=None) -> MaxCutResult:
    """Train each restart on <H_C>, sample its final state, and return the peak of the pooled histogram."""
    if graph.n > MAX_SITES:
        raise ValueError(f"simulation limited to {MAX_SITES} nodes")
    rng = np.random.default_rng() if rng is None else rng
    optimizer_factory = optimizer_factory or (lambda: Adam(lr=0.05))
    cost, circuit = build_qaoa(graph, p)
    hist: Counter = Counter()
    traces, thetas = [], []
    for _ in range(restarts):
        opt: Optimizer = optimizer_factory()
        theta = random_init(circuit.n_params, rng)
        trace = TrainTrace()
        best, best_theta = np.inf, theta.copy()
        for _ in range(epochs):
            e, g = energy_and_grad(circuit, theta, cost)
            trace.energy.append(e)
            if e < best:
                best, best_theta = e, theta.copy()
            opt.step([theta], [g])
        hist.update(sample_bitstrings(circuit.state(best_theta), shots, rng))
        traces.append(trace)
        thetas.append(best_theta)
    peak = histogram_peak(hist)
    return MaxCutResult(peak, cut_value(graph, peak), hist, traces, thetas)
