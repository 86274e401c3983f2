"""Local energies and the variational energy gradient from Monte Carlo samples."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..autodiff import tensor as T
from ..quantum import PauliHamiltonian

DEAD_AMPLITUDE = 1e-300


def connections(h: PauliHamiltonian, indices) -> tuple[np.ndarray, np.ndarray]:
    """For each b, the strings b' = b ^ flip_j and the elements <b|P_j|b'>.

    Shapes are [N, n_terms]. The element is the phase of P_j acting on b',
    since P_j|b'> lands on b.
    """
    idx = np.asarray(indices, dtype=np.int64)
    cols, vals = [], []
    for t in h.terms:
        flip = t.masks[0]
        bp = idx ^ flip
        _, v = t.action(bp)
        cols.append(bp)
        vals.append(v)
    return np.stack(cols, axis=1), np.stack(vals, axis=1)


def local_energies(model, indices, h: PauliHamiltonian) -> np.ndarray:
    """E_loc(b) = sum_b' <b|H|b'> psi(b') / psi(b) for each b."""
    idx = np.asarray(indices, dtype=np.int64)
    if model.n_sites != h.n_sites:
        raise ValueError("model and Hamiltonian site counts differ")
    psi_b = model.psi(idx)
    if np.any(np.abs(psi_b) < DEAD_AMPLITUDE):
        raise FloatingPointError("configuration with vanishing amplitude")
    cols, vals = connections(h, idx)
    # evaluate each distinct connected string once
    uniq, inv = np.unique(cols, return_inverse=True)
    psi_c = model.psi(uniq)[inv.reshape(cols.shape)]
    return np.sum(vals * psi_c, axis=1) / psi_b


def local_energy(model, b, h: PauliHamiltonian) -> complex:
    if not isinstance(b, (int, np.integer)):
        b = sum(int(v) << s for s, v in enumerate(b))
    return complex(local_energies(model, np.array([b]), h)[0])


@dataclass(frozen=True)
class EnergyEstimate:
    energy: float
    stderr: float
    variance: float
    gradient: list[np.ndarray]


def surrogate_loss(model, indices, e_loc: np.ndarray) -> T.Var:
    """Real scalar whose parameter gradient is 2 Re mean[(d log psi)* (E_loc - mean E_loc)].

    With log psi = log a + i phi the estimator splits into
    (2/M) sum [d log a * Re dE + d phi * Im dE].
    """
    d = e_loc - e_loc.mean()
    log_a, phi = model.log_psi(indices)
    m = len(e_loc)
    return (log_a * (2.0 * d.real / m)).sum() + (phi * (2.0 * d.imag / m)).sum()


def energy_and_grad(model, samples, h: PauliHamiltonian, e_loc: np.ndarray | None = None) -> EnergyEstimate:
    """Sample-mean energy, its gradient estimate and the standard error sqrt(var / M)."""
    samples = np.asarray(samples, dtype=np.int64)
    m = samples.size
    if m < 2:
        raise ValueError("need at least two samples")
    if e_loc is None:
        e_loc = local_energies(model, samples, h)
    re = e_loc.real
    var = float(np.var(re, ddof=1))
    grads: list[np.ndarray] = []
    if model.params:
        for p in model.params:
            p.grad = None
        loss = surrogate_loss(model, samples, e_loc)
        loss.backward()
        grads = [np.zeros_like(p.value) if p.grad is None else p.grad.copy() for p in model.params]
    return EnergyEstimate(float(re.mean()), float(np.sqrt(var / m)), var, grads)


def exact_energy(model, h: PauliHamiltonian) -> float:
    """Rayleigh quotient by full summation over 2^L strings."""
    psi = model.psi(np.arange(1 << model.n_sites))
    return float(np.vdot(psi, h.apply(psi)).real / np.vdot(psi, psi).real)
