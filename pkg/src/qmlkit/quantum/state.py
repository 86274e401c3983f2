"""Dense statevectors with little-endian site order (site 0 is the lowest bit)."""
from __future__ import annotations

from collections import Counter

import numpy as np

from .gates import Gate

NORM_TOL = 1e-10
MAX_SITES = 12


def bits_of(index: int, n_sites: int) -> tuple[int, ...]:
    """Site-ordered bits of a basis index: ``bits[s] = (index >> s) & 1``."""
    return tuple((index >> s) & 1 for s in range(n_sites))


def index_of(bits) -> int:
    return sum(int(b) << s for s, b in enumerate(bits))


def bitstring(index: int, n_sites: int) -> str:
    """Basis label written site 0 first, e.g. ``'10'`` means site 0 in |1>."""
    return "".join(str(b) for b in bits_of(index, n_sites))


class StateVector:
    __slots__ = ("amplitudes", "n_sites")

    def __init__(self, amplitudes, normalize: bool = False):
        amps = np.asarray(amplitudes, dtype=complex).reshape(-1)
        n = int(round(np.log2(amps.size))) if amps.size else -1
        if n < 0 or 1 << n != amps.size:
            raise ValueError("amplitude count must be a power of two")
        norm = np.linalg.norm(amps)
        if normalize:
            if norm == 0:
                raise ValueError("cannot normalize the zero vector")
            amps = amps / norm
        elif abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state norm {norm} differs from 1")
        self.amplitudes = amps
        self.n_sites = n

    @classmethod
    def basis(cls, bits) -> "StateVector":
        bits = tuple(bits)
        amps = np.zeros(1 << len(bits), dtype=complex)
        amps[index_of(bits)] = 1.0
        return cls(amps)

    @classmethod
    def zeros(cls, n_sites: int) -> "StateVector":
        return cls.basis((0,) * n_sites)

    @classmethod
    def ones(cls, n_sites: int) -> "StateVector":
        return cls.basis((1,) * n_sites)

    @classmethod
    def random(cls, n_sites: int, rng=None) -> "StateVector":
        rng = np.random.default_rng() if rng is None else rng
        v = rng.normal(size=1 << n_sites) + 1j * rng.normal(size=1 << n_sites)
        return cls(v, normalize=True)

    def __len__(self):
        return self.amplitudes.size

    def __repr__(self):
        return f"StateVector(n_sites={self.n_sites})"

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def inner(self, other: "StateVector") -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def equals_up_to_phase(self, other: "StateVector", tol: float = 1e-10) -> bool:
        return abs(self.inner(other)) > 1.0 - tol

    def apply(self, *gates: Gate) -> "StateVector":
        out = self
        for g in gates:
            out = apply_gate(out, g)
        return out


def _check_targets(targets, n_sites):
    for t in targets:
        if not 0 <= t < n_sites:
            raise IndexError(f"target {t} out of range for {n_sites} sites")
    if len(set(targets)) != len(targets):
        raise ValueError(f"duplicate targets {targets}")


def apply_matrix(amps: np.ndarray, matrix: np.ndarray, targets, n_sites: int) -> np.ndarray:
    """Apply a k-site matrix whose first target is the most significant local bit."""
    targets = tuple(targets)
    _check_targets(targets, n_sites)
    k = len(targets)
    psi = amps.reshape((2,) * n_sites)
    # site s lives on tensor axis n_sites - 1 - s
    axes = [n_sites - 1 - t for t in targets]
    psi = np.moveaxis(psi, axes, range(k))
    shape = psi.shape
    psi = (matrix @ psi.reshape(1 << k, -1)).reshape(shape)
    return np.moveaxis(psi, range(k), axes).reshape(-1)


def apply_gate(state: StateVector, gate: Gate) -> StateVector:
    out = StateVector.__new__(StateVector)
    out.amplitudes = apply_matrix(state.amplitudes, gate.matrix(), gate.targets, state.n_sites)
    out.n_sites = state.n_sites
    return out


def sample_bitstrings(state: StateVector, n: int, rng=None) -> Counter:
    """Born-rule samples by inverse-transform over the cumulative distribution.

    Returns a Counter keyed by site-0-first bit labels (see :func:`bitstring`).
    """
    if n <= 0:
        raise ValueError("n must be positive")
    rng = np.random.default_rng() if rng is None else rng
    cdf = np.cumsum(state.probabilities())
    cdf /= cdf[-1]
    idx = np.searchsorted(cdf, rng.random(n), side="right")
    idx = np.minimum(idx, len(cdf) - 1)
    counts = np.bincount(idx, minlength=len(cdf))
    return Counter({bitstring(i, state.n_sites): int(c) for i, c in enumerate(counts) if c})


def reduced_density_matrix(state: StateVector, cut: int) -> np.ndarray:
    """Density matrix of sites [0, cut) after tracing out sites [cut, L)."""
    m = state.amplitudes.reshape(1 << (state.n_sites - cut), 1 << cut)
    return m.T @ m.conj()


def entanglement_entropy(state: StateVector, cut: int) -> float:
    """Von Neumann entropy (natural log) between sites [0, cut) and [cut, L)."""
    if not 0 < cut < state.n_sites:
        raise ValueError(f"cut must lie strictly between 0 and {state.n_sites}")
    m = state.amplitudes.reshape(1 << (state.n_sites - cut), 1 << cut)
    s = np.linalg.svd(m, compute_uv=False)
    lam = s * s
    lam = lam[lam > 1e-14]
    return max(0.0, float(-(lam * np.log(lam)).sum()))
