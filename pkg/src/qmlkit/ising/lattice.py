"""Periodic L x L Ising lattice (J = 1, k_B = 1), Metropolis dynamics and observables."""
from __future__ import annotations

import numpy as np

from ._backend import get_kernel

CHUNK = 64  # sweeps per block of pre-drawn uniforms


class SpinLattice:
    """L x L spins in {-1, +1} with periodic boundaries.

    ``total_energy`` is tracked incrementally from the kernel's dE bookkeeping
    and can be compared with :func:`energy_per_spin` recomputed from scratch.
    """

    __slots__ = ("spins", "total_energy")

    def __init__(self, spins):
        s = np.ascontiguousarray(spins, dtype=np.int8)
        if s.ndim != 2 or s.shape[0] != s.shape[1] or s.shape[0] < 2:
            raise ValueError("spins must be a square L x L array with L >= 2")
        if not np.all(np.abs(s) == 1):
            raise ValueError("spins must be exactly +1 or -1")
        self.spins = s
        self.total_energy = float(bond_sum(s))

    @classmethod
    def aligned(cls, L: int, sign: int = 1) -> "SpinLattice":
        return cls(np.full((L, L), 1 if sign >= 0 else -1, dtype=np.int8))

    @classmethod
    def random(cls, L: int, rng) -> "SpinLattice":
        return cls(rng.choice(np.array([-1, 1], dtype=np.int8), size=(L, L)))

    @classmethod
    def checkerboard(cls, L: int) -> "SpinLattice":
        i, j = np.indices((L, L))
        return cls(np.where((i + j) % 2 == 0, 1, -1))

    @property
    def L(self) -> int:
        return self.spins.shape[0]

    def copy(self) -> "SpinLattice":
        out = SpinLattice.__new__(SpinLattice)
        out.spins = self.spins.copy()
        out.total_energy = self.total_energy
        return out

    def delta_energy(self, i: int, j: int) -> int:
        """Energy change of flipping site (i, j): 2 s (sum of four periodic neighbours)."""
        s, L = self.spins, self.L
        nb = int(s[(i - 1) % L, j]) + int(s[(i + 1) % L, j]) + int(s[i, (j - 1) % L]) + int(s[i, (j + 1) % L])
        return 2 * int(s[i, j]) * nb


def bond_sum(spins: np.ndarray) -> float:
    """-sum over bonds of s_i s_j, each periodic bond counted once."""
    s = spins.astype(np.int64)
    return -float(np.sum(s * np.roll(s, 1, axis=0)) + np.sum(s * np.roll(s, 1, axis=1)))


def acceptance_table(T: float) -> np.ndarray:
    """Index dE // 4: entries 1 and 2 are exp(-4/T) and exp(-8/T)."""
    if not T > 0:
        raise ValueError("temperature must be positive")
    return np.array([1.0, np.exp(-4.0 / T), np.exp(-8.0 / T)])


def metropolis_sweep(lattice: SpinLattice, T: float, rng, n_sweeps: int = 1, kernel: str | None = None) -> SpinLattice:
    """Raster-order sweeps, one attempted flip per site, applied in place.

    Each sweep consumes ``L*L`` uniforms from ``rng`` in site order, so a seed
    fixes the trajectory regardless of which kernel runs it.
    """
    fn = get_kernel(kernel)
    acc = acceptance_table(T)
    L = lattice.L
    done = 0
    while done < n_sweeps:
        k = min(CHUNK, n_sweeps - done)
        u = rng.random((k, L, L))
        lattice.total_energy += fn(lattice.spins, u, acc)
        done += k
    return lattice


def magnetization(lattice) -> float:
    """|sum s| / L^2."""
    s = getattr(lattice, "spins", lattice)
    return abs(float(np.sum(s, dtype=np.int64))) / s.size


def energy_per_spin(lattice) -> float:
    """-(1/L^2) sum over periodic bonds of s_i s_j; -2 when all spins align."""
    s = getattr(lattice, "spins", lattice)
    return bond_sum(np.asarray(s)) / s.size
