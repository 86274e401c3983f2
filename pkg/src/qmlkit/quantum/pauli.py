"""Pauli strings, Pauli-sum Hamiltonians and exact diagonalization."""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .state import MAX_SITES, StateVector

HERMITIAN_TOL = 1e-10


@dataclass(frozen=True)
class PauliString:
    """``coeff * ops[0] (x) ops[1] (x) ...`` with ``ops[s]`` acting on site s."""

    coeff: float
    ops: str

    def __post_init__(self):
        ops = "".join(self.ops).upper()
        if not ops or set(ops) - set("IXYZ"):
            raise ValueError(f"ops must be a non-empty word over IXYZ, got {self.ops!r}")
        object.__setattr__(self, "ops", ops)
        object.__setattr__(self, "coeff", float(self.coeff))

    @classmethod
    def from_sites(cls, coeff: float, n_sites: int, **site_ops) -> "PauliString":
        """``PauliString.from_sites(0.5, 4, X=[0, 1])`` puts X on sites 0 and 1."""
        ops = ["I"] * n_sites
        for letter, sites in site_ops.items():
            for s in sites:
                ops[s] = letter
        return cls(coeff, "".join(ops))

    @property
    def n_sites(self) -> int:
        return len(self.ops)

    def _mask(self, letters: str) -> int:
        return sum(1 << s for s, op in enumerate(self.ops) if op in letters)

    @cached_property
    def masks(self) -> tuple[int, int, int]:
        """(flip mask, sign mask, number of Y factors)."""
        return self._mask("XY"), self._mask("YZ"), self.ops.count("Y")

    def action(self, indices: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """P|b> = phase(b) |b'>; returns (b', phase) for an array of basis indices."""
        flip, sign, n_y = self.masks
        indices = np.asarray(indices, dtype=np.int64)
        parity = _popcount(indices & sign) & 1
        phase = (1j) ** n_y * (1 - 2 * parity)
        return indices ^ flip, self.coeff * phase

    def apply(self, amps: np.ndarray) -> np.ndarray:
        idx = np.arange(amps.size)
        new, phase = self.action(idx)
        out = np.empty_like(amps, dtype=complex)
        out[new] = phase * amps
        return out

    def matrix(self) -> np.ndarray:
        dim = 1 << self.n_sites
        idx = np.arange(dim)
        new, phase = self.action(idx)
        m = np.zeros((dim, dim), dtype=complex)
        m[new, idx] = phase
        return m


def _popcount(x: np.ndarray) -> np.ndarray:
    x = x.copy()
    count = np.zeros_like(x)
    while np.any(x):
        count += x & 1
        x >>= 1
    return count


class PauliHamiltonian:
    """Real-weighted sum of Pauli strings over a common site count."""

    def __init__(self, terms: Iterable[PauliString]):
        self.terms: tuple[PauliString, ...] = tuple(terms)
        if not self.terms:
            raise ValueError("Hamiltonian needs at least one term")
        sizes = {t.n_sites for t in self.terms}
        if len(sizes) != 1:
            raise ValueError(f"terms act on different site counts {sorted(sizes)}")
        self.n_sites = sizes.pop()
        self._dense = None

    def __len__(self):
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)

    def __add__(self, other: "PauliHamiltonian") -> "PauliHamiltonian":
        return PauliHamiltonian(self.terms + tuple(other.terms))

    def __repr__(self):
        return f"PauliHamiltonian(n_sites={self.n_sites}, terms={len(self.terms)})"

    def apply(self, amps: np.ndarray) -> np.ndarray:
        out = np.zeros(amps.size, dtype=complex)
        for t in self.terms:
            out += t.apply(amps)
        return out

    def matrix(self) -> np.ndarray:
        if self.n_sites > MAX_SITES:
            raise ValueError(f"dense matrix limited to {MAX_SITES} sites, got {self.n_sites}")
        if self._dense is None:
            self._dense = sum(t.matrix() for t in self.terms)
        return self._dense

    def connected(self, index: int) -> tuple[np.ndarray, np.ndarray]:
        """Basis states b' and elements <b'|H|b> reached from basis index b, merged."""
        new = np.empty(len(self.terms), dtype=np.int64)
        val = np.empty(len(self.terms), dtype=complex)
        for k, t in enumerate(self.terms):
            n, v = t.action(np.array([index]))
            new[k], val[k] = n[0], v[0]
        uniq, inv = np.unique(new, return_inverse=True)
        merged = np.zeros(uniq.size, dtype=complex)
        np.add.at(merged, inv, val)
        return uniq, merged


def expectation(state: StateVector, h: PauliHamiltonian) -> float:
    """Sum of c_j <psi|P_j|psi>; raises if the imaginary residue is not negligible."""
    if state.n_sites != h.n_sites:
        raise ValueError("state and Hamiltonian site counts differ")
    amps = state.amplitudes
    value = np.vdot(amps, h.apply(amps))
    if abs(value.imag) > HERMITIAN_TOL:
        raise ValueError(f"non-Hermitian residue {value.imag:.3e}")
    return float(value.real)


def exact_diagonalize(h: PauliHamiltonian, degeneracy_tol: float = 1e-9) -> tuple[np.ndarray, StateVector]:
    """Ascending eigenvalues and a ground state from a dense eigendecomposition.

    A degenerate ground space is resolved by projecting the computational basis
    state with the largest weight in it (lowest index on ties) onto that space.
    The global phase makes the largest component real and positive, so the
    result does not depend on the LAPACK basis choice.
    """
    if h.n_sites > MAX_SITES:
        raise ValueError(f"exact diagonalization limited to {MAX_SITES} sites, got {h.n_sites}")
    evals, evecs = np.linalg.eigh(h.matrix())
    ground = evecs[:, evals - evals[0] <= degeneracy_tol * max(1.0, abs(evals[0]))]
    if ground.shape[1] == 1:
        v = ground[:, 0]
    else:
        weight = np.sum(np.abs(ground) ** 2, axis=1)
        k = int(np.argmax(weight > weight.max() - 1e-12))
        v = ground @ ground[k].conj()
    k = int(np.argmax(np.abs(v)))
    v = v * (abs(v[k]) / v[k])
    return evals, StateVector(v, normalize=True)


def xxz_chain(n_sites: int, delta: float, scale: float = -0.25) -> PauliHamiltonian:
    """Open XXZ chain ``scale * sum_i (X_i X_{i+1} + Y_i Y_{i+1} + delta Z_i Z_{i+1})``.

    Always 3(L-1) terms; the ZZ term is kept even when delta is 0.
    """
    if n_sites < 2:
        raise ValueError("XXZ chain needs at least two sites")
    terms = []
    for i in range(n_sites - 1):
        pair = [i, i + 1]
        terms.append(PauliString.from_sites(scale, n_sites, X=pair))
        terms.append(PauliString.from_sites(scale, n_sites, Y=pair))
        terms.append(PauliString.from_sites(scale * delta, n_sites, Z=pair))
    return PauliHamiltonian(terms)


def tfim_chain(n_sites: int, field: float = 1.0, coupling: float = 1.0, periodic: bool = False,
               bond: str = "X", transverse: str = "Z") -> PauliHamiltonian:
    """Transverse-field Ising ``-J sum B_i B_{i+1} - h sum T_i`` (default B = X, T = Z)."""
    bonds = [(i, i + 1) for i in range(n_sites - 1)]
    if periodic and n_sites > 2:
        bonds.append((n_sites - 1, 0))
    terms = [PauliString.from_sites(-coupling, n_sites, **{bond: list(b)}) for b in bonds]
    terms += [PauliString.from_sites(-field, n_sites, **{transverse: [i]}) for i in range(n_sites)]
    return PauliHamiltonian(terms)


def zz_weighted(weights: Sequence[Sequence[float]]) -> PauliHamiltonian:
    """``sum_{i<j} W_ij Z_i Z_j`` from a symmetric weight matrix."""
    w = np.asarray(weights, dtype=float)
    n = len(w)
    terms = [PauliString.from_sites(w[i, j], n, Z=[i, j]) for i in range(n) for j in range(i + 1, n) if w[i, j] != 0]
    if not terms:
        terms = [PauliString(0.0, "I" * n)]
    return PauliHamiltonian(terms)
