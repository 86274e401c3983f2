"""Two-head feed-forward wavefunction psi(b) = a(b) exp(i phi(b)) with real parameters."""
from __future__ import annotations

import numpy as np

from ..autodiff import tensor as T
from ..autodiff.tensor import Var
from ..nn import Dense
from ..quantum import StateVector


def bits_matrix(indices, n_sites: int) -> np.ndarray:
    """Rows of site bits (site s is bit s of the index)."""
    idx = np.asarray(indices, dtype=np.int64)
    return (idx[..., None] >> np.arange(n_sites)) & 1


class WavefunctionModel:
    """tanh body, softplus amplitude head a = sqrt(p) >= 0, linear phase head.

    Inputs are spins 2b - 1 in {-1, +1}. ``log_psi`` gives (log a, phi) as Vars so
    any real functional of them can be differentiated through the tape.
    """

    def __init__(self, n_sites: int, hidden=(32, 32), rng=None, init_scale: float = 1.0):
        rng = np.random.default_rng() if rng is None else rng
        self.n_sites = n_sites
        sizes = (n_sites, *hidden)
        self.body = [Dense(a, b, act="tanh", init="xavier", rng=rng) for a, b in zip(sizes, sizes[1:])]
        self.amp = Dense(sizes[-1], 1, act="linear", init="xavier", rng=rng)
        self.phase = Dense(sizes[-1], 1, act="linear", init="xavier", rng=rng)
        if init_scale != 1.0:
            for p in self.params:
                p.value *= init_scale

    @property
    def params(self) -> list[Var]:
        out = [p for layer in self.body for p in layer.params]
        return out + self.amp.params + self.phase.params

    def get_flat(self) -> np.ndarray:
        return np.concatenate([p.value.reshape(-1) for p in self.params])

    def set_flat(self, flat) -> None:
        k = 0
        for p in self.params:
            n = p.value.size
            p.value[...] = np.asarray(flat[k : k + n]).reshape(p.value.shape)
            k += n

    def zero_(self) -> "WavefunctionModel":
        for p in self.params:
            p.value[...] = 0.0
        return self

    def _features(self, indices) -> np.ndarray:
        return 2.0 * bits_matrix(indices, self.n_sites) - 1.0

    def heads(self, indices) -> tuple[Var, Var]:
        """(a, phi) as taped Vars of shape [N]."""
        x = Var(self._features(indices))
        for layer in self.body:
            x = layer(x)
        a = T.softplus(self.amp(x)).reshape(-1)
        phi = self.phase(x).reshape(-1)
        return a, phi

    def log_psi(self, indices) -> tuple[Var, Var]:
        a, phi = self.heads(indices)
        return T.log(a), phi

    def amplitude_phase(self, indices) -> tuple[np.ndarray, np.ndarray]:
        a, phi = self.heads(indices)
        return a.value, phi.value

    def psi(self, indices) -> np.ndarray:
        a, phi = self.amplitude_phase(indices)
        return a * np.exp(1j * phi)

    def prob_unnormalized(self, indices) -> np.ndarray:
        a, _ = self.amplitude_phase(indices)
        return a * a

    def state(self) -> StateVector:
        """Normalized dense state over all 2^L strings (small L only)."""
        return StateVector(self.psi(np.arange(1 << self.n_sites)), normalize=True)


class LookupModel:
    """A fixed table psi[b]; used to inject an exact state into the estimators."""

    def __init__(self, amplitudes):
        amps = np.asarray(getattr(amplitudes, "amplitudes", amplitudes), dtype=complex)
        self.table = amps
        self.n_sites = int(np.log2(amps.size))
        self.params: list[Var] = []

    def psi(self, indices) -> np.ndarray:
        return self.table[np.asarray(indices, dtype=np.int64)]

    def prob_unnormalized(self, indices) -> np.ndarray:
        return np.abs(self.psi(indices)) ** 2

    def state(self) -> StateVector:
        return StateVector(self.table, normalize=True)


def psi(model, b) -> complex:
    """Amplitude of one configuration given as a site-ordered bit sequence or an index."""
    if isinstance(b, (int, np.integer)):
        idx = int(b)
    else:
        bits = [int(x) for x in b]
        if len(bits) != model.n_sites:
            raise ValueError(f"bitstring length {len(bits)} != {model.n_sites}")
        idx = sum(v << s for s, v in enumerate(bits))
    return complex(model.psi(np.array([idx]))[0])
