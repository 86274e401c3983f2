"""Labelled Ising snapshots for the phase classifier and their CSV export."""
from __future__ import annotations

import csv
import io
import os
from dataclasses import dataclass

import numpy as np

from .lattice import SpinLattice, metropolis_sweep

T_MIN = 1.5
T_MAX = 3.0
LABELS = ("ordered", "disordered", "unlabeled")
CLASS_INDEX = {"ordered": 0, "disordered": 1}


@dataclass(frozen=True)
class IsingSample:
    spins: np.ndarray
    temperature: float
    label: str

    def __post_init__(self):
        if not self.temperature > 0:
            raise ValueError("temperature must be positive")
        if self.label not in LABELS:
            raise ValueError(f"label must be one of {LABELS}")


def label_for(T: float, t_min: float = T_MIN, t_max: float = T_MAX) -> str:
    if T < t_min:
        return "ordered"
    if T > t_max:
        return "disordered"
    return "unlabeled"


def initial_lattice(L: int, rng, init: str = "cold") -> SpinLattice:
    """``cold``: all spins aligned with a random common sign; ``hot``: independent random spins."""
    if init == "cold":
        return SpinLattice.aligned(L, int(rng.choice([-1, 1])))
    if init == "hot":
        return SpinLattice.random(L, rng)
    raise ValueError(f"unknown init {init!r}")


def sample_temperature(L: int, T: float, n_samples: int, rng, equilibration: int = 1000,
                       decorrelation: int = 10, init: str = "cold", kernel: str | None = None,
                       t_min: float = T_MIN, t_max: float = T_MAX) -> list[IsingSample]:
    """One Markov chain at temperature T: equilibrate, then keep a snapshot every ``decorrelation`` sweeps."""
    if n_samples < 1 or equilibration < 0 or decorrelation < 1:
        raise ValueError("sample counts and decorrelation must be positive")
    lat = initial_lattice(L, rng, init)
    metropolis_sweep(lat, T, rng, equilibration, kernel)
    label = label_for(T, t_min, t_max)
    out = []
    for _ in range(n_samples):
        metropolis_sweep(lat, T, rng, decorrelation, kernel)
        out.append(IsingSample(lat.spins.copy(), float(T), label))
    return out


def generate_dataset(L: int, temperatures, samples_per_T: int, equilibration: int = 1000,
                     decorrelation: int = 10, rng=None, init: str = "cold", kernel: str | None = None,
                     t_min: float = T_MIN, t_max: float = T_MAX, chains: int = 1) -> list[IsingSample]:
    """Snapshots over a temperature grid.

    Each temperature gets ``chains`` independent Markov chains with their own
    RNG streams; ``samples_per_T`` is split evenly across them.
    """
    temps = [float(t) for t in np.atleast_1d(temperatures)]
    if not temps or any(t <= 0 for t in temps):
        raise ValueError("temperature grid must be non-empty and positive")
    if chains < 1 or samples_per_T % chains:
        raise ValueError("samples_per_T must be a positive multiple of chains")
    rng = np.random.default_rng() if rng is None else rng
    out: list[IsingSample] = []
    for T, streams in zip(temps, (rng.spawn(chains) for _ in temps)):
        for r in streams:
            out += sample_temperature(L, T, samples_per_T // chains, r, equilibration, decorrelation,
                                      init, kernel, t_min, t_max)
    return out


def as_arrays(samples) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(spins [N, 1, L, L] float, temperatures [N], class index [N] with -1 for unlabeled)."""
    x = np.stack([s.spins for s in samples]).astype(float)[:, None]
    t = np.array([s.temperature for s in samples])
    y = np.array([CLASS_INDEX.get(s.label, -1) for s in samples])
    return x, t, y


def write_snapshots_csv(samples, path=None) -> str:
    """One row per sample: T, label, then the L*L spins in row-major order."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    for s in samples:
        w.writerow([repr(float(s.temperature)), s.label, *s.spins.reshape(-1).tolist()])
    text = buf.getvalue()
    if path is not None:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    return text


def read_snapshots_csv(path) -> list[IsingSample]:
    if not os.path.exists(path):
        raise FileNotFoundError(f"snapshot file not found: {path}")
    out = []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            spins = np.array([int(v) for v in row[2:]], dtype=np.int8)
            L = int(round(np.sqrt(spins.size)))
            if L * L != spins.size:
                raise ValueError("row does not hold a square lattice")
            out.append(IsingSample(spins.reshape(L, L), float(row[0]), row[1]))
    return out
