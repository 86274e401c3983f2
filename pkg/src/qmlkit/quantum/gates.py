"""Gate definitions. Rotations follow R(theta) = exp(-i theta/2 sigma)."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

SQ2 = 1.0 / np.sqrt(2.0)

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = {"I": I2, "X": X, "Y": Y, "Z": Z}

FIXED_1Q = {
    "H": SQ2 * np.array([[1, 1], [1, -1]], dtype=complex),
    "X": X,
    "Y": Y,
    "Z": Z,
    "S": np.diag([1, 1j]).astype(complex),
    "T": np.diag([1, np.exp(1j * np.pi / 4)]),
}

# two-site matrices in the basis |t0 t1> with t0 the high bit: index = 2*b(t0) + b(t1)
FIXED_2Q = {
    "CNOT": np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex),
    "CZ": np.diag([1, 1, 1, -1]).astype(complex),
    "SWAP": np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex),
}

ROTATION_1Q = {"Rx": "X", "Ry": "Y", "Rz": "Z"}
ROTATION_2Q = {"Rxx": "X", "Ryy": "Y", "Rzz": "Z"}
ROTATIONS = {**ROTATION_1Q, **ROTATION_2Q}


def arity(kind: str) -> int:
    if kind in FIXED_1Q or kind in ROTATION_1Q:
        return 1
    if kind in FIXED_2Q or kind in ROTATION_2Q:
        return 2
    raise ValueError(f"unknown gate {kind!r}")


def rotation_generator(kind: str) -> np.ndarray:
    p = PAULI[ROTATIONS[kind]]
    return p if kind in ROTATION_1Q else np.kron(p, p)


def rotation_matrix(kind: str, theta: float) -> np.ndarray:
    """exp(-i theta/2 G) = cos(theta/2) I - i sin(theta/2) G for an involutory G."""
    g = rotation_generator(kind)
    return np.cos(theta / 2) * np.eye(len(g)) - 1j * np.sin(theta / 2) * g


@dataclass(frozen=True)
class Gate:
    kind: str
    targets: tuple[int, ...]
    angle: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "targets", tuple(int(t) for t in self.targets))
        n = arity(self.kind)
        if len(self.targets) != n:
            raise ValueError(f"{self.kind} acts on {n} sites, got {len(self.targets)}")
        if len(set(self.targets)) != n:
            raise ValueError(f"duplicate targets {self.targets}")
        if (self.kind in ROTATIONS) != (self.angle is not None):
            raise ValueError(f"{self.kind}: rotation gates need an angle, fixed gates must not have one")

    @property
    def is_rotation(self) -> bool:
        return self.kind in ROTATIONS

    def matrix(self) -> np.ndarray:
        if self.kind in ROTATIONS:
            return rotation_matrix(self.kind, self.angle)
        return FIXED_1Q[self.kind] if self.kind in FIXED_1Q else FIXED_2Q[self.kind]

    def inverse(self) -> "Gate":
        if self.is_rotation:
            return Gate(self.kind, self.targets, -self.angle)
        if self.kind in ("S", "T"):
            raise ValueError(f"{self.kind} has no inverse in this gate set")
        return self  # H, X, Y, Z, CNOT, CZ, SWAP are involutions


def _g(kind, *targets, angle=None):
    return Gate(kind, targets, angle)


def H(t):
    return _g("H", t)


def CNOT(control, target):
    return _g("CNOT", control, target)


def Rx(t, theta):
    return _g("Rx", t, angle=theta)


def Ry(t, theta):
    return _g("Ry", t, angle=theta)


def Rz(t, theta):
    return _g("Rz", t, angle=theta)


def Rzz(i, j, theta):
    return _g("Rzz", i, j, angle=theta)
