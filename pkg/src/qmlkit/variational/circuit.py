"""Parametrized circuits and a differentiable statevector simulator.

States enter the array tape as real pairs ``[re, im]`` of shape (2, 2^L).
Two primitives carry hand-derived pullbacks: a rotation applied to a state,
and the energy ``<psi|H|psi>``. For a real loss the complex cotangent is
``gbar = dL/d(re) + i dL/d(im)``; a linear map ``psi -> M psi`` pulls it back
as ``M^dagger gbar`` and the angle receives ``Re <gbar, dM/dtheta psi>``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..autodiff.tensor import Var, as_var
from ..quantum import Gate, PauliHamiltonian, StateVector, apply_matrix, expectation
from ..quantum.gates import rotation_generator


@dataclass(frozen=True)
class Slot:
    """Gate position ``gate`` takes angle ``scale * theta[param]``."""

    gate: int
    param: int
    scale: float = 1.0


@dataclass
class ParamCircuit:
    """Gate template plus parameter bindings, run from a computational basis state."""

    n_sites: int
    gates: list[Gate] = field(default_factory=list)
    slots: list[Slot] = field(default_factory=list)
    n_params: int = 0
    initial: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.initial is None:
            self.initial = (0,) * self.n_sites
        self.initial = tuple(int(b) for b in self.initial)
        if len(self.initial) != self.n_sites or set(self.initial) - {0, 1}:
            raise ValueError("initial state must be one bit per site")

    def add(self, gate: Gate) -> "ParamCircuit":
        self.gates.append(gate)
        return self

    def add_rotation(self, kind: str, targets: Sequence[int], param: int | None = None,
                     scale: float = 1.0) -> int:
        """Append a rotation bound to ``param`` (a fresh parameter when None); returns the index."""
        if param is None:
            param = self.n_params
        self.n_params = max(self.n_params, param + 1)
        self.slots.append(Slot(len(self.gates), param, float(scale)))
        self.gates.append(Gate(kind, tuple(targets), 0.0))
        return param

    @property
    def slot_of_gate(self) -> dict[int, Slot]:
        return {s.gate: s for s in self.slots}

    def validate(self, theta) -> np.ndarray:
        theta = np.asarray(getattr(theta, "value", theta), dtype=float)
        if theta.shape != (self.n_params,):
            raise ValueError(f"expected {self.n_params} parameters, got shape {theta.shape}")
        bound = {s.param for s in self.slots}
        if bound != set(range(self.n_params)):
            raise ValueError("every parameter must be bound to at least one gate")
        for s in self.slots:
            if not self.gates[s.gate].is_rotation:
                raise ValueError(f"slot on non-rotation gate {self.gates[s.gate].kind}")
        return theta

    def bind(self, theta) -> list[Gate]:
        theta = self.validate(theta)
        out = list(self.gates)
        for s in self.slots:
            g = out[s.gate]
            out[s.gate] = Gate(g.kind, g.targets, s.scale * theta[s.param])
        return out

    def initial_state(self) -> StateVector:
        return StateVector.basis(self.initial)

    def state(self, theta) -> StateVector:
        return self.initial_state().apply(*self.bind(theta))

    def rotation_count(self) -> int:
        return len(self.slots)


def _to_pair(amps: np.ndarray) -> np.ndarray:
    return np.stack([amps.real, amps.imag])


def _to_complex(pair: np.ndarray) -> np.ndarray:
    return pair[0] + 1j * pair[1]


def apply_fixed(state: Var, gate: Gate, n_sites: int) -> Var:
    m = gate.matrix()
    psi = _to_complex(state.value)
    out = apply_matrix(psi, m, gate.targets, n_sites)

    def back(g):
        gbar = _to_complex(g)
        return (_to_pair(apply_matrix(gbar, m.conj().T, gate.targets, n_sites)),)

    return Var.from_op(_to_pair(out), (state,), back)


def apply_rotation(state: Var, angle: Var, gate: Gate, n_sites: int) -> Var:
    """exp(-i angle/2 G) on the gate's targets, differentiable in state and angle."""
    angle = as_var(angle)
    theta = float(angle.value)
    gen = rotation_generator(gate.kind)
    eye = np.eye(len(gen))
    m = np.cos(theta / 2) * eye - 1j * np.sin(theta / 2) * gen
    dm = -0.5 * np.sin(theta / 2) * eye - 0.5j * np.cos(theta / 2) * gen
    psi = _to_complex(state.value)
    out = apply_matrix(psi, m, gate.targets, n_sites)

    def back(g):
        gbar = _to_complex(g)
        g_state = _to_pair(apply_matrix(gbar, m.conj().T, gate.targets, n_sites))
        g_angle = np.vdot(gbar, apply_matrix(psi, dm, gate.targets, n_sites)).real
        return g_state, np.asarray(g_angle).reshape(angle.shape)

    return Var.from_op(_to_pair(out), (state, angle), back)


def energy_primitive(state: Var, h: PauliHamiltonian) -> Var:
    """<psi|H|psi> with pullback 2 H psi."""
    psi = _to_complex(state.value)
    hpsi = h.apply(psi)
    value = np.vdot(psi, hpsi).real

    def back(g):
        return (float(g) * 2.0 * _to_pair(hpsi),)

    return Var.from_op(value, (state,), back)


def simulate(circuit: ParamCircuit, theta: Var) -> Var:
    """Final state as a (2, 2^L) Var, differentiable in ``theta``."""
    theta = as_var(theta)
    circuit.validate(theta)
    state = Var(_to_pair(circuit.initial_state().amplitudes))
    slots = circuit.slot_of_gate
    for k, g in enumerate(circuit.gates):
        s = slots.get(k)
        if s is None:
            state = apply_fixed(state, g, circuit.n_sites)
        else:
            angle = theta[s.param] * s.scale if s.scale != 1.0 else theta[s.param]
            state = apply_rotation(state, angle, g, circuit.n_sites)
    return state


def energy(circuit: ParamCircuit, theta, h: PauliHamiltonian) -> float:
    """C(theta) = <psi(theta)|H|psi(theta)> evaluated without taping."""
    return expectation(circuit.state(theta), h)


def energy_and_grad(circuit: ParamCircuit, theta, h: PauliHamiltonian) -> tuple[float, np.ndarray]:
    """Energy and its exact gradient by reverse mode through the simulator."""
    t = Var(np.array(getattr(theta, "value", theta), dtype=float), requires_grad=True)
    e = energy_primitive(simulate(circuit, t), h)
    e.backward()
    return float(e.value), t.grad.copy()


def param_shift_grad(circuit: ParamCircuit, theta, h: PauliHamiltonian, j: int) -> float:
    """dC/dtheta_j by the shift rule with r = 1/2 (shift pi/2 per gate).

    A parameter bound to several gates (QAOA) sums ``scale * r [C(+) - C(-)]``
    over its gates, shifting one gate angle at a time.
    """
    theta = circuit.validate(theta)
    if not 0 <= j < circuit.n_params:
        raise IndexError(f"parameter {j} out of range")
    bound = circuit.bind(theta)
    init = circuit.initial_state()
    r = 0.5
    shift = np.pi / (4 * r)
    total = 0.0
    for s in circuit.slots:
        if s.param != j:
            continue
        vals = []
        for sign in (1.0, -1.0):
            gates = list(bound)
            g = gates[s.gate]
            gates[s.gate] = Gate(g.kind, g.targets, g.angle + sign * shift)
            vals.append(expectation(init.apply(*gates), h))
        total += s.scale * r * (vals[0] - vals[1])
    return total


def param_shift_gradient(circuit: ParamCircuit, theta, h: PauliHamiltonian) -> np.ndarray:
    return np.array([param_shift_grad(circuit, theta, h, j) for j in range(circuit.n_params)])
