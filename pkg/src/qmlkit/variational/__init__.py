"""Variational quantum circuits: VQE for the XXZ chain and QAOA for Max-Cut."""
from .circuit import (
    ParamCircuit,
    Slot,
    apply_rotation,
    energy,
    energy_and_grad,
    energy_primitive,
    param_shift_grad,
    param_shift_gradient,
    simulate,
)
from .qaoa import MaxCutGraph, MaxCutResult, brute_force_maxcut, build_qaoa, cut_value, histogram_peak, solve_maxcut
from .vqe import TrainTrace, VQEResult, build_vqe_ansatz, build_xxz, random_init, run_vqe, train_vqe, vqe_energy

__all__ = [
    "MaxCutGraph", "MaxCutResult", "ParamCircuit", "Slot", "TrainTrace", "VQEResult", "apply_rotation",
    "brute_force_maxcut", "build_qaoa", "build_vqe_ansatz", "build_xxz", "cut_value", "energy",
    "energy_and_grad", "energy_primitive", "histogram_peak", "param_shift_grad", "param_shift_gradient",
    "random_init", "run_vqe", "simulate", "solve_maxcut", "train_vqe", "vqe_energy",
]
