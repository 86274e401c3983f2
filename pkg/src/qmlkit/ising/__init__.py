"""2D Ising model: Metropolis sampling, Onsager references and T_c estimation."""
from ._backend import BACKEND, KERNELS, get_kernel
from .classifier import PhaseClassifier, confidence_curve, estimate_tc, group_by_temperature
from .dataset import (
    T_MAX,
    T_MIN,
    IsingSample,
    as_arrays,
    generate_dataset,
    label_for,
    read_snapshots_csv,
    sample_temperature,
    write_snapshots_csv,
)
from .lattice import SpinLattice, acceptance_table, bond_sum, energy_per_spin, magnetization, metropolis_sweep
from .onsager import T_C, ellipk, onsager_curve, onsager_energy, onsager_magnetization, onsager_reference

__all__ = [
    "BACKEND", "KERNELS", "IsingSample", "PhaseClassifier", "SpinLattice", "T_C", "T_MAX", "T_MIN",
    "acceptance_table", "as_arrays", "bond_sum", "confidence_curve", "ellipk", "energy_per_spin",
    "estimate_tc", "generate_dataset", "get_kernel", "group_by_temperature", "label_for",
    "magnetization", "metropolis_sweep", "onsager_curve", "onsager_energy", "onsager_magnetization",
    "onsager_reference", "read_snapshots_csv", "sample_temperature", "write_snapshots_csv",
]
