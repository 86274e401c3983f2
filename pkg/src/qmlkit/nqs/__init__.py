"""Neural-network wavefunctions trained by variational Monte Carlo."""
from .estimator import EnergyEstimate, connections, energy_and_grad, exact_energy, local_energies, local_energy
from .model import LookupModel, WavefunctionModel, bits_matrix, psi
from .sampler import McmcChain, mcmc_sample, metropolis_steps, propose
from .train import NqsTrace, train_nqs

__all__ = [
    "EnergyEstimate", "LookupModel", "McmcChain", "NqsTrace", "WavefunctionModel", "bits_matrix",
    "connections", "energy_and_grad", "exact_energy", "local_energies", "local_energy", "mcmc_sample",
    "metropolis_steps", "propose", "psi", "train_nqs",
]
