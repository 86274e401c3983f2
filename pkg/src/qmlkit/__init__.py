"""Deep-learning toolkit for quantum physics experiments.

Subpackages: ``autodiff`` (dual numbers, scalar tapes, array reverse mode),
``nn``, ``optim``, ``data``, ``quantum`` (statevector simulation), ``ising``,
``variational`` (VQE/QAOA), ``nqs`` and ``rbm``.
"""
__version__ = "0.1.0"
