# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled raster-order Metropolis sweeps for the periodic 2D Ising lattice."""
import numpy as np
cimport numpy as cnp

cnp.import_array()


def sweeps(cnp.int8_t[:, ::1] spins, const double[:, :, ::1] uniforms, const double[::1] accept):
    """Run ``uniforms.shape[0]`` sweeps in place; return the summed bond-energy change.

    ``accept[1]`` and ``accept[2]`` hold the acceptance probabilities for
    dE = 4 and dE = 8; ``uniforms[t, i, j]`` is the draw for site (i, j) in sweep t.
    """
    cdef Py_ssize_t n_sweeps = uniforms.shape[0]
    cdef Py_ssize_t L = spins.shape[0]
    cdef Py_ssize_t t, i, j, up, down, left, right
    cdef int s, nb, dE
    cdef long long total = 0
    if spins.shape[1] != L or uniforms.shape[1] != L or uniforms.shape[2] != L:
        raise ValueError("spins and uniforms must share the L x L extent")
    with nogil:
        for t in range(n_sweeps):
            for i in range(L):
                up = i - 1 if i > 0 else L - 1
                down = i + 1 if i < L - 1 else 0
                for j in range(L):
                    left = j - 1 if j > 0 else L - 1
                    right = j + 1 if j < L - 1 else 0
                    s = spins[i, j]
                    nb = spins[up, j] + spins[down, j] + spins[i, left] + spins[i, right]
                    dE = 2 * s * nb
                    if dE <= 0 or uniforms[t, i, j] < accept[dE >> 2]:
                        spins[i, j] = -s
                        total += dE
    return total
