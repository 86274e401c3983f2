"""Pure-Python Metropolis sweeps; same contract and results as the compiled kernel."""
from __future__ import annotations

import numpy as np


def sweeps(spins: np.ndarray, uniforms: np.ndarray, accept: np.ndarray) -> int:
    L = spins.shape[0]
    if spins.shape[1] != L or uniforms.shape[1:] != (L, L):
        raise ValueError("spins and uniforms must share the L x L extent")
    grid = spins.tolist()
    acc = accept.tolist()
    total = 0
    for draws in uniforms.tolist():
        for i in range(L):
            row, above, below = grid[i], grid[i - 1], grid[(i + 1) % L]
            u = draws[i]
            for j in range(L):
                s = row[j]
                dE = 2 * s * (above[j] + below[j] + row[j - 1] + row[(j + 1) % L])
                if dE <= 0 or u[j] < acc[dE >> 2]:
                    row[j] = -s
                    total += dE
    spins[...] = np.asarray(grid, dtype=spins.dtype)
    return total
