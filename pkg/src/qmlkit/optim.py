"""First-order parameter update rules, gradient clipping and LR schedules.

Every optimizer keeps one accumulator set per parameter array, updates the
arrays in place and returns them::

    opt = Adam(lr=1e-3)
    for _ in range(steps):
        opt.step(params, grads)
"""
from __future__ import annotations

from typing import Sequence

import numpy as np


class Optimizer:
    kind = "base"

    def __init__(self, lr: float):
        if not lr > 0:
            raise ValueError("learning rate must be positive")
        self.lr = lr
        self.t = 0
        self.state: list[dict[str, np.ndarray]] = []

    def _init_state(self, p: np.ndarray) -> dict[str, np.ndarray]:
        return {}

    def _update(self, p: np.ndarray, g: np.ndarray, s: dict[str, np.ndarray]) -> None:
        raise NotImplementedError

    def step(self, params: Sequence, grads: Sequence) -> list:
        """Apply one update. ``params`` may be arrays or Vars (updated in place)."""
        arrays = [getattr(p, "value", p) for p in params]
        if len(arrays) != len(grads):
            raise ValueError("one gradient per parameter required")
        if not self.state:
            self.state = [self._init_state(p) for p in arrays]
        elif len(self.state) != len(arrays):
            raise ValueError("parameter list changed between steps")
        self.t += 1
        for p, g, s in zip(arrays, grads, self.state):
            g = np.asarray(g, dtype=float)
            if g.shape != p.shape:
                raise ValueError(f"gradient shape {g.shape} != parameter shape {p.shape}")
            if not np.all(np.isfinite(g)):
                raise FloatingPointError("non-finite gradient")
            self._update(p, g, s)
        return list(params)

    def set_lr(self, lr: float) -> None:
        self.lr = lr


class SGD(Optimizer):
    kind = "sgd"

    def __init__(self, lr: float = 0.01):
        super().__init__(lr)

    def _update(self, p, g, s):
        p -= self.lr * g


class Momentum(Optimizer):
    """v <- gamma v - lr g;  theta <- theta + v."""

    kind = "momentum"

    def __init__(self, lr: float = 0.01, gamma: float = 0.9):
        super().__init__(lr)
        self.gamma = gamma

    def _init_state(self, p):
        return {"v": np.zeros_like(p)}

    def _update(self, p, g, s):
        s["v"] = self.gamma * s["v"] - self.lr * g
        p += s["v"]


class Adagrad(Optimizer):
    """Per-coordinate step lr / sqrt(G + eps) with G the running sum of g**2."""

    kind = "adagrad"

    def __init__(self, lr: float = 0.1, eps: float = 1e-8):
        super().__init__(lr)
        self.eps = eps

    def _init_state(self, p):
        return {"G": np.zeros_like(p)}

    def _update(self, p, g, s):
        s["G"] += g * g
        p -= self.lr * g / np.sqrt(s["G"] + self.eps)


class Adadelta(Optimizer):
    """Unit-consistent Adadelta: dtheta = -RMS[dtheta]_{t-1} / RMS[g]_t * g.

    ``lr`` multiplies the update and defaults to 1 (the pure rule).
    """

    kind = "adadelta"

    def __init__(self, lr: float = 1.0, gamma: float = 0.95, eps: float = 1e-6):
        super().__init__(lr)
        self.gamma = gamma
        self.eps = eps

    def _init_state(self, p):
        return {"Eg2": np.zeros_like(p), "Edx2": np.zeros_like(p)}

    def _update(self, p, g, s):
        gm = self.gamma
        s["Eg2"] = gm * s["Eg2"] + (1 - gm) * g * g
        dx = -np.sqrt(s["Edx2"] + self.eps) / np.sqrt(s["Eg2"] + self.eps) * g
        s["Edx2"] = gm * s["Edx2"] + (1 - gm) * dx * dx
        p += self.lr * dx


class Adam(Optimizer):
    """Adam with step-indexed bias correction m/(1-beta1**t), v/(1-beta2**t)."""

    kind = "adam"

    def __init__(self, lr: float = 1e-3, beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
        super().__init__(lr)
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps

    def _init_state(self, p):
        return {"m": np.zeros_like(p), "v": np.zeros_like(p)}

    def _update(self, p, g, s):
        b1, b2 = self.beta1, self.beta2
        s["m"] = b1 * s["m"] + (1 - b1) * g
        s["v"] = b2 * s["v"] + (1 - b2) * g * g
        mhat = s["m"] / (1 - b1**self.t)
        vhat = s["v"] / (1 - b2**self.t)
        p -= self.lr * mhat / (np.sqrt(vhat) + self.eps)


OPTIMIZERS = {cls.kind: cls for cls in (SGD, Momentum, Adagrad, Adadelta, Adam)}


def make_optimizer(kind: str, **hyper) -> Optimizer:
    try:
        cls = OPTIMIZERS[kind]
    except KeyError:
        raise ValueError(f"unknown optimizer {kind!r}; choose from {sorted(OPTIMIZERS)}") from None
    return cls(**hyper)


def clip_gradient(g, threshold: float):
    """g / max(1, ||g|| / threshold); accepts one array or a list (global norm)."""
    if not threshold > 0:
        raise ValueError("threshold must be positive")
    if isinstance(g, (list, tuple)):
        norm = np.sqrt(sum(float(np.sum(np.square(x))) for x in g))
        scale = max(1.0, norm / threshold)
        return [np.asarray(x, dtype=float) / scale for x in g]
    g = np.asarray(g, dtype=float)
    return g / max(1.0, float(np.linalg.norm(g)) / threshold)


def lr_schedule(kind: str, epoch: int, base_lr: float, *, decay: float = 0.99,
                step_size: int = 100, factor: float = 0.5) -> float:
    """constant: base; exponential: base * decay**epoch; step-decay: base * factor**(epoch // step_size)."""
    if epoch < 0:
        raise ValueError("epoch must be >= 0")
    if kind == "constant":
        return base_lr
    if kind == "exponential":
        return base_lr * decay**epoch
    if kind == "step-decay":
        return base_lr * factor ** (epoch // step_size)
    raise ValueError(f"unknown schedule {kind!r}")
