"""Activations, losses, initializers and regularizers."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from ..autodiff import tensor as T
from ..autodiff.tensor import Var, as_var

ACTIVATIONS = {
    "sigmoid": T.sigmoid,
    "tanh": T.tanh,
    "relu": T.relu,
    "softmax": T.softmax,
    "linear": T.identity,
    "softplus": T.softplus,
}


def activation(name: str):
    try:
        return ACTIVATIONS[name]
    except KeyError:
        raise ValueError(f"unknown activation {name!r}") from None


def softmax(z) -> Var:
    """Row-wise softmax along the last axis, shifted by the row max."""
    z = as_var(z)
    if z.size == 0:
        raise ValueError("softmax of empty input")
    return T.softmax(z, axis=-1)


@dataclass(frozen=True)
class LossSpec:
    kind: str = "mse"  # "mse" | "categorical-cross-entropy"
    l1: float = 0.0
    l2: float = 0.0

    def __post_init__(self):
        if self.kind not in ("mse", "categorical-cross-entropy"):
            raise ValueError(f"unknown loss {self.kind!r}")
        for c in (self.l1, self.l2):
            if not np.isfinite(c) or c < 0:
                raise ValueError("regularization coefficients must be finite and >= 0")


def mse(pred, target) -> Var:
    pred = as_var(pred)
    target = np.asarray(target.value if isinstance(target, Var) else target, dtype=float)
    if pred.shape != target.shape:
        raise ValueError(f"shape mismatch {pred.shape} vs {target.shape}")
    d = pred - target
    return (d * d).mean()


def cross_entropy(probs, target) -> Var:
    """Mean over samples of -sum_k t_k log p_k for probability predictions."""
    probs = as_var(probs)
    target = np.asarray(target.value if isinstance(target, Var) else target, dtype=float)
    if probs.shape != target.shape:
        raise ValueError(f"shape mismatch {probs.shape} vs {target.shape}")
    if np.any(probs.value[target != 0] <= 0):
        raise ValueError("log of zero prediction in cross-entropy")
    n = probs.shape[0] if probs.ndim > 1 else 1
    safe = T.add(probs, (target == 0) * 1.0)  # keeps log finite where t == 0
    return -(T.log(safe) * target).sum() * (1.0 / n)


def entropy(p) -> float:
    p = np.asarray(p, dtype=float)
    nz = p > 0
    return float(-(p[nz] * np.log(p[nz])).sum())


def kl_divergence(p, q) -> float:
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    nz = p > 0
    if np.any(q[nz] <= 0):
        raise ValueError("q has zero mass where p has mass")
    return float((p[nz] * np.log(p[nz] / q[nz])).sum())


def penalty(params: Iterable[Var], l1: float = 0.0, l2: float = 0.0):
    total = Var(0.0)
    for p in params:
        if l1:
            total = total + T.vabs(p).sum() * l1
        if l2:
            total = total + (p * p).sum() * l2
    return total


def loss(pred, target, spec: LossSpec = LossSpec(), params: Iterable[Var] = (), from_logits: bool = False) -> Var:
    """Base loss plus ``l1 * sum|w| + l2 * sum w**2`` over ``params``.

    With ``from_logits=True`` and cross-entropy, ``pred`` holds raw scores and
    the softmax is fused into the loss.
    """
    if spec.kind == "mse":
        base = mse(pred, target)
    elif from_logits:
        base = T.softmax_cross_entropy(pred, target)
    else:
        base = cross_entropy(pred, target)
    if spec.l1 or spec.l2:
        base = base + penalty(params, spec.l1, spec.l2)
    return base


def fan_in_out(shape) -> tuple[int, int]:
    shape = tuple(shape)
    if len(shape) == 1:
        return shape[0], shape[0]
    receptive = int(np.prod(shape[2:])) if len(shape) > 2 else 1
    return shape[1] * receptive, shape[0] * receptive


def init_weights(shape, scheme: str = "xavier", rng: np.random.Generator | None = None) -> np.ndarray:
    """Weights with layout [out, in, ...]; xavier var 2/(n_in+n_out), he var 2/n_in."""
    if any(int(s) <= 0 for s in shape):
        raise ValueError("extents must be positive")
    rng = np.random.default_rng() if rng is None else rng
    n_in, n_out = fan_in_out(shape)
    if scheme == "xavier":
        return rng.normal(0.0, np.sqrt(2.0 / (n_in + n_out)), size=shape)
    if scheme == "he":
        return rng.normal(0.0, np.sqrt(2.0 / n_in), size=shape)
    if scheme == "uniform":
        lim = 1.0 / np.sqrt(n_in)
        return rng.uniform(-lim, lim, size=shape)
    raise ValueError(f"unknown init scheme {scheme!r}")


def dropout_mask(shape, rate: float, rng: np.random.Generator | None = None) -> np.ndarray:
    """Inverted-dropout mask: Bernoulli(1-rate) scaled by 1/(1-rate)."""
    if not 0.0 <= rate < 1.0:
        raise ValueError("dropout rate must lie in [0, 1)")
    if rate == 0.0:
        return np.ones(shape)
    rng = np.random.default_rng() if rng is None else rng
    return (rng.random(shape) >= rate) / (1.0 - rate)
