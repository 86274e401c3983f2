"""CNN phase classifier and the confidence-minimum estimate of T_c."""
from __future__ import annotations

import warnings
from collections import defaultdict
from typing import Callable, Mapping

import numpy as np

from ..autodiff import tensor as T
from ..data import batches
from ..nn import Conv2D, Dense, Flatten, MaxPool2D, Sequential
from ..optim import Adam
from .dataset import as_arrays


class PhaseClassifier:
    """conv(8 x 3x3, relu) -> 2x2 max-pool -> dense 64 relu -> 2 logits."""

    def __init__(self, L: int, rng=None, channels: int = 8, hidden: int = 64):
        rng = np.random.default_rng() if rng is None else rng
        pooled = (L - 2) // 2
        self.L = L
        self.net = Sequential(
            Conv2D(1, channels, 3, act="relu", init="he", rng=rng),
            MaxPool2D(2),
            Flatten(),
            Dense(channels * pooled * pooled, hidden, act="relu", init="he", rng=rng),
            Dense(hidden, 2, act="linear", init="xavier", rng=rng),
        )

    @property
    def params(self):
        return self.net.params

    def logits(self, x) -> T.Var:
        return self.net(x)

    def predict_proba(self, x, batch_size: int = 256) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.ndim == 3:
            x = x[:, None]
        z = self.net.predict(x, batch_size)
        z = z - z.max(axis=1, keepdims=True)
        e = np.exp(z)
        return e / e.sum(axis=1, keepdims=True)

    __call__ = predict_proba

    def fit(self, samples, epochs: int = 5, batch_size: int = 32, lr: float = 1e-3, rng=None) -> list[float]:
        """Adam on the labelled snapshots (unlabeled ones are skipped); returns per-epoch mean loss."""
        rng = np.random.default_rng() if rng is None else rng
        x, _, y = as_arrays(samples)
        keep = y >= 0
        x, y = x[keep], y[keep]
        if len(np.unique(y)) < 2:
            raise ValueError("training needs both ordered and disordered samples")
        targets = np.eye(2)[y]
        opt = Adam(lr=lr)
        history = []
        for _ in range(epochs):
            losses = []
            for idx in batches(len(y), batch_size, rng):
                loss = T.softmax_cross_entropy(self.logits(x[idx]), targets[idx])
                for p in self.params:
                    p.grad = None
                loss.backward()
                opt.step(self.params, [p.grad for p in self.params])
                losses.append(loss.item())
            history.append(float(np.mean(losses)))
        return history


def confidence_curve(classifier: Callable, samples_by_T: Mapping[float, np.ndarray]) -> dict[float, float]:
    """Mean of the max class probability at each temperature."""
    return {float(t): float(np.max(classifier(x), axis=1).mean()) for t, x in samples_by_T.items()}


def group_by_temperature(samples) -> dict[float, np.ndarray]:
    groups = defaultdict(list)
    for s in samples:
        groups[float(s.temperature)].append(s.spins)
    return {t: np.stack(v).astype(float)[:, None] for t, v in groups.items()}


def estimate_tc(classifier: Callable, samples_by_T: Mapping[float, np.ndarray]) -> float:
    """Grid temperature of minimum mean confidence; ties go to the lower temperature."""
    if len(samples_by_T) < 3:
        raise ValueError("need at least three temperature points")
    curve = confidence_curve(classifier, samples_by_T)
    temps = sorted(curve)
    conf = np.array([curve[t] for t in temps])
    k = int(np.argmin(conf))  # first minimum, i.e. lowest T on ties
    if k in (0, len(temps) - 1) and (np.all(np.diff(conf) >= 0) or np.all(np.diff(conf) <= 0)):
        warnings.warn("confidence is monotone over the grid; returning an endpoint", RuntimeWarning, stacklevel=2)
    return temps[k]
