"""Single-hidden-layer MNIST models: a softmax classifier and a one-output regressor.

The regressor predicts digit / 10 through a sigmoid and is read out by
rounding 10 y to the nearest digit.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .autodiff import tensor as T
from .data import batches, confusion_and_accuracy, fraction_correct, load_idx, one_hot, standardize
from .nn import Dense, Sequential
from .optim import make_optimizer

HEADS = ("softmax", "regression")


def load_mnist(images_path, labels_path, limit: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Flattened, per-image standardized features and integer labels."""
    images = load_idx(images_path)
    labels = load_idx(labels_path).astype(int)
    if images.ndim != 3 or labels.ndim != 1 or len(images) != len(labels):
        raise ValueError("expected 3-D images and matching 1-D labels")
    if limit:
        images, labels = images[:limit], labels[:limit]
    x = standardize(images.reshape(len(images), -1))
    return x, labels


def build_model(n_in: int, hidden: int, head: str, rng) -> Sequential:
    if head not in HEADS:
        raise ValueError(f"head must be one of {HEADS}")
    out = Dense(hidden, 10 if head == "softmax" else 1, act="linear" if head == "softmax" else "sigmoid",
                init="xavier", rng=rng)
    return Sequential(Dense(n_in, hidden, act="sigmoid", init="xavier", rng=rng), out)


def predict_digits(model: Sequential, x, head: str) -> np.ndarray:
    y = model.predict(x)
    if head == "softmax":
        return np.argmax(y, axis=1)
    return np.clip(np.rint(10.0 * y[:, 0]), 0, 9).astype(int)


def batch_loss(model: Sequential, x, labels, head: str) -> T.Var:
    out = model(x)
    if head == "softmax":
        return T.softmax_cross_entropy(out, one_hot(labels, 10))
    d = out.reshape(-1) - labels / 10.0
    return (d * d).mean()


@dataclass
class MnistResult:
    head: str
    loss: list[float] = field(default_factory=list)
    test_accuracy: list[float] = field(default_factory=list)
    fraction_correct: float = 0.0
    confusion: np.ndarray | None = None

    @property
    def accuracy(self) -> float:
        return self.test_accuracy[-1]


def train_mnist(train, test, head: str = "softmax", hidden: int = 21, epochs: int = 10, lr: float = 1e-3,
                batch_size: int = 64, optimizer: str = "adam", rng=None) -> MnistResult:
    """Mini-batch training; accuracy is the mean diagonal of the row-normalized confusion matrix."""
    rng = np.random.default_rng() if rng is None else rng
    (x, y), (xt, yt) = train, test
    model = build_model(x.shape[1], hidden, head, rng)
    opt = make_optimizer(optimizer, lr=lr)
    res = MnistResult(head)
    for _ in range(epochs):
        losses = []
        for idx in batches(len(y), batch_size, rng):
            loss = batch_loss(model, x[idx], y[idx], head)
            for p in model.params:
                p.grad = None
            loss.backward()
            opt.step(model.params, [p.grad for p in model.params])
            losses.append(loss.item())
        res.loss.append(float(np.mean(losses)))
        pred = predict_digits(model, xt, head)
        c, acc = confusion_and_accuracy(pred, yt, 10)
        res.test_accuracy.append(acc)
        res.confusion = c
        res.fraction_correct = fraction_correct(pred, yt)
    return res
