"""Trainable layers whose forward passes are recorded on the array tape."""
from __future__ import annotations

import numpy as np

from ..autodiff import tensor as T
from ..autodiff.tensor import Var, as_var
from .functional import activation, dropout_mask, init_weights


class Layer:
    training = False

    @property
    def params(self) -> list[Var]:
        return []

    def __call__(self, x, training: bool = False) -> Var:
        raise NotImplementedError


class Dense(Layer):
    """``act(x @ W.T + b)`` with ``W`` of shape [out, in]."""

    def __init__(self, n_in: int, n_out: int, act: str = "linear", init: str = "xavier", rng=None,
                 weights=None, biases=None):
        w = init_weights((n_out, n_in), init, rng) if weights is None else np.asarray(weights, float)
        b = np.zeros(n_out) if biases is None else np.asarray(biases, float)
        if w.shape != (n_out, n_in) or b.shape != (n_out,):
            raise ValueError("weights must be [out, in] and biases [out]")
        self.W = Var(w, requires_grad=True, name="W")
        self.b = Var(b, requires_grad=True, name="b")
        self.act = act
        self._fn = activation(act)

    @property
    def n_in(self):
        return self.W.shape[1]

    @property
    def n_out(self):
        return self.W.shape[0]

    @property
    def params(self):
        return [self.W, self.b]

    def __call__(self, x, training=False):
        x = as_var(x)
        if x.shape[-1] != self.n_in:
            raise ValueError(f"expected {self.n_in} input features, got {x.shape[-1]}")
        return self._fn(x @ self.W.T + self.b)


def dense_forward(x, layer: Dense) -> Var:
    return layer(x)


class Conv2D(Layer):
    """Cross-correlation with kernels [out_ch, in_ch, k, k] over inputs [N, C, H, W]."""

    def __init__(self, in_ch: int, out_ch: int, k: int, stride: int = 1, padding: int = 0,
                 act: str = "linear", init: str = "he", rng=None, kernels=None, biases=None):
        kern = init_weights((out_ch, in_ch, k, k), init, rng) if kernels is None else np.asarray(kernels, float)
        b = np.zeros(out_ch) if biases is None else np.asarray(biases, float)
        if kern.shape != (out_ch, in_ch, k, k):
            raise ValueError("kernels must be [out_ch, in_ch, k, k]")
        if stride < 1 or padding < 0:
            raise ValueError("stride must be positive and padding non-negative")
        self.kernels = Var(kern, requires_grad=True, name="kernels")
        self.b = Var(b, requires_grad=True, name="b")
        self.stride = stride
        self.padding = padding
        self.act = act
        self._fn = activation(act)

    @property
    def params(self):
        return [self.kernels, self.b]

    def output_extent(self, n: int) -> int:
        k = self.kernels.shape[2]
        out = (n + 2 * self.padding - k) // self.stride + 1
        if out < 1:
            raise ValueError(f"input extent {n} gives non-positive output extent")
        return out

    def __call__(self, x, training=False):
        x = as_var(x)
        single = x.ndim == 3
        if single:
            x = x.reshape((1,) + x.shape)
        self.output_extent(x.shape[2])
        self.output_extent(x.shape[3])
        out = self._fn(T.conv2d(x, self.kernels, self.b, self.stride, self.padding))
        return out.reshape(out.shape[1:]) if single else out


def conv2d(image, layer: Conv2D) -> Var:
    return layer(image)


def max_pool(fmap, window: int, stride: int | None = None) -> Var:
    return T.max_pool2d(fmap, window, stride)


class MaxPool2D(Layer):
    def __init__(self, window: int = 2, stride: int | None = None):
        self.window = window
        self.stride = window if stride is None else stride

    def __call__(self, x, training=False):
        return T.max_pool2d(x, self.window, self.stride)


class Flatten(Layer):
    """Row-major flattening of everything after the batch axis."""

    def __call__(self, x, training=False):
        x = as_var(x)
        return x.reshape((x.shape[0], -1))


class Activation(Layer):
    def __init__(self, name: str):
        self._fn = activation(name)

    def __call__(self, x, training=False):
        return self._fn(x)


class Dropout(Layer):
    def __init__(self, rate: float, rng=None):
        if not 0.0 <= rate < 1.0:
            raise ValueError("dropout rate must lie in [0, 1)")
        self.rate = rate
        self.rng = np.random.default_rng() if rng is None else rng

    def __call__(self, x, training=False):
        if not training or self.rate == 0.0:
            return as_var(x)
        return as_var(x) * dropout_mask(x.shape, self.rate, self.rng)


class BatchNorm(Layer):
    """Batch normalization over all axes but the feature/channel axis 1.

    Training mode normalizes with batch statistics and updates running
    averages (``running = momentum * running + (1 - momentum) * batch``);
    inference mode uses the frozen running statistics.
    """

    def __init__(self, n_features: int, eps: float = 1e-5, momentum: float = 0.9):
        self.gamma = Var(np.ones(n_features), requires_grad=True, name="gamma")
        self.beta = Var(np.zeros(n_features), requires_grad=True, name="beta")
        self.eps = eps
        self.momentum = momentum
        self.running_mean = np.zeros(n_features)
        self.running_var = np.ones(n_features)

    @property
    def params(self):
        return [self.gamma, self.beta]

    def _shape(self, ndim):
        return (1, -1) + (1,) * (ndim - 2)

    def normalize(self, x, training=False) -> Var:
        x = as_var(x)
        axes = (0,) + tuple(range(2, x.ndim))
        if training:
            mu = x.mean(axis=axes, keepdims=True)
            d = x - mu
            var = (d * d).mean(axis=axes, keepdims=True)
            m = self.momentum
            self.running_mean = m * self.running_mean + (1 - m) * mu.value.reshape(-1)
            self.running_var = m * self.running_var + (1 - m) * var.value.reshape(-1)
            return d / T.sqrt(var + self.eps)
        shape = self._shape(x.ndim)
        return (x - self.running_mean.reshape(shape)) / np.sqrt(self.running_var.reshape(shape) + self.eps)

    def __call__(self, x, training=False):
        xhat = self.normalize(x, training)
        shape = self._shape(xhat.ndim)
        return xhat * self.gamma.reshape(shape) + self.beta.reshape(shape)


class Sequential(Layer):
    def __init__(self, *layers: Layer):
        self.layers = list(layers)

    @property
    def params(self):
        return [p for layer in self.layers for p in layer.params]

    def __call__(self, x, training=False):
        for layer in self.layers:
            x = layer(x, training)
        return x

    def predict(self, x, batch_size: int = 512) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        outs = [self(x[i : i + batch_size]).value for i in range(0, len(x), batch_size)]
        return np.concatenate(outs, axis=0)
