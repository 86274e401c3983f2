"""Reverse-mode differentiation over numpy arrays.

:class:`Var` wraps an ``ndarray``; every operation on a Var that depends on a
trainable leaf records a closure mapping the output cotangent to parent
cotangents. ``Var.backward()`` walks the recorded graph once in reverse
topological order, summing contributions into each parent (fan-out safe).
"""
from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

BackwardFn = Callable[[np.ndarray], Sequence["np.ndarray | None"]]


class Var:
    __slots__ = ("value", "grad", "requires_grad", "_parents", "_backward", "name")
    __array_priority__ = 100

    def __init__(self, value, requires_grad: bool = False, name: str | None = None):
        self.value = np.asarray(value, dtype=float)
        self.grad: np.ndarray | None = None
        self.requires_grad = requires_grad
        self._parents: tuple[Var, ...] = ()
        self._backward: BackwardFn | None = None
        self.name = name

    @classmethod
    def from_op(cls, value, parents: Sequence["Var"], backward: BackwardFn) -> "Var":
        """Record a custom primitive. ``backward(g)`` returns one cotangent per parent."""
        out = cls.__new__(cls)
        out.value = np.asarray(value, dtype=float)
        out.grad = None
        out.name = None
        if any(p.requires_grad for p in parents):
            out.requires_grad = True
            out._parents = tuple(parents)
            out._backward = backward
        else:
            out.requires_grad = False
            out._parents = ()
            out._backward = None
        return out

    def __repr__(self):
        tag = f" {self.name}" if self.name else ""
        return f"Var{tag}(shape={self.value.shape}, requires_grad={self.requires_grad})"

    @property
    def shape(self):
        return self.value.shape

    @property
    def ndim(self):
        return self.value.ndim

    @property
    def size(self):
        return self.value.size

    @property
    def T(self):
        return transpose(self)

    def numpy(self) -> np.ndarray:
        return self.value

    def item(self) -> float:
        return float(self.value)

    def zero_grad(self):
        self.grad = None

    def backward(self, seed=None):
        """Accumulate d(self)/d(leaf) into ``leaf.grad`` for every trainable leaf."""
        if seed is None:
            if self.value.size != 1:
                raise ValueError("backward() without seed needs a scalar output")
            seed = np.ones_like(self.value)
        if not self.requires_grad:
            return
        order = _toposort(self)
        grads: dict[int, np.ndarray] = {id(self): np.asarray(seed, dtype=float)}
        for node in reversed(order):
            g = grads.pop(id(node), None)
            if g is None:
                continue
            if node._backward is None:
                node.grad = g.copy() if node.grad is None else node.grad + g
                continue
            for parent, pg in zip(node._parents, node._backward(g)):
                if pg is None or not parent.requires_grad:
                    continue
                key = id(parent)
                if key in grads:
                    grads[key] = grads[key] + pg
                else:
                    grads[key] = pg

    # operator sugar

    def __add__(self, other):
        return add(self, other)

    def __radd__(self, other):
        return add(other, self)

    def __sub__(self, other):
        return sub(self, other)

    def __rsub__(self, other):
        return sub(other, self)

    def __mul__(self, other):
        return mul(self, other)

    def __rmul__(self, other):
        return mul(other, self)

    def __truediv__(self, other):
        return div(self, other)

    def __rtruediv__(self, other):
        return div(other, self)

    def __neg__(self):
        return neg(self)

    def __pow__(self, p):
        return power(self, p)

    def __matmul__(self, other):
        return matmul(self, other)

    def __rmatmul__(self, other):
        return matmul(other, self)

    def __getitem__(self, idx):
        return getitem(self, idx)

    def sum(self, axis=None, keepdims=False):
        return vsum(self, axis, keepdims)

    def mean(self, axis=None, keepdims=False):
        return mean(self, axis, keepdims)

    def reshape(self, *shape):
        if len(shape) == 1 and isinstance(shape[0], (tuple, list)):
            shape = tuple(shape[0])
        return reshape(self, shape)


def _toposort(root: Var) -> list[Var]:
    order: list[Var] = []
    seen: set[int] = set()
    stack: list[tuple[Var, bool]] = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack.append((node, True))
        for p in node._parents:
            if p.requires_grad and id(p) not in seen:
                stack.append((p, False))
    return order


def as_var(x) -> Var:
    return x if isinstance(x, Var) else Var(x)


def unbroadcast(g: np.ndarray, shape: tuple) -> np.ndarray:
    """Sum a broadcast cotangent back down to ``shape``."""
    if g.shape == shape:
        return g
    ndiff = g.ndim - len(shape)
    if ndiff > 0:
        g = g.sum(axis=tuple(range(ndiff)))
    axes = tuple(i for i, n in enumerate(shape) if n == 1 and g.shape[i] != 1)
    if axes:
        g = g.sum(axis=axes, keepdims=True)
    return g.reshape(shape)


# elementwise binary ops


def add(a, b) -> Var:
    a, b = as_var(a), as_var(b)
    sa, sb = a.shape, b.shape
    return Var.from_op(a.value + b.value, (a, b), lambda g: (unbroadcast(g, sa), unbroadcast(g, sb)))


def sub(a, b) -> Var:
    a, b = as_var(a), as_var(b)
    sa, sb = a.shape, b.shape
    return Var.from_op(a.value - b.value, (a, b), lambda g: (unbroadcast(g, sa), unbroadcast(-g, sb)))


def mul(a, b) -> Var:
    a, b = as_var(a), as_var(b)
    av, bv = a.value, b.value
    return Var.from_op(
        av * bv, (a, b), lambda g: (unbroadcast(g * bv, av.shape), unbroadcast(g * av, bv.shape))
    )


def div(a, b) -> Var:
    a, b = as_var(a), as_var(b)
    av, bv = a.value, b.value
    if np.any(bv == 0):
        raise ZeroDivisionError("division by zero in Var graph")
    out = av / bv
    return Var.from_op(
        out,
        (a, b),
        lambda g: (unbroadcast(g / bv, av.shape), unbroadcast(-g * out / bv, bv.shape)),
    )


def neg(a) -> Var:
    a = as_var(a)
    return Var.from_op(-a.value, (a,), lambda g: (-g,))


def power(a, p: float) -> Var:
    a = as_var(a)
    av = a.value
    return Var.from_op(av**p, (a,), lambda g: (g * p * av ** (p - 1),))


def matmul(a, b) -> Var:
    a, b = as_var(a), as_var(b)
    av, bv = a.value, b.value
    if av.ndim == 1 or bv.ndim == 1:
        # promote vectors so the backward rule below stays uniform
        a2 = av[None, :] if av.ndim == 1 else av
        b2 = bv[:, None] if bv.ndim == 1 else bv
        out = a2 @ b2
        shape = out.shape
        if av.ndim == 1:
            out = out[..., 0, :] if out.ndim > 1 else out
        if bv.ndim == 1:
            out = out[..., 0]

        def back(g):
            g2 = np.asarray(g).reshape(shape)
            ga = g2 @ np.swapaxes(b2, -1, -2)
            gb = np.swapaxes(a2, -1, -2) @ g2
            return unbroadcast(ga, a2.shape).reshape(av.shape), unbroadcast(gb, b2.shape).reshape(bv.shape)

        return Var.from_op(out, (a, b), back)

    def back(g):
        ga = g @ np.swapaxes(bv, -1, -2)
        gb = np.swapaxes(av, -1, -2) @ g
        return unbroadcast(ga, av.shape), unbroadcast(gb, bv.shape)

    return Var.from_op(av @ bv, (a, b), back)


# elementwise unary ops


def exp(a) -> Var:
    a = as_var(a)
    out = np.exp(a.value)
    return Var.from_op(out, (a,), lambda g: (g * out,))


def log(a) -> Var:
    a = as_var(a)
    av = a.value
    if np.any(av <= 0):
        raise ValueError("log of non-positive value in Var graph")
    return Var.from_op(np.log(av), (a,), lambda g: (g / av,))


def sqrt(a) -> Var:
    a = as_var(a)
    out = np.sqrt(a.value)
    return Var.from_op(out, (a,), lambda g: (g * 0.5 / out,))


def sin(a) -> Var:
    a = as_var(a)
    av = a.value
    return Var.from_op(np.sin(av), (a,), lambda g: (g * np.cos(av),))


def cos(a) -> Var:
    a = as_var(a)
    av = a.value
    return Var.from_op(np.cos(av), (a,), lambda g: (-g * np.sin(av),))


def tanh(a) -> Var:
    a = as_var(a)
    out = np.tanh(a.value)
    return Var.from_op(out, (a,), lambda g: (g * (1.0 - out * out),))


def _np_sigmoid(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    e = np.exp(x[~pos])
    out[~pos] = e / (1.0 + e)
    return out


def sigmoid(a) -> Var:
    a = as_var(a)
    out = _np_sigmoid(a.value)
    return Var.from_op(out, (a,), lambda g: (g * out * (1.0 - out),))


def relu(a) -> Var:
    a = as_var(a)
    mask = a.value > 0
    return Var.from_op(np.where(mask, a.value, 0.0), (a,), lambda g: (g * mask,))


def softplus(a) -> Var:
    a = as_var(a)
    av = a.value
    out = np.logaddexp(0.0, av)
    return Var.from_op(out, (a,), lambda g: (g * _np_sigmoid(av),))


def vabs(a) -> Var:
    a = as_var(a)
    sign = np.sign(a.value)
    return Var.from_op(np.abs(a.value), (a,), lambda g: (g * sign,))


def identity(a) -> Var:
    return as_var(a)


# reductions and shape ops


def vsum(a, axis=None, keepdims=False) -> Var:
    a = as_var(a)
    shape = a.shape

    def back(g):
        if axis is not None and not keepdims:
            g = np.expand_dims(g, axis)
        return (np.broadcast_to(g, shape).copy(),)

    return Var.from_op(a.value.sum(axis=axis, keepdims=keepdims), (a,), back)


def mean(a, axis=None, keepdims=False) -> Var:
    a = as_var(a)
    n = a.value.size if axis is None else np.prod([a.shape[i] for i in np.atleast_1d(axis)])
    return vsum(a, axis, keepdims) * (1.0 / n)


def reshape(a, shape) -> Var:
    a = as_var(a)
    old = a.shape
    return Var.from_op(a.value.reshape(shape), (a,), lambda g: (g.reshape(old),))


def transpose(a, axes=None) -> Var:
    a = as_var(a)
    inv = None if axes is None else np.argsort(axes)
    return Var.from_op(np.transpose(a.value, axes), (a,), lambda g: (np.transpose(g, inv),))


def getitem(a, idx) -> Var:
    a = as_var(a)
    shape = a.shape

    def back(g):
        out = np.zeros(shape)
        np.add.at(out, idx, g)
        return (out,)

    return Var.from_op(a.value[idx], (a,), back)


def concatenate(vs: Sequence, axis: int = 0) -> Var:
    vs = [as_var(v) for v in vs]
    sizes = np.cumsum([v.shape[axis] for v in vs])[:-1]
    return Var.from_op(
        np.concatenate([v.value for v in vs], axis=axis),
        vs,
        lambda g: np.split(g, sizes, axis=axis),
    )


def stack(vs: Sequence, axis: int = 0) -> Var:
    vs = [as_var(v) for v in vs]
    n = len(vs)
    return Var.from_op(
        np.stack([v.value for v in vs], axis=axis),
        vs,
        lambda g: [np.take(g, i, axis=axis) for i in range(n)],
    )


# softmax family


def log_softmax(z, axis: int = -1) -> Var:
    z = as_var(z)
    shifted = z.value - z.value.max(axis=axis, keepdims=True)
    lse = np.log(np.exp(shifted).sum(axis=axis, keepdims=True))
    out = shifted - lse
    p = np.exp(out)
    return Var.from_op(out, (z,), lambda g: (g - p * g.sum(axis=axis, keepdims=True),))


def softmax(z, axis: int = -1) -> Var:
    z = as_var(z)
    if not np.all(np.isfinite(z.value)):
        raise ValueError("softmax of non-finite logits")
    shifted = z.value - z.value.max(axis=axis, keepdims=True)
    e = np.exp(shifted)
    p = e / e.sum(axis=axis, keepdims=True)
    return Var.from_op(p, (z,), lambda g: (p * (g - (g * p).sum(axis=axis, keepdims=True)),))


def softmax_cross_entropy(logits, targets) -> Var:
    """Mean over rows of -sum(t * log softmax(z)); fused so log(0) never occurs."""
    logits = as_var(logits)
    t = np.asarray(targets.value if isinstance(targets, Var) else targets, dtype=float)
    if t.shape != logits.shape:
        raise ValueError(f"shape mismatch {logits.shape} vs {t.shape}")
    z = logits.value
    shifted = z - z.max(axis=-1, keepdims=True)
    logp = shifted - np.log(np.exp(shifted).sum(axis=-1, keepdims=True))
    n = z.shape[0] if z.ndim > 1 else 1
    loss = -(t * logp).sum() / n
    p = np.exp(logp)

    def back(g):
        return (g * (p * t.sum(axis=-1, keepdims=True) - t) / n,)

    return Var.from_op(loss, (logits,), back)


# image ops


def _im2col(x: np.ndarray, k: int, stride: int) -> tuple[np.ndarray, int, int]:
    n, c, h, w = x.shape
    oh = (h - k) // stride + 1
    ow = (w - k) // stride + 1
    s = x.strides
    cols = np.lib.stride_tricks.as_strided(
        x,
        shape=(n, c, k, k, oh, ow),
        strides=(s[0], s[1], s[2], s[3], s[2] * stride, s[3] * stride),
        writeable=False,
    )
    return cols, oh, ow


def conv2d(x, kernels, bias=None, stride: int = 1, padding: int = 0) -> Var:
    """Cross-correlation of a batch ``x`` [N, C, H, W] with ``kernels`` [O, C, k, k]."""
    x, kernels = as_var(x), as_var(kernels)
    xv, kv = x.value, kernels.value
    if xv.ndim != 4 or kv.ndim != 4:
        raise ValueError("conv2d expects x [N,C,H,W] and kernels [O,C,k,k]")
    if xv.shape[1] != kv.shape[1]:
        raise ValueError(f"channel mismatch: image {xv.shape[1]} vs kernel {kv.shape[1]}")
    if kv.shape[2] != kv.shape[3]:
        raise ValueError("kernels must be square")
    k = kv.shape[2]
    if stride < 1 or padding < 0:
        raise ValueError("stride must be >= 1 and padding >= 0")
    xp = np.pad(xv, ((0, 0), (0, 0), (padding, padding), (padding, padding))) if padding else xv
    if xp.shape[2] < k or xp.shape[3] < k:
        raise ValueError("kernel larger than padded input: non-positive output extent")
    cols, oh, ow = _im2col(np.ascontiguousarray(xp), k, stride)
    out = np.einsum("ncijyx,ocij->noyx", cols, kv, optimize=True)
    parents = [x, kernels]
    if bias is not None:
        bias = as_var(bias)
        out = out + bias.value[None, :, None, None]
        parents.append(bias)

    def back(g):
        gk = np.einsum("noyx,ncijyx->ocij", g, cols, optimize=True)
        gxp = np.zeros_like(xp)
        for i in range(k):
            for j in range(k):
                gxp[:, :, i : i + stride * oh : stride, j : j + stride * ow : stride] += np.einsum(
                    "noyx,oc->ncyx", g, kv[:, :, i, j], optimize=True
                )
        gx = gxp[:, :, padding : padding + xv.shape[2], padding : padding + xv.shape[3]] if padding else gxp
        grads = [gx, gk]
        if bias is not None:
            grads.append(g.sum(axis=(0, 2, 3)))
        return grads

    return Var.from_op(out, parents, back)


def max_pool2d(x, window: int, stride: int | None = None) -> Var:
    """Window maxima over the last two axes of ``x`` [..., H, W]."""
    x = as_var(x)
    stride = window if stride is None else stride
    xv = x.value
    h, w = xv.shape[-2:]
    if window > h or window > w or window < 1:
        raise ValueError(f"window {window} does not fit a {h}x{w} map")
    lead = xv.shape[:-2]
    flat = np.ascontiguousarray(xv.reshape((-1, 1) + (h, w)))
    cols, oh, ow = _im2col(flat, window, stride)  # [B, 1, k, k, oh, ow]
    cols = cols.reshape(flat.shape[0], window * window, oh, ow)
    arg = cols.argmax(axis=1)
    out = np.take_along_axis(cols, arg[:, None], axis=1)[:, 0].reshape(lead + (oh, ow))

    def back(g):
        gx = np.zeros((flat.shape[0], h, w))
        b, yy, xx = np.meshgrid(np.arange(flat.shape[0]), np.arange(oh), np.arange(ow), indexing="ij")
        di, dj = np.divmod(arg, window)
        np.add.at(gx, (b, yy * stride + di, xx * stride + dj), g.reshape(flat.shape[0], oh, ow))
        return (gx.reshape(xv.shape),)

    return Var.from_op(out, (x,), back)


# checking helpers


def numerical_grad(fn: Callable[[], Var], param: Var, step: float = 1e-5) -> np.ndarray:
    """Central-difference gradient of scalar ``fn()`` with respect to ``param.value``."""
    g = np.zeros_like(param.value)
    flat = param.value.reshape(-1)
    gflat = g.reshape(-1)
    for i in range(flat.size):
        old = flat[i]
        flat[i] = old + step
        hi = float(fn().value)
        flat[i] = old - step
        lo = float(fn().value)
        flat[i] = old
        gflat[i] = (hi - lo) / (2 * step)
    return g


def gradients(fn: Callable[[], Var], params: Sequence[Var]) -> list[np.ndarray]:
    for p in params:
        p.grad = None
    out = fn()
    out.backward()
    return [np.zeros_like(p.value) if p.grad is None else p.grad for p in params]


def check_grads(fn: Callable[[], Var], params: Sequence[Var], step: float = 1e-5, floor: float = 1.0) -> float:
    """Max relative error between backward() and central differences over ``params``."""
    from .tape import relative_error

    analytic = gradients(fn, params)
    worst = 0.0
    for p, ga in zip(params, analytic):
        worst = max(worst, relative_error(ga, numerical_grad(fn, p, step), floor))
    return worst
