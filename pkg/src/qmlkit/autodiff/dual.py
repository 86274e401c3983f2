"""Dual numbers a + eps*b with eps**2 == 0, for forward-mode differentiation."""
from __future__ import annotations

import math


class Dual:
    __slots__ = ("primal", "tangent")

    def __init__(self, primal: float, tangent: float = 0.0):
        self.primal = float(primal)
        self.tangent = float(tangent)

    def __repr__(self):
        return f"Dual({self.primal!r}, {self.tangent!r})"

    def __eq__(self, other):
        other = _lift(other)
        return self.primal == other.primal and self.tangent == other.tangent

    def __hash__(self):
        return hash((self.primal, self.tangent))

    def __add__(self, other):
        other = _lift(other)
        return Dual(self.primal + other.primal, self.tangent + other.tangent)

    __radd__ = __add__

    def __sub__(self, other):
        other = _lift(other)
        return Dual(self.primal - other.primal, self.tangent - other.tangent)

    def __rsub__(self, other):
        return _lift(other) - self

    def __mul__(self, other):
        other = _lift(other)
        return Dual(
            self.primal * other.primal,
            self.primal * other.tangent + self.tangent * other.primal,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _lift(other)
        if other.primal == 0.0:
            raise ZeroDivisionError("dual division by zero")
        q = self.primal / other.primal
        return Dual(q, (self.tangent - q * other.tangent) / other.primal)

    def __rtruediv__(self, other):
        return _lift(other) / self

    def __neg__(self):
        return Dual(-self.primal, -self.tangent)

    def __pow__(self, n: int):
        if not isinstance(n, int):
            raise TypeError("only integer powers are supported")
        if n == 0:
            return Dual(1.0, 0.0)
        if self.primal == 0.0 and n < 0:
            raise ZeroDivisionError("negative power of zero")
        return Dual(self.primal**n, n * self.primal ** (n - 1) * self.tangent)

    # elementary functions: f(a + eps b) = f(a) + eps f'(a) b

    def log(self):
        if self.primal <= 0.0:
            raise ValueError("log of non-positive dual")
        return Dual(math.log(self.primal), self.tangent / self.primal)

    def exp(self):
        e = math.exp(self.primal)
        return Dual(e, e * self.tangent)

    def sin(self):
        return Dual(math.sin(self.primal), math.cos(self.primal) * self.tangent)

    def cos(self):
        return Dual(math.cos(self.primal), -math.sin(self.primal) * self.tangent)

    def tanh(self):
        t = math.tanh(self.primal)
        return Dual(t, (1.0 - t * t) * self.tangent)

    def sigmoid(self):
        s = _sigmoid(self.primal)
        return Dual(s, s * (1.0 - s) * self.tangent)

    def relu(self):
        if self.primal > 0.0:
            return Dual(self.primal, self.tangent)
        return Dual(0.0, 0.0)


def _lift(x) -> Dual:
    return x if isinstance(x, Dual) else Dual(float(x), 0.0)


def _sigmoid(x: float) -> float:
    if x >= 0:
        return 1.0 / (1.0 + math.exp(-x))
    e = math.exp(x)
    return e / (1.0 + e)
