"""Append-only scalar computation graphs.

A :class:`Tape` records a Wengert list: every node refers only to nodes that
were recorded before it, so walking ``tape.nodes`` in order is a valid
topological order and walking it backwards is a valid reverse sweep.

>>> tape = Tape()
>>> x1, x2 = tape.inputs(2)
>>> tape.output = x1.ln() + x2.cos() - x1 * x2
>>> round(evaluate(tape, [2.0, 1.0]), 3)
-0.767
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .dual import Dual, _sigmoid

LEAF_OPS = frozenset({"input", "constant"})
UNARY_OPS = frozenset({"ln", "cos", "sin", "exp", "tanh", "sigmoid", "relu", "neg", "pow-int"})
BINARY_OPS = frozenset({"add", "sub", "mul", "div"})


class DomainError(ValueError):
    """Raised when a node is evaluated outside its domain (ln x<=0, x/0)."""

    def __init__(self, node_id: int, message: str):
        super().__init__(f"node {node_id}: {message}")
        self.node_id = node_id


@dataclass(frozen=True)
class Node:
    id: int
    op: str
    parents: tuple[int, ...] = ()
    # constant payload, or the integer exponent of a pow-int node
    value: float | int | None = None


class Ref:
    """Handle to a node; arithmetic on handles records new nodes."""

    __slots__ = ("tape", "id")

    def __init__(self, tape: "Tape", node_id: int):
        self.tape = tape
        self.id = node_id

    def __repr__(self):
        return f"Ref({self.tape.nodes[self.id].op}#{self.id})"

    def _other(self, other) -> "Ref":
        if isinstance(other, Ref):
            if other.tape is not self.tape:
                raise ValueError("cannot mix nodes from different tapes")
            return other
        return self.tape.constant(other)

    def __add__(self, other):
        return self.tape._push("add", (self.id, self._other(other).id))

    def __radd__(self, other):
        return self.tape._push("add", (self._other(other).id, self.id))

    def __sub__(self, other):
        return self.tape._push("sub", (self.id, self._other(other).id))

    def __rsub__(self, other):
        return self.tape._push("sub", (self._other(other).id, self.id))

    def __mul__(self, other):
        return self.tape._push("mul", (self.id, self._other(other).id))

    def __rmul__(self, other):
        return self.tape._push("mul", (self._other(other).id, self.id))

    def __truediv__(self, other):
        return self.tape._push("div", (self.id, self._other(other).id))

    def __rtruediv__(self, other):
        return self.tape._push("div", (self._other(other).id, self.id))

    def __neg__(self):
        return self.tape._push("neg", (self.id,))

    def __pow__(self, n: int):
        if not isinstance(n, (int, np.integer)):
            raise TypeError("tape powers must be integers")
        return self.tape._push("pow-int", (self.id,), int(n))

    def ln(self):
        return self.tape._push("ln", (self.id,))

    log = ln

    def cos(self):
        return self.tape._push("cos", (self.id,))

    def sin(self):
        return self.tape._push("sin", (self.id,))

    def exp(self):
        return self.tape._push("exp", (self.id,))

    def tanh(self):
        return self.tape._push("tanh", (self.id,))

    def sigmoid(self):
        return self.tape._push("sigmoid", (self.id,))

    def relu(self):
        return self.tape._push("relu", (self.id,))


class Tape:
    def __init__(self):
        self.nodes: list[Node] = []
        self.input_ids: list[int] = []
        self._output_id: int | None = None

    def __len__(self):
        return len(self.nodes)

    def _push(self, op: str, parents: tuple[int, ...] = (), value=None) -> Ref:
        nid = len(self.nodes)
        if any(p >= nid or p < 0 for p in parents):
            raise ValueError("parents must reference earlier nodes")
        arity = 0 if op in LEAF_OPS else 1 if op in UNARY_OPS else 2 if op in BINARY_OPS else None
        if arity is None:
            raise ValueError(f"unknown op {op!r}")
        if arity != len(parents):
            raise ValueError(f"{op} takes {arity} parents, got {len(parents)}")
        self.nodes.append(Node(nid, op, tuple(parents), value))
        return Ref(self, nid)

    def input(self) -> Ref:
        ref = self._push("input")
        self.input_ids.append(ref.id)
        return ref

    def inputs(self, n: int) -> list[Ref]:
        return [self.input() for _ in range(n)]

    def constant(self, value: float) -> Ref:
        return self._push("constant", (), float(value))

    @property
    def output_id(self) -> int:
        if self._output_id is None:
            if not self.nodes:
                raise ValueError("empty tape")
            return len(self.nodes) - 1
        return self._output_id

    @property
    def output(self) -> Ref:
        return Ref(self, self.output_id)

    @output.setter
    def output(self, ref: Ref):
        if ref.tape is not self:
            raise ValueError("output must belong to this tape")
        self._output_id = ref.id


def _check_inputs(tape: Tape, inputs: Sequence) -> None:
    if len(inputs) != len(tape.input_ids):
        raise ValueError(f"tape has {len(tape.input_ids)} inputs, got {len(inputs)}")


def _apply(node: Node, args: list):
    """Evaluate one node on floats or Duals."""
    op = node.op
    if op == "add":
        return args[0] + args[1]
    if op == "sub":
        return args[0] - args[1]
    if op == "mul":
        return args[0] * args[1]
    if op == "div":
        if _primal(args[1]) == 0.0:
            raise DomainError(node.id, "division by zero")
        return args[0] / args[1]
    if op == "neg":
        return -args[0]
    if op == "pow-int":
        if node.value < 0 and _primal(args[0]) == 0.0:
            raise DomainError(node.id, "negative power of zero")
        return args[0] ** node.value
    a = args[0]
    if op == "ln" and _primal(a) <= 0.0:
        raise DomainError(node.id, f"ln of non-positive value {_primal(a)!r}")
    if isinstance(a, Dual):
        return getattr(a, "log" if op == "ln" else op)()
    if op == "ln":
        return math.log(a)
    if op == "sigmoid":
        return _sigmoid(a)
    if op == "relu":
        return a if a > 0.0 else 0.0
    return getattr(math, op)(a)


def _primal(x) -> float:
    return x.primal if isinstance(x, Dual) else x


def _run(tape: Tape, inputs: Sequence) -> list:
    vals: list = [None] * len(tape.nodes)
    k = 0
    for node in tape.nodes:
        if node.op == "input":
            vals[node.id] = inputs[k]
            k += 1
        elif node.op == "constant":
            vals[node.id] = node.value
        else:
            vals[node.id] = _apply(node, [vals[p] for p in node.parents])
    return vals


def primals(tape: Tape, inputs: Sequence[float]) -> list[float]:
    """Primal value of every node, in id order."""
    _check_inputs(tape, inputs)
    return _run(tape, [float(x) for x in inputs])


def evaluate(tape: Tape, inputs: Sequence[float]) -> float:
    return primals(tape, inputs)[tape.output_id]


def forward_grad(tape: Tape, inputs: Sequence[float], direction: int) -> float:
    """Directional derivative d f / d x_direction via dual-number propagation."""
    _check_inputs(tape, inputs)
    if not 0 <= direction < len(inputs):
        raise IndexError(f"direction {direction} out of range")
    duals = [Dual(x, 1.0 if i == direction else 0.0) for i, x in enumerate(inputs)]
    out = _run(tape, duals)[tape.output_id]
    return out.tangent if isinstance(out, Dual) else 0.0


def _local_partials(node: Node, vals: list) -> tuple[float, ...]:
    op = node.op
    p = node.parents
    if op == "add":
        return (1.0, 1.0)
    if op == "sub":
        return (1.0, -1.0)
    if op == "mul":
        return (vals[p[1]], vals[p[0]])
    if op == "div":
        b = vals[p[1]]
        return (1.0 / b, -vals[p[0]] / (b * b))
    a = vals[p[0]]
    out = vals[node.id]
    if op == "neg":
        return (-1.0,)
    if op == "ln":
        return (1.0 / a,)
    if op == "cos":
        return (-math.sin(a),)
    if op == "sin":
        return (math.cos(a),)
    if op == "exp":
        return (out,)
    if op == "tanh":
        return (1.0 - out * out,)
    if op == "sigmoid":
        return (out * (1.0 - out),)
    if op == "relu":
        return (1.0 if a > 0.0 else 0.0,)
    if op == "pow-int":
        n = node.value
        return (n * a ** (n - 1) if n != 0 else 0.0,)
    raise ValueError(f"no partials for {op!r}")


def adjoints(tape: Tape, inputs: Sequence[float]) -> list[float]:
    """Adjoint (d output / d node) of every node from one backward sweep."""
    vals = primals(tape, inputs)
    adj = [0.0] * len(tape.nodes)
    adj[tape.output_id] = 1.0
    for node in reversed(tape.nodes[: tape.output_id + 1]):
        g = adj[node.id]
        if g == 0.0 or not node.parents:
            continue
        for parent, d in zip(node.parents, _local_partials(node, vals)):
            adj[parent] += g * d
    return adj


def reverse_grad(tape: Tape, inputs: Sequence[float]) -> np.ndarray:
    """All partials d f / d x_i, one per input node."""
    adj = adjoints(tape, inputs)
    return np.array([adj[i] for i in tape.input_ids])


def relative_error(a, b, floor: float = 1.0) -> float:
    """Max elementwise |a-b| / max(|a|, |b|, floor)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.size == 0:
        return 0.0
    scale = np.maximum(np.maximum(np.abs(a), np.abs(b)), floor)
    return float(np.max(np.abs(a - b) / scale))


def central_differences(tape: Tape, inputs: Sequence[float], step: float) -> np.ndarray:
    if step <= 0:
        raise ValueError("step must be positive")
    x = [float(v) for v in inputs]
    out = np.empty(len(x))
    for i in range(len(x)):
        hi = list(x)
        lo = list(x)
        hi[i] += step
        lo[i] -= step
        out[i] = (evaluate(tape, hi) - evaluate(tape, lo)) / (hi[i] - lo[i])
    return out


def check_grad(tape: Tape, inputs: Sequence[float], step: float = 1e-5) -> float:
    """Largest relative disagreement between reverse mode and central differences.

    Magnitudes below 1 are compared absolutely so that vanishing partials do
    not blow up the ratio.
    """
    return relative_error(reverse_grad(tape, inputs), central_differences(tape, inputs, step))
