"""Forward- and reverse-mode automatic differentiation."""
from .dual import Dual
from .tape import (
    DomainError,
    Node,
    Ref,
    Tape,
    adjoints,
    central_differences,
    check_grad,
    evaluate,
    forward_grad,
    primals,
    relative_error,
    reverse_grad,
)
from .tensor import Var, check_grads, gradients, numerical_grad

__all__ = [
    "Dual", "DomainError", "Node", "Ref", "Tape", "Var",
    "adjoints", "central_differences", "check_grad", "check_grads", "evaluate",
    "forward_grad", "gradients", "numerical_grad", "primals", "relative_error", "reverse_grad",
]
