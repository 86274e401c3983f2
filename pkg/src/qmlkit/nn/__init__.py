"""Feed-forward building blocks over the array autodiff engine."""
from .functional import (
    LossSpec,
    cross_entropy,
    dropout_mask,
    entropy,
    init_weights,
    kl_divergence,
    loss,
    mse,
    penalty,
    softmax,
)
from .layers import (
    Activation,
    BatchNorm,
    Conv2D,
    Dense,
    Dropout,
    Flatten,
    Layer,
    MaxPool2D,
    Sequential,
    conv2d,
    dense_forward,
    max_pool,
)
