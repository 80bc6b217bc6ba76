"""Reverse-mode differentiable engine: tensors, layers, Adam, checkpoints."""

from .checkpoint import load_checkpoint, save_checkpoint
from .gradcheck import finite_difference_check
from .layers import Conv1d, Dense, he_normal
from .optim import Adam, AdamState
from .tensor import (
    Tensor,
    add,
    add_scalar,
    conv1d,
    dense,
    exp,
    global_avg_pool,
    leaky_relu,
    mean_all,
    mul,
    reshape,
    scale,
    sigmoid,
    softmax_cross_entropy,
    sub,
    sum_all,
    tensor,
)

__all__ = [
    "Tensor",
    "tensor",
    "add",
    "add_scalar",
    "sub",
    "mul",
    "scale",
    "exp",
    "leaky_relu",
    "sigmoid",
    "dense",
    "conv1d",
    "global_avg_pool",
    "reshape",
    "sum_all",
    "mean_all",
    "softmax_cross_entropy",
    "Dense",
    "Conv1d",
    "he_normal",
    "Adam",
    "AdamState",
    "save_checkpoint",
    "load_checkpoint",
    "finite_difference_check",
]
