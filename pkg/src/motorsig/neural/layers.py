"""Parameterized layers and seeded initialization."""

from __future__ import annotations

import numpy as np

from .tensor import Tensor, conv1d, dense

__all__ = ["he_normal", "Dense", "Conv1d"]


def he_normal(rng: np.random.Generator, shape: tuple[int, ...], fan_in: int) -> np.ndarray:
    """He initialization: N(0, sqrt(2 / fan_in)), suited to (leaky) ReLU."""
    if fan_in < 1:
        raise ValueError(f"fan_in must be >= 1, got {fan_in}")
    return rng.standard_normal(shape) * np.sqrt(2.0 / fan_in)


class Dense:
    """Affine layer y = W x + b with He-initialized weights, zero bias."""

    def __init__(self, in_dim: int, out_dim: int, rng: np.random.Generator, name: str = "dense"):
        self.weights = Tensor(he_normal(rng, (out_dim, in_dim), in_dim), requires_grad=True, name=f"{name}.weights")
        self.bias = Tensor(np.zeros(out_dim), requires_grad=True, name=f"{name}.bias")

    def __call__(self, x: Tensor) -> Tensor:
        return dense(x, self.weights, self.bias)

    def parameters(self) -> list[Tensor]:
        return [self.weights, self.bias]


class Conv1d:
    """1-D cross-correlation layer with He-initialized kernels, zero bias."""

    def __init__(
        self,
        in_channels: int,
        out_channels: int,
        kernel_size: int,
        rng: np.random.Generator,
        stride: int = 1,
        padding: int = 0,
        name: str = "conv",
    ):
        fan_in = in_channels * kernel_size
        self.kernels = Tensor(
            he_normal(rng, (out_channels, in_channels, kernel_size), fan_in),
            requires_grad=True,
            name=f"{name}.kernels",
        )
        self.bias = Tensor(np.zeros(out_channels), requires_grad=True, name=f"{name}.bias")
        self.stride = stride
        self.padding = padding

    def __call__(self, x: Tensor) -> Tensor:
        return conv1d(x, self.kernels, self.bias, stride=self.stride, padding=self.padding)

    def parameters(self) -> list[Tensor]:
        return [self.kernels, self.bias]
