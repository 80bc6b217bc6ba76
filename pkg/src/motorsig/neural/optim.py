"""Adam optimizer with bias-corrected moment estimates."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .tensor import Tensor

__all__ = ["AdamState", "Adam"]


@dataclass
class AdamState:
    """Optimizer state: step counter plus per-parameter moment arrays."""

    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    step: int = 0
    first_moment: list[np.ndarray] = field(default_factory=list)
    second_moment: list[np.ndarray] = field(default_factory=list)


class Adam:
    """Standard Adam over a fixed parameter list.

    Every parameter must carry a gradient when ``step()`` is called;
    zero gradients leave parameters unchanged apart from the step count.
    """

    def __init__(self, params: list[Tensor], lr: float = 1e-3, beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
        if not params:
            raise ValueError("no parameters to optimize")
        if not 0.0 < beta1 < 1.0 or not 0.0 < beta2 < 1.0:
            raise ValueError(f"betas must lie in (0, 1), got {beta1}, {beta2}")
        if lr <= 0 or eps <= 0:
            raise ValueError("lr and eps must be > 0")
        self.params = params
        self.state = AdamState(
            lr=lr,
            beta1=beta1,
            beta2=beta2,
            eps=eps,
            first_moment=[np.zeros_like(p.data) for p in params],
            second_moment=[np.zeros_like(p.data) for p in params],
        )

    def zero_grad(self) -> None:
        for p in self.params:
            p.grad = None

    def step(self) -> None:
        s = self.state
        s.step += 1
        bc1 = 1.0 - s.beta1**s.step
        bc2 = 1.0 - s.beta2**s.step
        for i, p in enumerate(self.params):
            if p.grad is None:
                raise ValueError(f"parameter {p.name or i} has no gradient")
            g = p.grad
            s.first_moment[i] = s.beta1 * s.first_moment[i] + (1.0 - s.beta1) * g
            s.second_moment[i] = s.beta2 * s.second_moment[i] + (1.0 - s.beta2) * g * g
            m_hat = s.first_moment[i] / bc1
            v_hat = s.second_moment[i] / bc2
            p.data -= s.lr * m_hat / (np.sqrt(v_hat) + s.eps)
