"""Central finite-difference verification of analytic gradients."""

from __future__ import annotations

import numpy as np

from .tensor import Tensor, mul, sum_all

__all__ = ["finite_difference_check"]


def finite_difference_check(
    fn,
    inputs: list[Tensor],
    h: float = 1e-5,
    rng: np.random.Generator | None = None,
) -> float:
    """Max relative error between analytic and numeric gradients.

    ``fn`` maps the input tensors to one output tensor of any shape. The
    output is contracted to a scalar with a fixed random projection, the
    tape provides analytic gradients, and each input element is perturbed
    by +/- h for the central-difference estimate.
    """
    rng = rng or np.random.default_rng(0)
    out = fn(*inputs)
    proj = Tensor(rng.standard_normal(out.data.shape))

    for t in inputs:
        t.grad = None
    sum_all(mul(out, proj)).backward()
    analytic = [np.zeros_like(t.data) if t.grad is None else t.grad.copy() for t in inputs]

    def objective() -> float:
        return float((fn(*inputs).data * proj.data).sum())

    worst = 0.0
    for t, grad in zip(inputs, analytic):
        if not t.requires_grad:
            continue
        flat = t.data.reshape(-1)
        gflat = grad.reshape(-1)
        for i in range(flat.size):
            keep = flat[i]
            flat[i] = keep + h
            up = objective()
            flat[i] = keep - h
            down = objective()
            flat[i] = keep
            numeric = (up - down) / (2.0 * h)
            denom = max(1e-8, abs(numeric) + abs(gflat[i]))
            worst = max(worst, abs(numeric - gflat[i]) / denom)
    return worst
