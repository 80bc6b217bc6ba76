"""Minimal reverse-mode autodiff over float64 numpy arrays.

A Tensor wraps a dense array plus an optional gradient. Operations build
a tape of parent links and backward closures; ``Tensor.backward()`` runs
the tape in reverse topological order. Everything is 64-bit so analytic
gradients can be checked against central finite differences tightly.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "Tensor",
    "tensor",
    "add",
    "sub",
    "mul",
    "scale",
    "add_scalar",
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
]


class Tensor:
    """Dense multi-dimensional array with an optional gradient."""

    __slots__ = ("data", "grad", "requires_grad", "name", "_parents", "_backward")

    def __init__(self, data, requires_grad: bool = False, name: str = ""):
        self.data = np.asarray(data, dtype=np.float64)
        self.grad: np.ndarray | None = None
        self.requires_grad = requires_grad
        self.name = name
        self._parents: tuple[Tensor, ...] = ()
        self._backward = None

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    @property
    def needs_grad(self) -> bool:
        return self.requires_grad or bool(self._parents)

    def item(self) -> float:
        return float(self.data)

    def zero_grad(self) -> None:
        self.grad = None

    def backward(self) -> None:
        """Backpropagate from a scalar tensor through the recorded tape."""
        if self.data.size != 1:
            raise ValueError(f"backward() requires a scalar, got shape {self.shape}")
        order: list[Tensor] = []
        seen: set[int] = set()
        stack: list[tuple[Tensor, bool]] = [(self, False)]
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
                if id(p) not in seen:
                    stack.append((p, False))
        self.grad = np.ones_like(self.data)
        for node in reversed(order):
            if node._backward is not None and node.grad is not None:
                node._backward(node.grad)

    def __repr__(self) -> str:
        tag = f" name={self.name!r}" if self.name else ""
        return f"Tensor(shape={self.shape}{tag}, requires_grad={self.requires_grad})"


def tensor(data, requires_grad: bool = False, name: str = "") -> Tensor:
    return Tensor(data, requires_grad=requires_grad, name=name)


def _accumulate(t: Tensor, g: np.ndarray) -> None:
    if t.needs_grad:
        t.grad = g if t.grad is None else t.grad + g


def _make(data: np.ndarray, parents: tuple[Tensor, ...], backward) -> Tensor:
    out = Tensor(data)
    if any(p.needs_grad for p in parents):
        out._parents = parents
        out._backward = backward
    return out


def _check_same_shape(a: Tensor, b: Tensor, op: str) -> None:
    if a.shape != b.shape:
        raise ValueError(f"{op}: shape mismatch {a.shape} vs {b.shape}")


def add(a: Tensor, b: Tensor) -> Tensor:
    """Element-wise sum of same-shape tensors (also the residual add)."""
    _check_same_shape(a, b, "add")

    def backward(g):
        _accumulate(a, g)
        _accumulate(b, g)

    return _make(a.data + b.data, (a, b), backward)


def sub(a: Tensor, b: Tensor) -> Tensor:
    _check_same_shape(a, b, "sub")

    def backward(g):
        _accumulate(a, g)
        _accumulate(b, -g)

    return _make(a.data - b.data, (a, b), backward)


def mul(a: Tensor, b: Tensor) -> Tensor:
    _check_same_shape(a, b, "mul")

    def backward(g):
        _accumulate(a, g * b.data)
        _accumulate(b, g * a.data)

    return _make(a.data * b.data, (a, b), backward)


def scale(a: Tensor, c: float) -> Tensor:
    def backward(g):
        _accumulate(a, g * c)

    return _make(a.data * c, (a,), backward)


def add_scalar(a: Tensor, c: float) -> Tensor:
    def backward(g):
        _accumulate(a, g)

    return _make(a.data + c, (a,), backward)


def exp(a: Tensor) -> Tensor:
    out_data = np.exp(a.data)

    def backward(g):
        _accumulate(a, g * out_data)

    return _make(out_data, (a,), backward)


def leaky_relu(a: Tensor, alpha: float = 0.01) -> Tensor:
    """x for x >= 0, alpha * x otherwise."""
    if alpha <= 0:
        raise ValueError(f"alpha must be > 0, got {alpha}")
    slope = np.where(a.data >= 0, 1.0, alpha)

    def backward(g):
        _accumulate(a, g * slope)

    return _make(a.data * slope, (a,), backward)


def sigmoid(a: Tensor) -> Tensor:
    # Split by sign for numerical stability at large |x|.
    x = a.data
    out_data = np.where(x >= 0, 1.0 / (1.0 + np.exp(-np.abs(x))), np.exp(-np.abs(x)) / (1.0 + np.exp(-np.abs(x))))

    def backward(g):
        _accumulate(a, g * out_data * (1.0 - out_data))

    return _make(out_data, (a,), backward)


def reshape(a: Tensor, shape: tuple[int, ...]) -> Tensor:
    old_shape = a.data.shape

    def backward(g):
        _accumulate(a, g.reshape(old_shape))

    return _make(a.data.reshape(shape), (a,), backward)


def sum_all(a: Tensor) -> Tensor:
    shape = a.data.shape

    def backward(g):
        _accumulate(a, np.broadcast_to(g, shape).copy())

    return _make(np.asarray(a.data.sum()), (a,), backward)


def mean_all(a: Tensor) -> Tensor:
    n = a.data.size
    shape = a.data.shape

    def backward(g):
        _accumulate(a, np.broadcast_to(g / n, shape).copy())

    return _make(np.asarray(a.data.mean()), (a,), backward)


def dense(x: Tensor, weights: Tensor, bias: Tensor) -> Tensor:
    """Affine map W x + b for x of shape [N] or a batch [B, N]."""
    if weights.data.ndim != 2:
        raise ValueError(f"dense: weights must be 2-D [M, N], got {weights.shape}")
    m, n = weights.data.shape
    if bias.data.shape != (m,):
        raise ValueError(f"dense: bias shape {bias.shape} does not match weights {weights.shape}")
    single = x.data.ndim == 1
    xd = x.data[None, :] if single else x.data
    if xd.ndim != 2 or xd.shape[1] != n:
        raise ValueError(f"dense: input shape {x.shape} does not match weights {weights.shape}")

    out_data = xd @ weights.data.T + bias.data

    def backward(g):
        g2 = g[None, :] if single else g
        _accumulate(weights, g2.T @ xd)
        _accumulate(bias, g2.sum(axis=0))
        gx = g2 @ weights.data
        _accumulate(x, gx[0] if single else gx)

    return _make(out_data[0] if single else out_data, (x, weights, bias), backward)


def conv1d(x: Tensor, kernels: Tensor, bias: Tensor, stride: int = 1, padding: int = 0) -> Tensor:
    """Cross-correlation of [B, C_in, L] (or [C_in, L]) with [C_out, C_in, K].

    Output length is ``(L + 2 * padding - K) // stride + 1``.
    """
    if stride < 1:
        raise ValueError(f"stride must be >= 1, got {stride}")
    if padding < 0:
        raise ValueError(f"padding must be >= 0, got {padding}")
    if kernels.data.ndim != 3:
        raise ValueError(f"conv1d: kernels must be [C_out, C_in, K], got {kernels.shape}")
    c_out, c_in, k = kernels.data.shape
    if bias.data.shape != (c_out,):
        raise ValueError(f"conv1d: bias shape {bias.shape} does not match kernels {kernels.shape}")
    single = x.data.ndim == 2
    xd = x.data[None] if single else x.data
    if xd.ndim != 3 or xd.shape[1] != c_in:
        raise ValueError(f"conv1d: input shape {x.shape} does not match kernels {kernels.shape}")
    b, _, length = xd.shape
    padded_len = length + 2 * padding
    if padded_len < k:
        raise ValueError(f"conv1d: padded length {padded_len} shorter than kernel {k}")
    l_out = (padded_len - k) // stride + 1

    xp = np.pad(xd, ((0, 0), (0, 0), (padding, padding))) if padding else xd
    win = np.lib.stride_tricks.sliding_window_view(xp, k, axis=2)[:, :, ::stride, :]
    cols = np.ascontiguousarray(win.transpose(0, 2, 1, 3)).reshape(b * l_out, c_in * k)
    kmat = kernels.data.reshape(c_out, c_in * k)
    out_data = (cols @ kmat.T).reshape(b, l_out, c_out).transpose(0, 2, 1) + bias.data[None, :, None]

    def backward(g):
        g3 = g[None] if single else g
        g2 = np.ascontiguousarray(g3.transpose(0, 2, 1)).reshape(b * l_out, c_out)
        _accumulate(kernels, (g2.T @ cols).reshape(c_out, c_in, k))
        _accumulate(bias, g3.sum(axis=(0, 2)))
        if x.needs_grad:
            gcols = (g2 @ kmat).reshape(b, l_out, c_in, k).transpose(0, 2, 1, 3)
            gxp = np.zeros((b, c_in, padded_len))
            idx = stride * np.arange(l_out)
            for kk in range(k):
                gxp[:, :, idx + kk] += gcols[:, :, :, kk]
            gx = gxp[:, :, padding : padding + length] if padding else gxp
            _accumulate(x, gx[0] if single else gx)

    return _make(out_data[0] if single else out_data, (x, kernels, bias), backward)


def global_avg_pool(x: Tensor) -> Tensor:
    """Mean over the trailing length axis of [B, C, L] or [C, L]."""
    if x.data.ndim not in (2, 3):
        raise ValueError(f"global_avg_pool: expected [B, C, L] or [C, L], got {x.shape}")
    length = x.data.shape[-1]

    def backward(g):
        _accumulate(x, np.repeat(g[..., None] / length, length, axis=-1))

    return _make(x.data.mean(axis=-1), (x,), backward)


def softmax_cross_entropy(logits: Tensor, true_class) -> Tensor:
    """Mean negative log softmax probability of the true class.

    ``logits`` is [C] with an int target or [B, C] with an int array of
    length B. Stabilized by max subtraction; the gradient is
    ``softmax - one_hot`` (divided by B).
    """
    single = logits.data.ndim == 1
    z = logits.data[None, :] if single else logits.data
    if z.ndim != 2:
        raise ValueError(f"softmax_cross_entropy: logits must be [C] or [B, C], got {logits.shape}")
    targets = np.atleast_1d(np.asarray(true_class, dtype=np.int64))
    b, c = z.shape
    if targets.shape != (b,):
        raise ValueError(f"softmax_cross_entropy: {b} rows but targets shape {targets.shape}")
    if np.any(targets < 0) or np.any(targets >= c):
        raise ValueError(f"class index out of range [0, {c}): {targets}")

    shifted = z - z.max(axis=1, keepdims=True)
    log_norm = np.log(np.exp(shifted).sum(axis=1))
    losses = log_norm - shifted[np.arange(b), targets]
    out_data = np.asarray(losses.mean())

    def backward(g):
        soft = np.exp(shifted)
        soft /= soft.sum(axis=1, keepdims=True)
        soft[np.arange(b), targets] -= 1.0
        gl = soft * (g / b)
        _accumulate(logits, gl[0] if single else gl)

    return _make(out_data, (logits,), backward)
