"""Classifiers over 250-bin spectra and their evaluation metrics.

The main model is a ResNet-style 1-D CNN: four residual blocks of two
convolutions each, channel count doubling block to block, global average
pooling, and a dense head. Comparators are a linear soft-margin SVM
trained by primal subgradient descent and an MLP on raw bins.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .motor import FaultClass
from .neural import Adam, Conv1d, Dense, Tensor, add, global_avg_pool, leaky_relu, softmax_cross_entropy
from .neural.checkpoint import load_checkpoint, save_checkpoint
from .spectrum import LabeledDataset

__all__ = [
    "ResNetConfig",
    "ResNet1d",
    "build_resnet",
    "train",
    "EvalReport",
    "evaluate",
    "aggregate_reports",
    "SeedStats",
    "LinearSvm",
    "train_svm",
    "Mlp",
    "train_mlp",
    "train_mlp_arrays",
    "report_from_predictions",
]

_LEAKY_ALPHA = 0.01


@dataclass(frozen=True)
class ResNetConfig:
    """Architecture and training hyperparameters for the 1-D ResNet.

    Channels double from head to tail; blocks after the first downsample
    by a stride-2 first convolution. ``feature_scale`` multiplies raw
    spectrum magnitudes before they enter the network (a units choice,
    identical for train and test).
    """

    n_classes: int
    block_channels: tuple[int, ...] = (64, 128, 256, 512)
    kernel_size: int = 7
    batch_size: int = 16
    lr: float = 1e-3
    epochs: int = 10
    seed: int = 0
    feature_scale: float = 1.0

    def __post_init__(self) -> None:
        if len(self.block_channels) < 1 or any(c < 1 for c in self.block_channels):
            raise ValueError(f"invalid block channels {self.block_channels}")
        if self.kernel_size < 1 or self.kernel_size % 2 == 0:
            raise ValueError(f"kernel size must be odd and >= 1, got {self.kernel_size}")
        if self.batch_size < 1 or self.epochs < 1:
            raise ValueError("batch size and epochs must be >= 1")


class _ResidualBlock:
    def __init__(self, in_ch: int, out_ch: int, kernel_size: int, stride: int, rng, name: str):
        pad = kernel_size // 2
        self.conv1 = Conv1d(in_ch, out_ch, kernel_size, rng, stride=stride, padding=pad, name=f"{name}.conv1")
        self.conv2 = Conv1d(out_ch, out_ch, kernel_size, rng, stride=1, padding=pad, name=f"{name}.conv2")
        self.proj = None
        if in_ch != out_ch or stride != 1:
            self.proj = Conv1d(in_ch, out_ch, 1, rng, stride=stride, padding=0, name=f"{name}.proj")

    def __call__(self, x: Tensor) -> Tensor:
        y = self.conv2(leaky_relu(self.conv1(x), _LEAKY_ALPHA))
        skip = self.proj(x) if self.proj is not None else x
        return leaky_relu(add(y, skip), _LEAKY_ALPHA)

    def parameters(self) -> list[Tensor]:
        params = self.conv1.parameters() + self.conv2.parameters()
        if self.proj is not None:
            params += self.proj.parameters()
        return params


class ResNet1d:
    """Residual 1-D CNN over single-channel spectra."""

    def __init__(self, cfg: ResNetConfig):
        if cfg.n_classes < 2:
            raise ValueError(f"need at least 2 classes, got {cfg.n_classes}")
        rng = np.random.default_rng(cfg.seed)
        self.cfg = cfg
        self.blocks = []
        in_ch = 1
        for i, out_ch in enumerate(cfg.block_channels):
            stride = 1 if i == 0 else 2
            self.blocks.append(_ResidualBlock(in_ch, out_ch, cfg.kernel_size, stride, rng, name=f"block{i}"))
            in_ch = out_ch
        self.head = Dense(in_ch, cfg.n_classes, rng, name="head")
        self.classes: list[FaultClass] = []

    def forward(self, x: Tensor) -> Tensor:
        for block in self.blocks:
            x = block(x)
        return self.head(global_avg_pool(x))

    def parameters(self) -> list[Tensor]:
        return [p for b in self.blocks for p in b.parameters()] + self.head.parameters()

    def named_parameters(self) -> dict[str, np.ndarray]:
        return {p.name: p.data for p in self.parameters()}

    def predict_logits(self, features: np.ndarray) -> np.ndarray:
        """Logits for a feature matrix [n, bins]; no gradients recorded."""
        x = np.asarray(features, dtype=np.float64) * self.cfg.feature_scale
        return self.forward(Tensor(x[:, None, :])).data

    def predict(self, features: np.ndarray) -> np.ndarray:
        return self.predict_logits(features).argmax(axis=1)

    def save(self, path) -> None:
        save_checkpoint(path, self.named_parameters())

    def load(self, path) -> None:
        arrays = load_checkpoint(path)
        for p in self.parameters():
            if p.name not in arrays:
                raise ValueError(f"checkpoint missing parameter {p.name}")
            if arrays[p.name].shape != p.data.shape:
                raise ValueError(f"shape mismatch for {p.name}")
            p.data = arrays[p.name]


def build_resnet(cfg: ResNetConfig) -> ResNet1d:
    """Construct the ResNet; identical seeds give identical parameters."""
    return ResNet1d(cfg)


def _dataset_arrays(dataset: LabeledDataset, classes: list[FaultClass], scale: float) -> tuple[np.ndarray, np.ndarray]:
    index = {c: i for i, c in enumerate(classes)}
    for w in dataset:
        if w.label not in index:
            raise ValueError(f"label {w.label} not in model classes {[c.value for c in classes]}")
    x = dataset.features(scale)
    y = np.array([index[w.label] for w in dataset], dtype=np.int64)
    return x, y


def train(model: ResNet1d, dataset: LabeledDataset, cfg: ResNetConfig) -> dict[str, list[float]]:
    """Mini-batch Adam on softmax cross-entropy; returns loss/accuracy history.

    Deterministic for a fixed cfg.seed (shuffling uses its own stream so
    initialization and batching cannot interact).
    """
    if len(dataset) == 0:
        raise ValueError("cannot train on an empty dataset")
    classes = dataset.classes()
    if len(classes) != cfg.n_classes:
        raise ValueError(f"dataset has {len(classes)} classes but model expects {cfg.n_classes}")
    model.classes = classes
    x, y = _dataset_arrays(dataset, classes, cfg.feature_scale)
    x = x[:, None, :]

    opt = Adam(model.parameters(), lr=cfg.lr)
    rng = np.random.default_rng(cfg.seed + 1)
    history: dict[str, list[float]] = {"loss": [], "accuracy": []}
    n = x.shape[0]
    for _ in range(cfg.epochs):
        perm = rng.permutation(n)
        losses = []
        correct = 0
        for start in range(0, n, cfg.batch_size):
            idx = perm[start : start + cfg.batch_size]
            xb = Tensor(x[idx])
            logits = model.forward(xb)
            loss = softmax_cross_entropy(logits, y[idx])
            opt.zero_grad()
            loss.backward()
            opt.step()
            losses.append(loss.item())
            correct += int((logits.data.argmax(axis=1) == y[idx]).sum())
        history["loss"].append(float(np.mean(losses)))
        history["accuracy"].append(correct / n)
    return history


@dataclass(frozen=True)
class SeedStats:
    """Mean and standard deviation of a metric across seeds."""

    mean: float
    std: float
    n_seeds: int


@dataclass(frozen=True)
class EvalReport:
    """Classification metrics on one test set.

    ``confusion[i, j]`` counts true class i predicted as class j; row sums
    equal per-class test counts and accuracy is trace / total. F1 scores
    are macro-averaged; a class never predicted and never present scores 0.
    """

    accuracy: float
    macro_f1: float
    per_class_f1: dict[FaultClass, float]
    confusion: np.ndarray
    n_test: int
    classes: tuple[FaultClass, ...]
    seed_stats: dict[str, SeedStats] | None = None


def report_from_predictions(y_true: np.ndarray, y_pred: np.ndarray, classes: list[FaultClass]) -> EvalReport:
    """Build an EvalReport from index-encoded truths and predictions."""
    if y_true.size == 0:
        raise ValueError("cannot evaluate on an empty test set")
    c = len(classes)
    confusion = np.zeros((c, c), dtype=np.int64)
    np.add.at(confusion, (y_true, y_pred), 1)
    accuracy = float(np.trace(confusion)) / y_true.size

    per_class: dict[FaultClass, float] = {}
    for i, cls in enumerate(classes):
        tp = confusion[i, i]
        fp = confusion[:, i].sum() - tp
        fn = confusion[i, :].sum() - tp
        denom = 2 * tp + fp + fn
        per_class[cls] = float(2 * tp / denom) if denom else 0.0
    macro_f1 = float(np.mean(list(per_class.values())))
    return EvalReport(
        accuracy=accuracy,
        macro_f1=macro_f1,
        per_class_f1=per_class,
        confusion=confusion,
        n_test=int(y_true.size),
        classes=tuple(classes),
    )


def evaluate(model, test: LabeledDataset) -> EvalReport:
    """Evaluate any model exposing ``predict`` and ``classes`` on a dataset.

    Raises:
        ValueError: On an empty test set or a label outside the model's
            class set.
    """
    if len(test) == 0:
        raise ValueError("cannot evaluate on an empty test set")
    classes = list(model.classes)
    if not classes:
        raise ValueError("model has no bound class list; train it first")
    x, y = _dataset_arrays(test, classes, 1.0)
    return report_from_predictions(y, model.predict(x), classes)


def aggregate_reports(reports: list[EvalReport]) -> dict[str, SeedStats]:
    """Mean +/- std (sample std for n > 1) of accuracy and macro F1."""
    if not reports:
        raise ValueError("no reports to aggregate")
    acc = np.array([r.accuracy for r in reports])
    f1 = np.array([r.macro_f1 for r in reports])
    ddof = 1 if len(reports) > 1 else 0
    return {
        "accuracy": SeedStats(float(acc.mean()), float(acc.std(ddof=ddof)), len(reports)),
        "macro_f1": SeedStats(float(f1.mean()), float(f1.std(ddof=ddof)), len(reports)),
    }


@dataclass
class LinearSvm:
    """One-vs-rest linear SVM on raw spectrum bins.

    ``input_scale`` is an internal optimizer conditioning constant; it
    reparameterizes the same linear hypothesis class and is applied
    identically at train and predict time.
    """

    weights: np.ndarray
    bias: np.ndarray
    classes: list[FaultClass]
    input_scale: float
    objective_history: list[float] = field(default_factory=list)

    def decision_values(self, features: np.ndarray) -> np.ndarray:
        return (np.asarray(features, dtype=np.float64) * self.input_scale) @ self.weights.T + self.bias

    def predict(self, features: np.ndarray) -> np.ndarray:
        return self.decision_values(features).argmax(axis=1)


def _svm_fit_binary(x: np.ndarray, y: np.ndarray, c_param: float, epochs: int) -> tuple[np.ndarray, float, list[float]]:
    """Projected subgradient descent on 0.5*lam*||w||^2 + mean(hinge).

    lam = 1/C. Returns the running average of the iterates, whose objective
    decreases smoothly where the raw iterates would oscillate; the history
    records the averaged iterate's objective per step.
    """
    n, d = x.shape
    lam = 1.0 / c_param
    w = np.zeros(d)
    b = 0.0
    w_sum = np.zeros(d)
    b_sum = 0.0
    radius = 1.0 / np.sqrt(lam)
    history = []

    def objective(wv, bv):
        hinge = np.maximum(0.0, 1.0 - y * (x @ wv + bv))
        return 0.5 * lam * float(wv @ wv) + float(hinge.mean())

    for t in range(1, epochs + 1):
        margins = y * (x @ w + b)
        viol = margins < 1.0
        grad_w = lam * w - (y[viol] @ x[viol]) / n
        grad_b = -float(y[viol].sum()) / n
        eta = 1.0 / (lam * (t + 10))
        w -= eta * grad_w
        b -= eta * grad_b
        norm = np.linalg.norm(w)
        if norm > radius:
            w *= radius / norm
        w_sum += w
        b_sum += b
        history.append(objective(w_sum / t, b_sum / t))
    return w_sum / epochs, b_sum / epochs, history


def train_svm(
    dataset: LabeledDataset,
    c_param: float = 1.0,
    epochs: int = 300,
    seed: int = 0,
    classes: list[FaultClass] | None = None,
    feature_scale: float = 1.0,
) -> LinearSvm:
    """Soft-margin linear SVM via primal subgradient descent.

    ``classes`` may declare a label space larger than what the dataset
    contains (a declared class with no examples simply never wins the
    one-vs-rest argmax); without it, the dataset must hold at least two
    classes. Full-batch updates from a zero start make the fit
    deterministic regardless of ``seed``.

    Raises:
        ValueError: On an empty or single-class dataset with no declared
            class list.
    """
    del seed  # deterministic full-batch fit; kept for interface symmetry
    if len(dataset) == 0:
        raise ValueError("cannot train on an empty dataset")
    present = dataset.classes()
    if classes is None:
        if len(present) < 2:
            raise ValueError("dataset contains a single class; declare `classes` to allow this")
        classes = present
    else:
        missing = [c.value for c in present if c not in classes]
        if missing:
            raise ValueError(f"dataset labels not in declared class list: {missing}")
    x, y = _dataset_arrays(dataset, classes, feature_scale)
    row_norm = float(np.linalg.norm(x, axis=1).mean())
    input_scale = feature_scale / row_norm if row_norm > 0 else feature_scale
    xs = x * (input_scale / feature_scale)

    weights = np.zeros((len(classes), x.shape[1]))
    bias = np.zeros(len(classes))
    history = None
    for i in range(len(classes)):
        y_bin = np.where(y == i, 1.0, -1.0)
        w, b, hist = _svm_fit_binary(xs, y_bin, c_param, epochs)
        weights[i] = w
        bias[i] = b
        history = hist if history is None else [a + b2 for a, b2 in zip(history, hist)]
    return LinearSvm(
        weights=weights,
        bias=bias,
        classes=list(classes),
        input_scale=input_scale,
        objective_history=history or [],
    )


@dataclass
class Mlp:
    """Dense network on raw spectrum bins; empty hidden_dims reduces to
    multinomial logistic regression."""

    layers: list[Dense]
    classes: list[FaultClass]
    feature_scale: float = 1.0

    def forward(self, x: Tensor) -> Tensor:
        for layer in self.layers[:-1]:
            x = leaky_relu(layer(x), _LEAKY_ALPHA)
        return self.layers[-1](x)

    def parameters(self) -> list[Tensor]:
        return [p for layer in self.layers for p in layer.parameters()]

    def predict_logits(self, features: np.ndarray) -> np.ndarray:
        x = np.asarray(features, dtype=np.float64) * self.feature_scale
        return self.forward(Tensor(x)).data

    def predict(self, features: np.ndarray) -> np.ndarray:
        return self.predict_logits(features).argmax(axis=1)

    def named_parameters(self) -> dict[str, np.ndarray]:
        return {p.name: p.data for p in self.parameters()}


def train_mlp_arrays(
    x: np.ndarray,
    y: np.ndarray,
    classes: list[FaultClass],
    hidden_dims: tuple[int, ...] = (64,),
    epochs: int = 10,
    seed: int = 0,
    lr: float = 1e-3,
    batch_size: int = 16,
    feature_scale: float = 1.0,
) -> Mlp:
    """Array-level MLP trainer over an arbitrary feature matrix [n, d]."""
    if x.shape[0] == 0:
        raise ValueError("cannot train on an empty dataset")
    x = np.asarray(x, dtype=np.float64) * feature_scale
    rng = np.random.default_rng(seed)
    dims = [x.shape[1], *hidden_dims, len(classes)]
    layers = [Dense(dims[i], dims[i + 1], rng, name=f"mlp{i}") for i in range(len(dims) - 1)]
    model = Mlp(layers=layers, classes=classes, feature_scale=feature_scale)

    opt = Adam(model.parameters(), lr=lr)
    shuffle_rng = np.random.default_rng(seed + 1)
    n = x.shape[0]
    for _ in range(epochs):
        perm = shuffle_rng.permutation(n)
        for start in range(0, n, batch_size):
            idx = perm[start : start + batch_size]
            loss = softmax_cross_entropy(model.forward(Tensor(x[idx])), y[idx])
            opt.zero_grad()
            loss.backward()
            opt.step()
    return model


def train_mlp(
    dataset: LabeledDataset,
    hidden_dims: tuple[int, ...] = (64,),
    epochs: int = 10,
    seed: int = 0,
    lr: float = 1e-3,
    batch_size: int = 16,
    feature_scale: float = 1.0,
) -> Mlp:
    """Train an MLP with leaky-ReLU hidden layers, softmax CE, and Adam.

    Raises:
        ValueError: On an empty dataset or fewer than two classes.
    """
    if len(dataset) == 0:
        raise ValueError("cannot train on an empty dataset")
    classes = dataset.classes()
    if len(classes) < 2:
        raise ValueError("need at least 2 classes to train a classifier")
    x, y = _dataset_arrays(dataset, classes, 1.0)
    return train_mlp_arrays(
        x, y, classes,
        hidden_dims=hidden_dims, epochs=epochs, seed=seed,
        lr=lr, batch_size=batch_size, feature_scale=feature_scale,
    )
