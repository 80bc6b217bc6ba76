"""Variational autoencoder over normalized 20-bin peak segments.

One shared generator serves all fault classes; the injection frequency,
not the generator, carries the class identity. The encoder maps a segment
to the mean and log-variance of a diagonal Gaussian posterior, the
decoder maps latent draws back through a logistic squashing so outputs
stay in [0, 1] like the min-max normalized training segments.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .augment import SEGMENT_LEN, PeakSegment
from .neural import (
    Adam,
    Dense,
    Tensor,
    add,
    add_scalar,
    exp,
    leaky_relu,
    mul,
    scale,
    sigmoid,
    sub,
    sum_all,
)
from .neural.checkpoint import load_checkpoint, save_checkpoint

__all__ = [
    "VaeModel",
    "kl_unit_gaussian",
    "reparameterize",
    "train_vae",
    "generate_peaks",
    "VaePeakSource",
]

#: Decoder draws whose maximum falls below this are rejected as not
#: peak-shaped during generation.
PEAK_REJECTION_THRESHOLD = 0.5

_LEAKY_ALPHA = 0.01


def kl_unit_gaussian(mu: np.ndarray, logvar: np.ndarray) -> float:
    """Closed-form KL divergence D(N(mu, exp(logvar)) || N(0, I)).

    Equals ``0.5 * sum(mu^2 + exp(logvar) - 1 - logvar)`` and is zero
    exactly when mu = 0 and logvar = 0.

    Raises:
        ValueError: On length mismatch or non-finite inputs.
    """
    mu = np.asarray(mu, dtype=np.float64)
    logvar = np.asarray(logvar, dtype=np.float64)
    if mu.shape != logvar.shape:
        raise ValueError(f"shape mismatch: {mu.shape} vs {logvar.shape}")
    if not (np.all(np.isfinite(mu)) and np.all(np.isfinite(logvar))):
        raise ValueError("kl_unit_gaussian requires finite inputs")
    total = 0.5 * float(np.sum(mu * mu + np.expm1(logvar) - logvar))
    return max(0.0, total)


def reparameterize(mu: np.ndarray, logvar: np.ndarray, eps: np.ndarray) -> np.ndarray:
    """Sample z = mu + exp(logvar / 2) * eps."""
    mu = np.asarray(mu, dtype=np.float64)
    logvar = np.asarray(logvar, dtype=np.float64)
    eps = np.asarray(eps, dtype=np.float64)
    if mu.shape != logvar.shape or mu.shape != eps.shape:
        raise ValueError(f"shape mismatch: {mu.shape}, {logvar.shape}, {eps.shape}")
    return mu + np.exp(0.5 * logvar) * eps


@dataclass
class VaeModel:
    """Encoder/decoder parameters plus architecture constants."""

    enc_hidden: Dense
    enc_mu: Dense
    enc_logvar: Dense
    dec_hidden: Dense
    dec_out: Dense
    latent_dim: int
    hidden_dim: int
    loss_history: list[float] = field(default_factory=list)

    @classmethod
    def create(cls, seed: int, latent_dim: int = 4, hidden_dim: int = 16) -> "VaeModel":
        rng = np.random.default_rng(seed)
        return cls(
            enc_hidden=Dense(SEGMENT_LEN, hidden_dim, rng, name="enc_hidden"),
            enc_mu=Dense(hidden_dim, latent_dim, rng, name="enc_mu"),
            enc_logvar=Dense(hidden_dim, latent_dim, rng, name="enc_logvar"),
            dec_hidden=Dense(latent_dim, hidden_dim, rng, name="dec_hidden"),
            dec_out=Dense(hidden_dim, SEGMENT_LEN, rng, name="dec_out"),
            latent_dim=latent_dim,
            hidden_dim=hidden_dim,
        )

    def encode(self, x: Tensor) -> tuple[Tensor, Tensor]:
        h = leaky_relu(self.enc_hidden(x), _LEAKY_ALPHA)
        return self.enc_mu(h), self.enc_logvar(h)

    def decode(self, z: Tensor) -> Tensor:
        h = leaky_relu(self.dec_hidden(z), _LEAKY_ALPHA)
        return sigmoid(self.dec_out(h))

    def decode_array(self, z: np.ndarray) -> np.ndarray:
        return self.decode(Tensor(z)).data

    def parameters(self) -> list[Tensor]:
        layers = (self.enc_hidden, self.enc_mu, self.enc_logvar, self.dec_hidden, self.dec_out)
        return [p for layer in layers for p in layer.parameters()]

    def named_parameters(self) -> dict[str, np.ndarray]:
        return {p.name: p.data for p in self.parameters()}

    def save(self, path) -> None:
        save_checkpoint(path, self.named_parameters())

    def load(self, path) -> None:
        arrays = load_checkpoint(path)
        for p in self.parameters():
            if p.name not in arrays:
                raise ValueError(f"checkpoint missing parameter {p.name}")
            if arrays[p.name].shape != p.data.shape:
                raise ValueError(f"shape mismatch for {p.name}: {arrays[p.name].shape} vs {p.data.shape}")
            p.data = arrays[p.name]


def train_vae(
    segments: list[PeakSegment],
    epochs: int = 200,
    lr: float = 1e-3,
    seed: int = 0,
    latent_dim: int = 4,
    hidden_dim: int = 16,
    batch_size: int = 16,
) -> VaeModel:
    """Train a VAE on non-degenerate segments by summed-MSE + KL (beta = 1).

    Deterministic for a fixed seed. The per-epoch mean total loss is
    recorded on the returned model's ``loss_history``.

    Raises:
        ValueError: With fewer non-degenerate segments than one batch.
    """
    usable = [s for s in segments if not s.degenerate]
    if len(usable) < batch_size:
        raise ValueError(f"need at least one batch of {batch_size} non-degenerate segments, got {len(usable)}")
    data = np.stack([s.values for s in usable])
    model = VaeModel.create(seed=seed, latent_dim=latent_dim, hidden_dim=hidden_dim)
    opt = Adam(model.parameters(), lr=lr)
    rng = np.random.default_rng(seed + 1)

    n = data.shape[0]
    for _ in range(epochs):
        perm = rng.permutation(n)
        epoch_loss = 0.0
        n_batches = 0
        for start in range(0, n - batch_size + 1, batch_size):
            batch = data[perm[start : start + batch_size]]
            x = Tensor(batch)
            mu, logvar = model.encode(x)
            eps = Tensor(rng.standard_normal(mu.data.shape))
            z = add(mu, mul(exp(scale(logvar, 0.5)), eps))
            recon = model.decode(z)

            diff = sub(recon, x)
            recon_loss = scale(sum_all(mul(diff, diff)), 1.0 / batch_size)
            kl_core = sub(add(mul(mu, mu), exp(logvar)), add_scalar(logvar, 1.0))
            kl_loss = scale(sum_all(kl_core), 0.5 / batch_size)
            loss = add(recon_loss, kl_loss)

            opt.zero_grad()
            loss.backward()
            opt.step()
            epoch_loss += loss.item()
            n_batches += 1
        model.loss_history.append(epoch_loss / n_batches)
    return model


def _accept_draw(row: np.ndarray) -> PeakSegment | None:
    """Rejection plus rescaling: keep peak-shaped draws, min-max normalized.

    A draw qualifies when its maximum reaches the rejection threshold and
    it has usable range; the survivor is rescaled to min 0 / max 1 like
    every other normalized segment.
    """
    lo = float(row.min())
    hi = float(row.max())
    if hi < PEAK_REJECTION_THRESHOLD or hi - lo < 1e-9:
        return None
    return PeakSegment(values=(row - lo) / (hi - lo))


def generate_peaks(model: VaeModel, n: int, seed: int = 0) -> list[PeakSegment]:
    """Draw peak segments from the decoder applied to z ~ N(0, I).

    Draws whose maximum falls below ``PEAK_REJECTION_THRESHOLD`` are
    rejected so the output is guaranteed peak-shaped; accepted draws are
    min-max rescaled.

    Raises:
        RuntimeError: When the rejection loop exceeds 100 * n draws
            ("degenerate generator").
    """
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    if n == 0:
        return []
    rng = np.random.default_rng(seed)
    out: list[PeakSegment] = []
    draws = 0
    limit = 100 * n
    while len(out) < n:
        batch = min(64, limit - draws)
        if batch <= 0:
            raise RuntimeError(f"degenerate generator: {draws} draws produced {len(out)}/{n} peaks")
        z = rng.standard_normal((batch, model.latent_dim))
        decoded = model.decode_array(z)
        draws += batch
        for row in decoded:
            seg = _accept_draw(row)
            if seg is not None and len(out) < n:
                out.append(seg)
    return out


@dataclass
class VaePeakSource:
    """PeakSource adapter drawing one segment per call from a trained VAE."""

    model: VaeModel
    max_tries: int = 100

    def sample(self, rng: np.random.Generator) -> PeakSegment:
        for _ in range(self.max_tries):
            z = rng.standard_normal((1, self.model.latent_dim))
            seg = _accept_draw(self.model.decode_array(z)[0])
            if seg is not None:
                return seg
        raise RuntimeError(f"degenerate generator: no peak-shaped draw in {self.max_tries} tries")
