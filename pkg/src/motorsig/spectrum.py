"""FFT magnitude spectra, band truncation, and spectrum dataset files.

The diagnostic feature space is the first 250 bins of the one-sided,
unnormalized magnitude spectrum of each current window (rectangular
window, radix-2 real FFT). Windows whose length is not a power of two
are zero-padded up to the next power of two and the bin width recomputed
accordingly, which preserves peak locations.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .motor import FaultClass

__all__ = [
    "SPECTRUM_BINS",
    "SpectrumWindow",
    "LabeledDataset",
    "fft_magnitude",
    "truncate_spectrum",
    "frequency_to_bin",
    "window_spectrum",
    "next_power_of_two",
    "save_dataset",
    "load_dataset",
]

#: Number of retained spectrum bins; every downstream stage assumes this.
SPECTRUM_BINS = 250

_DATASET_MAGIC = "# motorsig-spectra v1"


@dataclass(frozen=True)
class SpectrumWindow:
    """One truncated magnitude spectrum with its bin-to-hertz mapping.

    The pipeline always produces exactly ``SPECTRUM_BINS`` bins; bin ``i``
    covers frequency ``i * bin_width_hz``.

    Attributes:
        magnitudes: Non-negative spectral magnitudes.
        bin_width_hz: Width of one bin in Hz.
        origin: Provenance tag, ``"<source_id>:<window_index>"``.
        label: Fault class, or None when unlabeled.
    """

    magnitudes: np.ndarray
    bin_width_hz: float
    origin: str = ""
    label: FaultClass | None = None

    def __post_init__(self) -> None:
        mags = np.asarray(self.magnitudes, dtype=np.float64)
        object.__setattr__(self, "magnitudes", mags)
        if mags.ndim != 1 or mags.size < 1:
            raise ValueError("magnitudes must be a non-empty 1-D array")
        if not np.all(np.isfinite(mags)):
            raise ValueError("magnitudes must be finite")
        if np.any(mags < 0):
            raise ValueError("magnitudes must be non-negative")
        if self.bin_width_hz <= 0:
            raise ValueError(f"bin width must be > 0, got {self.bin_width_hz}")

    @property
    def n_bins(self) -> int:
        return int(self.magnitudes.size)

    def with_label(self, label: FaultClass | None) -> "SpectrumWindow":
        return replace(self, label=label)


@dataclass(frozen=True)
class LabeledDataset:
    """Ordered collection of labeled spectrum windows."""

    windows: tuple[SpectrumWindow, ...]

    def __len__(self) -> int:
        return len(self.windows)

    def __iter__(self):
        return iter(self.windows)

    def label_counts(self) -> dict[FaultClass | None, int]:
        counts: dict[FaultClass | None, int] = {}
        for w in self.windows:
            counts[w.label] = counts.get(w.label, 0) + 1
        return counts

    def classes(self) -> list[FaultClass]:
        """Distinct labels present, in FaultClass definition order."""
        present = {w.label for w in self.windows if w.label is not None}
        return [f for f in FaultClass if f in present]

    def features(self, scale: float = 1.0) -> np.ndarray:
        """Stacked magnitude matrix [n_windows, n_bins], optionally scaled."""
        if not self.windows:
            return np.zeros((0, 0))
        return np.stack([w.magnitudes for w in self.windows]) * scale

    def source_ids(self) -> set[str]:
        return {w.origin.rsplit(":", 1)[0] for w in self.windows if w.origin}


def next_power_of_two(n: int) -> int:
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return 1 << (n - 1).bit_length()


def fft_magnitude(window: np.ndarray | list[float]) -> np.ndarray:
    """One-sided magnitude spectrum |DFT| of a real window.

    Uses the unnormalized convention ``|sum_t x_t exp(-i 2 pi k t / N)|``;
    DC is at index 0 and the result has ``N/2 + 1`` bins.

    Raises:
        ValueError: If N < 2, N is not a power of two (callers zero-pad
            first; see :func:`window_spectrum`), or the input is not finite.
    """
    x = np.asarray(window, dtype=np.float64)
    n = x.size
    if x.ndim != 1 or n < 2:
        raise ValueError(f"window must be 1-D with at least 2 samples, got shape {x.shape}")
    if n & (n - 1):
        raise ValueError(f"window length {n} is not a power of two; zero-pad before transforming")
    if not np.all(np.isfinite(x)):
        raise ValueError("window contains non-finite samples")
    return np.abs(np.fft.rfft(x))


def truncate_spectrum(
    mags: np.ndarray | list[float],
    bin_width_hz: float,
    n_bins: int = SPECTRUM_BINS,
    origin: str = "",
    label: FaultClass | None = None,
) -> SpectrumWindow:
    """Keep the first ``n_bins`` bins of a magnitude spectrum verbatim.

    Raises:
        ValueError: When the spectrum has fewer than ``n_bins`` bins.
    """
    mags = np.asarray(mags, dtype=np.float64)
    if mags.size < n_bins:
        raise ValueError(f"window too short for truncation: {mags.size} bins < {n_bins}")
    return SpectrumWindow(
        magnitudes=mags[:n_bins].copy(),
        bin_width_hz=bin_width_hz,
        origin=origin,
        label=label,
    )


def frequency_to_bin(f_hz: float, bin_width_hz: float) -> int:
    """Map a frequency to its nearest retained bin index (ties to even).

    Raises:
        ValueError: For negative frequencies or indices at or beyond the
            truncated band of ``SPECTRUM_BINS`` bins.
    """
    if f_hz < 0:
        raise ValueError(f"frequency must be >= 0, got {f_hz}")
    if bin_width_hz <= 0:
        raise ValueError(f"bin width must be > 0, got {bin_width_hz}")
    index = round(f_hz / bin_width_hz)
    if index >= SPECTRUM_BINS:
        raise ValueError(
            f"frequency outside truncated band: {f_hz} Hz maps to bin {index} >= {SPECTRUM_BINS}"
        )
    return index


def window_spectrum(
    samples: np.ndarray,
    sample_rate_hz: float,
    n_bins: int = SPECTRUM_BINS,
    origin: str = "",
    label: FaultClass | None = None,
) -> SpectrumWindow:
    """FFT one time window into a truncated SpectrumWindow.

    Zero-pads to the next power of two when needed; the bin width is
    ``sample_rate_hz / n_fft`` after padding.
    """
    x = np.asarray(samples, dtype=np.float64)
    n_fft = next_power_of_two(x.size)
    if n_fft != x.size:
        x = np.concatenate([x, np.zeros(n_fft - x.size)])
    mags = fft_magnitude(x)
    return truncate_spectrum(mags, sample_rate_hz / n_fft, n_bins, origin=origin, label=label)


def save_dataset(dataset: LabeledDataset, path: str | Path) -> None:
    """Persist a dataset as CSV: 250 magnitude columns, label, origin.

    Values use shortest round-trip formatting (>= 15 significant digits
    preserved). All windows must share one bin width, recorded in the
    header comment.
    """
    if not dataset.windows:
        raise ValueError("cannot save an empty dataset")
    widths = {w.bin_width_hz for w in dataset.windows}
    if len(widths) != 1:
        raise ValueError(f"dataset mixes bin widths: {sorted(widths)}")
    n_bins = dataset.windows[0].n_bins
    header = ",".join(f"m{i}" for i in range(n_bins)) + ",label,origin"
    lines = [f"{_DATASET_MAGIC} bin_width_hz={float(dataset.windows[0].bin_width_hz)!r}", header]
    for w in dataset.windows:
        if w.n_bins != n_bins:
            raise ValueError("dataset mixes bin counts")
        label = w.label.value if w.label is not None else "unlabeled"
        lines.append(",".join(repr(float(v)) for v in w.magnitudes) + f",{label},{w.origin}")
    Path(path).write_text("\n".join(lines) + "\n")


def load_dataset(path: str | Path) -> LabeledDataset:
    """Load a dataset written by :func:`save_dataset`.

    Rows may omit the trailing origin column; the label column is
    mandatory.
    """
    path = Path(path)
    lines = path.read_text().splitlines()
    if not lines or not lines[0].startswith(_DATASET_MAGIC):
        raise ValueError(f"{path}: not a motorsig spectra file")
    try:
        bin_width = float(lines[0].rsplit("bin_width_hz=", 1)[1])
    except (IndexError, ValueError):
        raise ValueError(f"{path}: header does not declare bin_width_hz") from None
    if len(lines) < 2:
        raise ValueError(f"{path}: missing column header")
    n_bins = len([c for c in lines[1].split(",") if c.startswith("m")])
    windows = []
    for lineno, line in enumerate(lines[2:], start=3):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) not in (n_bins + 1, n_bins + 2):
            raise ValueError(f"{path}:{lineno}: expected {n_bins}+label[,origin] columns, got {len(parts)}")
        mags = np.array([float(v) for v in parts[:n_bins]])
        label_text = parts[n_bins]
        label = None if label_text == "unlabeled" else FaultClass.from_name(label_text)
        origin = parts[n_bins + 1] if len(parts) == n_bins + 2 else ""
        windows.append(SpectrumWindow(mags, bin_width, origin=origin, label=label))
    return LabeledDataset(windows=tuple(windows))
