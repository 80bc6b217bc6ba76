"""Ingestion and windowing of raw stator-current recordings.

Recordings are single-phase CSV files (``time_s,current_a`` header, one
sample per row, ``#`` comments allowed before the header). The sample
rate is never inferred from timestamps; it is declared by the caller or
by the dataset manifest that references the file.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .motor import FaultClass

__all__ = [
    "CurrentRecording",
    "ManifestEntry",
    "DatasetManifest",
    "load_recording",
    "save_recording",
    "split_windows",
    "window_statistics",
    "WINDOW_STATISTIC_NAMES",
    "load_manifest",
    "save_manifest",
]

MANIFEST_FORMAT_VERSION = 1


@dataclass(frozen=True)
class CurrentRecording:
    """One phase of stator current sampled at a fixed rate.

    Attributes:
        sample_rate_hz: Sampling rate in Hz.
        samples: Current samples in amperes.
        source_id: Provenance tag, unique per physical recording.
        label: Fault class, or None when unlabeled.
    """

    sample_rate_hz: float
    samples: np.ndarray
    source_id: str
    label: FaultClass | None = None

    def __post_init__(self) -> None:
        if self.sample_rate_hz <= 0:
            raise ValueError(f"sample rate must be > 0, got {self.sample_rate_hz}")
        samples = np.asarray(self.samples, dtype=np.float64)
        object.__setattr__(self, "samples", samples)
        if samples.ndim != 1 or samples.size == 0:
            raise ValueError("samples must be a non-empty 1-D array")
        if not np.all(np.isfinite(samples)):
            bad = int(np.flatnonzero(~np.isfinite(samples))[0])
            raise ValueError(f"non-finite sample at index {bad}")


def load_recording(
    path: str | Path,
    sample_rate_hz: float,
    source_id: str | None = None,
    label: FaultClass | None = None,
) -> CurrentRecording:
    """Parse a current recording CSV.

    Args:
        path: CSV file with header ``time_s,current_a``.
        sample_rate_hz: Declared sampling rate (from the manifest sidecar).
        source_id: Provenance tag; defaults to the file stem.
        label: Optional fault class.

    Raises:
        ValueError: On a malformed row (reported with its 1-based line
            number), a non-finite value, a missing header, or an empty
            data section.
    """
    path = Path(path)
    samples: list[float] = []
    header_seen = False
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            if header_seen:
                raise ValueError(f"{path}:{lineno}: comment lines are only allowed before the header")
            continue
        if not header_seen:
            if line.replace(" ", "") != "time_s,current_a":
                raise ValueError(f"{path}:{lineno}: expected header 'time_s,current_a', got {raw!r}")
            header_seen = True
            continue
        parts = line.split(",")
        if len(parts) != 2:
            raise ValueError(f"{path}:{lineno}: expected 2 comma-separated fields, got {len(parts)}")
        try:
            value = float(parts[1])
        except ValueError:
            raise ValueError(f"{path}:{lineno}: cannot parse current value {parts[1]!r}") from None
        if not math.isfinite(value):
            raise ValueError(f"{path}:{lineno}: non-finite current value {parts[1].strip()!r}")
        samples.append(value)
    if not header_seen:
        raise ValueError(f"{path}: missing 'time_s,current_a' header")
    if not samples:
        raise ValueError(f"{path}: no samples")
    return CurrentRecording(
        sample_rate_hz=sample_rate_hz,
        samples=np.asarray(samples, dtype=np.float64),
        source_id=source_id if source_id is not None else path.stem,
        label=label,
    )


def save_recording(rec: CurrentRecording, path: str | Path) -> None:
    """Write a recording in the CSV format read back by :func:`load_recording`.

    Sample values are written with 17 significant digits so finite doubles
    round-trip bit-exactly.
    """
    path = Path(path)
    dt = 1.0 / rec.sample_rate_hz
    lines = [f"# source_id={rec.source_id}", "time_s,current_a"]
    for i, v in enumerate(rec.samples):
        lines.append(f"{i * dt:.9f},{float(v)!r}")
    path.write_text("\n".join(lines) + "\n")


def split_windows(rec: CurrentRecording, window_len: int, hop: int) -> list[np.ndarray]:
    """Slice a recording into fixed-length windows.

    Returns ``floor((len - window_len) / hop) + 1`` windows of exactly
    ``window_len`` samples each; any trailing remainder is discarded.

    Raises:
        ValueError: When the recording is shorter than one window or the
            hop is not positive.
    """
    n = rec.samples.size
    if window_len < 1:
        raise ValueError(f"window length must be >= 1, got {window_len}")
    if hop < 1:
        raise ValueError(f"hop must be >= 1, got {hop}")
    if window_len > n:
        raise ValueError(f"recording too short: {n} samples < window of {window_len}")
    count = (n - window_len) // hop + 1
    return [rec.samples[i * hop : i * hop + window_len].copy() for i in range(count)]


#: Classic condition-monitoring statistics of one time window, in the
#: order produced by :func:`window_statistics`.
WINDOW_STATISTIC_NAMES = (
    "mean", "std", "rms", "peak", "peak_to_peak",
    "crest_factor", "shape_factor", "impulse_factor", "skewness", "kurtosis",
)


def window_statistics(samples: np.ndarray) -> np.ndarray:
    """Generic time-domain statistics of a sample window.

    These are the classic untailored condition-monitoring features (RMS,
    peak, crest, shape, impulse factors, third and fourth standardized
    moments). None of them is localized in frequency.
    """
    x = np.asarray(samples, dtype=np.float64)
    if x.ndim != 1 or x.size < 2:
        raise ValueError(f"need a 1-D window of at least 2 samples, got shape {x.shape}")
    mean = x.mean()
    std = x.std()
    rms = float(np.sqrt(np.mean(x * x)))
    peak = float(np.abs(x).max())
    mean_abs = float(np.abs(x).mean())
    centered = x - mean
    denom = std if std > 0 else 1.0
    return np.array(
        [
            mean,
            std,
            rms,
            peak,
            float(x.max() - x.min()),
            peak / rms if rms > 0 else 0.0,
            rms / mean_abs if mean_abs > 0 else 0.0,
            peak / mean_abs if mean_abs > 0 else 0.0,
            float(np.mean(centered**3)) / denom**3,
            float(np.mean(centered**4)) / denom**4,
        ]
    )


@dataclass(frozen=True)
class ManifestEntry:
    """One dataset file: path, label, motor-config path, sample rate."""

    path: str
    label: FaultClass | None
    motor_params_path: str
    sample_rate_hz: float


@dataclass(frozen=True)
class DatasetManifest:
    """Index of recording files making up a dataset.

    Invariant: every referenced file exists when the manifest is loaded.
    """

    entries: tuple[ManifestEntry, ...]
    format_version: int = MANIFEST_FORMAT_VERSION


def save_manifest(manifest: DatasetManifest, path: str | Path) -> None:
    lines = [f"format_version={manifest.format_version}"]
    for e in manifest.entries:
        label = e.label.value if e.label is not None else "unlabeled"
        lines.append(f"{e.path},{label},{e.motor_params_path},{float(e.sample_rate_hz)!r}")
    Path(path).write_text("\n".join(lines) + "\n")


def load_manifest(path: str | Path) -> DatasetManifest:
    """Load and validate a dataset manifest.

    Entry lines hold ``path,label,motor_config_path,sample_rate_hz``.
    Relative paths are resolved against the manifest's directory.

    Raises:
        ValueError: On a bad version header, malformed entry, or a
            referenced file that does not exist.
    """
    path = Path(path)
    base = path.parent
    lines = [ln for ln in path.read_text().splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines or not lines[0].startswith("format_version="):
        raise ValueError(f"{path}: first line must declare format_version")
    version = int(lines[0].partition("=")[2])
    if version != MANIFEST_FORMAT_VERSION:
        raise ValueError(f"{path}: unsupported manifest version {version}")
    entries = []
    for lineno, line in enumerate(lines[1:], start=2):
        parts = [p.strip() for p in line.split(",")]
        if len(parts) != 4:
            raise ValueError(f"{path}:{lineno}: expected 'path,label,motor_config,sample_rate'")
        rec_path, label_text, motor_path, rate_text = parts
        label = None if label_text == "unlabeled" else FaultClass.from_name(label_text)
        for ref in (rec_path, motor_path):
            if not (base / ref).exists() and not Path(ref).exists():
                raise ValueError(f"{path}:{lineno}: referenced file does not exist: {ref}")
        entries.append(
            ManifestEntry(
                path=rec_path,
                label=label,
                motor_params_path=motor_path,
                sample_rate_hz=float(rate_text),
            )
        )
    return DatasetManifest(entries=tuple(entries), format_version=version)
