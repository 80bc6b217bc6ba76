"""Peak-segment extraction, generation, and re-insertion.

Anomalies are fabricated by inserting a synthetic spectral peak into a
healthy window at one of the fault's signature frequencies. The unit of
work is a 20-bin segment centered on the target bin, min-max normalized
so generated peaks live in [0, 1] and can be denormalized back to the
amplitude range of the window they are inserted into.

Insertion blends by element-wise maximum: generated peaks decay toward
the segment floor, so the result stays continuous at the segment edges
and never digs below the original spectrum.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Protocol

import numpy as np

from .motor import FaultClass, MotorParameters, signature_frequencies
from .spectrum import LabeledDataset, SpectrumWindow, frequency_to_bin

__all__ = [
    "SEGMENT_LEN",
    "PeakSegment",
    "PeakSource",
    "GaussianPeakSource",
    "extract_segment",
    "gaussian_peak",
    "denormalize",
    "insert_peak",
    "insertable_bins",
    "peak_training_bins",
    "collect_segments",
    "build_augmented_dataset",
    "AMP_FRACTION_RANGE",
    "SIGMA_RANGE",
]

#: Fixed peak-segment length in spectrum bins.
SEGMENT_LEN = 20
_HALF = SEGMENT_LEN // 2

#: Injected peak amplitude as a fraction of (window max - segment baseline).
AMP_FRACTION_RANGE = (0.3, 1.0)

#: Gaussian kernel width range (bins) for generator-free peak synthesis.
SIGMA_RANGE = (0.5, 2.0)


@dataclass(frozen=True)
class PeakSegment:
    """A 20-bin normalized spectral slice.

    Attributes:
        values: 20 reals in [0, 1]; min 0 and max 1 unless degenerate.
        center_bin: Spectrum bin the segment is centered on, or None for
            generated segments that have not been placed yet.
        seg_min: Minimum of the original (pre-normalization) bins.
        seg_max: Maximum of the original bins.
        degenerate: True when the original segment had zero range; such
            segments normalize to all zeros and are excluded from
            generator training.
    """

    values: np.ndarray
    center_bin: int | None = None
    seg_min: float = 0.0
    seg_max: float = 1.0
    degenerate: bool = False

    def __post_init__(self) -> None:
        vals = np.asarray(self.values, dtype=np.float64)
        object.__setattr__(self, "values", vals)
        if vals.shape != (SEGMENT_LEN,):
            raise ValueError(f"segment must have exactly {SEGMENT_LEN} values, got shape {vals.shape}")
        if not np.all(np.isfinite(vals)):
            raise ValueError("segment values must be finite")
        if vals.min() < -1e-12 or vals.max() > 1.0 + 1e-12:
            raise ValueError("segment values must lie in [0, 1]")
        if self.seg_max < self.seg_min:
            raise ValueError("seg_max must be >= seg_min")


class PeakSource(Protocol):
    """Anything that can draw normalized 20-bin peak shapes."""

    def sample(self, rng: np.random.Generator) -> PeakSegment: ...


def segment_bounds(center_bin: int) -> tuple[int, int]:
    """Half-open bin range [start, stop) of the segment at ``center_bin``."""
    return center_bin - _HALF, center_bin + _HALF


def extract_segment(spec: SpectrumWindow, center_bin: int) -> PeakSegment:
    """Extract and min-max normalize the 20-bin segment at ``center_bin``.

    Raises:
        ValueError: When the segment would extend outside the band.
    """
    start, stop = segment_bounds(center_bin)
    if start < 0 or stop > spec.n_bins:
        raise ValueError(
            f"segment [{start}, {stop}) at center {center_bin} lies outside band [0, {spec.n_bins})"
        )
    raw = spec.magnitudes[start:stop]
    seg_min = float(raw.min())
    seg_max = float(raw.max())
    span = seg_max - seg_min
    if span == 0.0:
        return PeakSegment(
            values=np.zeros(SEGMENT_LEN),
            center_bin=center_bin,
            seg_min=seg_min,
            seg_max=seg_max,
            degenerate=True,
        )
    return PeakSegment(
        values=(raw - seg_min) / span,
        center_bin=center_bin,
        seg_min=seg_min,
        seg_max=seg_max,
    )


def gaussian_peak(width_bins: float, amplitude: float = 1.0) -> PeakSegment:
    """Unit impulse at the segment center smoothed by a Gaussian kernel.

    The impulse sits at index ``SEGMENT_LEN // 2``; after convolution the
    segment is scaled so its maximum equals ``amplitude``.

    Raises:
        ValueError: For non-positive width or amplitude outside (0, 1].
    """
    if width_bins <= 0:
        raise ValueError(f"kernel width must be > 0, got {width_bins}")
    if not 0.0 < amplitude <= 1.0:
        raise ValueError(f"amplitude must lie in (0, 1], got {amplitude}")
    offsets = np.arange(SEGMENT_LEN) - _HALF
    kernel = np.exp(-0.5 * (offsets / width_bins) ** 2)
    values = kernel / kernel.max() * amplitude
    return PeakSegment(values=values)


def denormalize(seg: PeakSegment, target_min: float, target_max: float) -> np.ndarray:
    """Map normalized segment values onto [target_min, target_max].

    Raises:
        ValueError: When target_max < target_min.
    """
    if target_max < target_min:
        raise ValueError(f"target_max {target_max} < target_min {target_min}")
    return target_min + seg.values * (target_max - target_min)


def insert_peak(
    spec: SpectrumWindow,
    seg_values: np.ndarray,
    center_bin: int,
    label: FaultClass,
) -> SpectrumWindow:
    """Blend a denormalized 20-bin peak into a window by element-wise max.

    Bins outside the segment are copied bit-exactly; the result carries the
    injected fault label.

    Raises:
        ValueError: When the segment length is not 20 or extends outside
            the band.
    """
    seg_values = np.asarray(seg_values, dtype=np.float64)
    if seg_values.shape != (SEGMENT_LEN,):
        raise ValueError(f"segment must have exactly {SEGMENT_LEN} values, got shape {seg_values.shape}")
    start, stop = segment_bounds(center_bin)
    if start < 0 or stop > spec.n_bins:
        raise ValueError(
            f"segment [{start}, {stop}) at center {center_bin} lies outside band [0, {spec.n_bins})"
        )
    mags = spec.magnitudes.copy()
    np.maximum(mags[start:stop], seg_values, out=mags[start:stop])
    return SpectrumWindow(
        magnitudes=mags,
        bin_width_hz=spec.bin_width_hz,
        origin=spec.origin,
        label=label,
    )


@dataclass(frozen=True)
class GaussianPeakSource:
    """Generator-free peak source: Gaussian bumps of varying width."""

    sigma_range: tuple[float, float] = SIGMA_RANGE
    amplitude: float = 1.0

    def sample(self, rng: np.random.Generator) -> PeakSegment:
        sigma = rng.uniform(*self.sigma_range)
        return gaussian_peak(sigma, self.amplitude)


def insertable_bins(
    params: MotorParameters,
    fault: FaultClass,
    bin_width_hz: float,
    n_bins: int,
    max_order: int = 1,
    user_frequencies_hz: tuple[float, ...] | None = None,
) -> list[int]:
    """Signature bins of ``fault`` whose 20-bin segment fits in the band.

    Raises:
        ValueError: When every signature frequency falls outside the
            insertable band (error names the fault).
    """
    sig = signature_frequencies(
        params,
        fault,
        max_order=max_order,
        band_limit_hz=n_bins * bin_width_hz,
        user_frequencies_hz=user_frequencies_hz,
    )
    bins = []
    for f in sig.frequencies_hz:
        try:
            b = frequency_to_bin(f, bin_width_hz)
        except ValueError:
            continue
        if _HALF <= b <= n_bins - _HALF:
            bins.append(b)
    if not bins:
        raise ValueError(
            f"fault {fault.value}: every signature frequency falls outside the insertable band"
        )
    return sorted(set(bins))


def peak_training_bins(
    supply_frequency_hz: float,
    harmonic_orders: tuple[int, ...],
    bin_width_hz: float,
    n_bins: int,
) -> list[int]:
    """Bins holding genuine peaks in healthy spectra: the supply
    fundamental and its harmonics, restricted to insertable centers.

    Healthy data contains real spectral peaks only there, so these
    segments are what a generator can learn peak shapes from without any
    anomalous recordings.
    """
    bins = []
    for order in (1, *harmonic_orders):
        try:
            b = frequency_to_bin(order * supply_frequency_hz, bin_width_hz)
        except ValueError:
            continue
        if _HALF <= b <= n_bins - _HALF:
            bins.append(b)
    return sorted(set(bins))


def collect_segments(windows, center_bins: list[int]) -> list[PeakSegment]:
    """Extract non-degenerate training segments at the given centers."""
    segments = []
    for w in windows:
        for b in center_bins:
            seg = extract_segment(w, b)
            if not seg.degenerate:
                segments.append(seg)
    return segments


def build_augmented_dataset(
    healthy: list[SpectrumWindow] | tuple[SpectrumWindow, ...],
    params: MotorParameters,
    faults: list[FaultClass] | tuple[FaultClass, ...],
    generator: PeakSource,
    per_class: int,
    seed: int,
    max_order: int = 1,
    user_frequencies_hz: tuple[float, ...] | None = None,
    amp_fraction_range: tuple[float, float] = AMP_FRACTION_RANGE,
) -> LabeledDataset:
    """Build a class-balanced dataset of healthy and peak-injected windows.

    Returns ``per_class`` unmodified healthy windows (the first ones of the
    pool) followed by ``per_class`` injected windows per fault. Each
    injected window gets one generated peak at a uniformly chosen signature
    frequency of its fault; the peak maximum is drawn between 30% and 100%
    of the gap from the segment baseline (median of the original 20 bins)
    to the window's global maximum.

    Every injected window is derived from an independent random substream
    of ``seed``, so the construction order cannot change the result. The
    window's origin is ``"<source origin>~<fault><i>"``, which preserves
    the source recording id for leakage checks.

    Raises:
        ValueError: On an empty pool or fault list, a pool smaller than
            ``per_class``, or a fault with no insertable signature bin.
    """
    healthy = list(healthy)
    if not healthy:
        raise ValueError("healthy window pool is empty")
    if not faults:
        raise ValueError("fault list is empty")
    if per_class < 1:
        raise ValueError(f"per_class must be >= 1, got {per_class}")
    if len(healthy) < per_class:
        raise ValueError(f"need at least {per_class} healthy windows, got {len(healthy)}")
    widths = {w.bin_width_hz for w in healthy}
    if len(widths) != 1:
        raise ValueError(f"healthy pool mixes bin widths: {sorted(widths)}")
    n_bins = healthy[0].n_bins
    bin_width = healthy[0].bin_width_hz

    fault_bins = {
        fault: insertable_bins(
            params, fault, bin_width, n_bins, max_order=max_order,
            user_frequencies_hz=user_frequencies_hz,
        )
        for fault in faults
    }

    windows: list[SpectrumWindow] = [w.with_label(FaultClass.HEALTHY) for w in healthy[:per_class]]
    streams = np.random.SeedSequence(seed).spawn(len(faults) * per_class)
    lo, hi = amp_fraction_range
    for fi, fault in enumerate(faults):
        bins = fault_bins[fault]
        for j in range(per_class):
            rng = np.random.default_rng(streams[fi * per_class + j])
            src = healthy[int(rng.integers(len(healthy)))]
            center = int(bins[int(rng.integers(len(bins)))])
            peak = generator.sample(rng)
            start, stop = segment_bounds(center)
            original = src.magnitudes[start:stop]
            baseline = float(np.median(original))
            global_max = float(src.magnitudes.max())
            amp = baseline + rng.uniform(lo, hi) * (global_max - baseline)
            values = denormalize(peak, target_min=float(original.min()), target_max=amp)
            injected = insert_peak(src, values, center, label=fault)
            windows.append(
                SpectrumWindow(
                    magnitudes=injected.magnitudes,
                    bin_width_hz=bin_width,
                    origin=f"{src.origin}~{fault.value}{j}",
                    label=fault,
                )
            )
    return LabeledDataset(windows=tuple(windows))
