"""FFT, truncation, bin mapping, and dataset serialization tests."""

import numpy as np
import pytest

from motorsig.motor import FaultClass
from motorsig.spectrum import (
    SPECTRUM_BINS,
    LabeledDataset,
    SpectrumWindow,
    fft_magnitude,
    frequency_to_bin,
    load_dataset,
    next_power_of_two,
    save_dataset,
    truncate_spectrum,
    window_spectrum,
)


def naive_dft_magnitude(x):
    """O(N^2) reference transform, independent of the FFT path."""
    n = len(x)
    k = np.arange(n // 2 + 1)
    t = np.arange(n)
    basis = np.exp(-2j * np.pi * np.outer(k, t) / n)
    return np.abs(basis @ np.asarray(x, dtype=complex))


class TestFftMagnitude:
    def test_all_ones_dc_exact(self):
        mags = fft_magnitude(np.ones(8))
        assert mags[0] == 8.0
        assert np.all(mags[1:] < 1e-12)

    def test_pure_cosine_bin_magnitude(self):
        # cos at bin 5 of a 32-point window has |X_5| = N/2 = 16
        t = np.arange(32)
        x = np.cos(2 * np.pi * 5 * t / 32)
        mags = fft_magnitude(x)
        assert mags[5] == pytest.approx(16.0, abs=1e-9)
        others = np.delete(mags, 5)
        assert np.all(others < 1e-9)

    def test_parseval_identity(self):
        rng = np.random.default_rng(11)
        for n in (8, 64, 256, 2**14):
            x = rng.standard_normal(n)
            mags = fft_magnitude(x)
            # full two-sided energy from the one-sided magnitudes
            two_sided = mags[0] ** 2 + mags[-1] ** 2 + 2 * np.sum(mags[1:-1] ** 2)
            direct = n * np.sum(x * x)
            assert two_sided == pytest.approx(direct, rel=1e-9)

    def test_matches_naive_dft(self):
        rng = np.random.default_rng(5)
        x = rng.standard_normal(64)
        assert fft_magnitude(x) == pytest.approx(naive_dft_magnitude(x), abs=1e-9)

    def test_linearity_in_scale(self):
        rng = np.random.default_rng(2)
        x = rng.standard_normal(128)
        base = fft_magnitude(x)
        assert fft_magnitude(3.5 * x) == pytest.approx(3.5 * base, rel=1e-12)

    def test_integer_bin_sinusoid_energy_concentration(self):
        n = 4096
        t = np.arange(n)
        x = np.sin(2 * np.pi * 100 * t / n)
        mags = fft_magnitude(x)
        energy = mags**2
        assert energy[100] / energy.sum() >= 0.999

    def test_rejects_non_power_of_two(self):
        with pytest.raises(ValueError, match="power of two"):
            fft_magnitude(np.ones(12))

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError, match="non-finite"):
            fft_magnitude(np.array([1.0, np.nan, 0.0, 0.0]))

    def test_rejects_too_short(self):
        with pytest.raises(ValueError, match="at least 2"):
            fft_magnitude(np.array([1.0]))


class TestTruncate:
    def test_prefix_copied_verbatim(self):
        mags = np.arange(5001, dtype=float)
        win = truncate_spectrum(mags, 1.0)
        assert win.n_bins == SPECTRUM_BINS
        assert win.magnitudes[42] == 42.0

    def test_identity_for_exact_length(self):
        mags = np.abs(np.random.default_rng(0).standard_normal(250))
        win = truncate_spectrum(mags, 1.0)
        assert np.array_equal(win.magnitudes, mags)

    def test_too_short(self):
        with pytest.raises(ValueError, match="too short for truncation"):
            truncate_spectrum(np.ones(100), 1.0)


class TestFrequencyToBin:
    def test_integer_aligned(self):
        assert frequency_to_bin(54.0, 1.0) == 54

    def test_round_half_even(self):
        assert frequency_to_bin(75.6, 1.0) == 76
        assert frequency_to_bin(0.5, 1.0) == 0
        assert frequency_to_bin(1.5, 1.0) == 2
        assert frequency_to_bin(2.5, 1.0) == 2

    def test_outside_band(self):
        with pytest.raises(ValueError, match="outside truncated band"):
            frequency_to_bin(300.0, 1.0)

    def test_negative_rejected(self):
        with pytest.raises(ValueError, match=">= 0"):
            frequency_to_bin(-1.0, 1.0)


class TestWindowSpectrum:
    def test_zero_pads_and_recomputes_bin_width(self):
        rng = np.random.default_rng(1)
        samples = rng.standard_normal(6000)
        win = window_spectrum(samples, sample_rate_hz=10000.0)
        assert next_power_of_two(6000) == 8192
        assert win.bin_width_hz == pytest.approx(10000.0 / 8192)

    def test_exact_power_of_two_keeps_resolution(self):
        samples = np.sin(2 * np.pi * 50 * np.arange(8192) / 8192.0)
        win = window_spectrum(samples, sample_rate_hz=8192.0)
        assert win.bin_width_hz == 1.0
        assert win.magnitudes.argmax() == 50


class TestSpectrumWindowInvariants:
    def test_rejects_negative(self):
        with pytest.raises(ValueError, match="non-negative"):
            SpectrumWindow(np.array([-1.0, 2.0]), 1.0)

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError, match="finite"):
            SpectrumWindow(np.array([1.0, np.inf]), 1.0)

    def test_pipeline_windows_have_250_bins(self):
        win = window_spectrum(np.ones(8192), 8192.0)
        assert win.n_bins == SPECTRUM_BINS


class TestDatasetSerialization:
    def build(self, n=4):
        rng = np.random.default_rng(9)
        windows = []
        labels = [FaultClass.HEALTHY, FaultClass.ROTOR_BAR, None, FaultClass.BEARING_BALL]
        for i in range(n):
            windows.append(
                SpectrumWindow(
                    np.abs(rng.standard_normal(250)) * 1234.5678901234567,
                    1.0,
                    origin=f"src-{i}:0",
                    label=labels[i % len(labels)],
                )
            )
        return LabeledDataset(windows=tuple(windows))

    def test_round_trip_exact(self, tmp_path):
        dataset = self.build()
        path = tmp_path / "data.csv"
        save_dataset(dataset, path)
        loaded = load_dataset(path)
        assert len(loaded) == len(dataset)
        for a, b in zip(dataset, loaded):
            # repr round-trips doubles exactly, beating the 15-digit floor
            assert np.array_equal(a.magnitudes, b.magnitudes)
            assert a.label == b.label
            assert a.origin == b.origin
            assert a.bin_width_hz == b.bin_width_hz

    def test_rejects_unknown_file(self, tmp_path):
        path = tmp_path / "data.csv"
        path.write_text("m0,m1\n")
        with pytest.raises(ValueError, match="not a motorsig spectra file"):
            load_dataset(path)

    def test_rejects_bad_column_count(self, tmp_path):
        dataset = self.build(1)
        path = tmp_path / "data.csv"
        save_dataset(dataset, path)
        lines = path.read_text().splitlines()
        lines.append("1.0,healthy")
        path.write_text("\n".join(lines) + "\n")
        with pytest.raises(ValueError, match="columns"):
            load_dataset(path)

    def test_label_counts(self):
        dataset = self.build(8)
        counts = dataset.label_counts()
        assert sum(counts.values()) == 8
        assert counts[FaultClass.HEALTHY] == 2
        assert counts[None] == 2

    def test_classes_in_definition_order(self):
        dataset = self.build(8)
        classes = dataset.classes()
        order = {f: i for i, f in enumerate(FaultClass)}
        assert classes == sorted(classes, key=lambda c: order[c])
