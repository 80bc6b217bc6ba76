"""VAE tests: KL closed form vs quadrature, reparameterization, training
behavior, and peak generation guarantees."""

import numpy as np
import pytest
from scipy import integrate

from motorsig.augment import PeakSegment, extract_segment, gaussian_peak
from motorsig.motor import FaultClass, MotorParameters
from motorsig.sim_oracle import SimSpec, simulate
from motorsig.spectrum import window_spectrum
from motorsig.vae import (
    VaeModel,
    VaePeakSource,
    generate_peaks,
    kl_unit_gaussian,
    reparameterize,
    train_vae,
)


def kl_by_quadrature(mu, logvar):
    """Independent oracle: numerically integrate p(x) log(p(x)/q(x))."""
    sigma = np.exp(0.5 * logvar)

    def integrand(x):
        p = np.exp(-0.5 * ((x - mu) / sigma) ** 2) / (sigma * np.sqrt(2 * np.pi))
        q = np.exp(-0.5 * x**2) / np.sqrt(2 * np.pi)
        return p * np.log(p / q) if p > 0 else 0.0

    lo = mu - 12 * max(sigma, 1.0)
    hi = mu + 12 * max(sigma, 1.0)
    value, _ = integrate.quad(integrand, lo, hi, limit=200)
    return value


class TestKlClosedForm:
    def test_identical_distributions(self):
        assert kl_unit_gaussian(np.zeros(3), np.zeros(3)) == 0.0

    def test_unit_mean_shift(self):
        # 0.5 * (1 + 1 - 1 - 0)
        assert kl_unit_gaussian(np.array([1.0]), np.array([0.0])) == pytest.approx(0.5)

    def test_matches_quadrature(self):
        rng = np.random.default_rng(12)
        for _ in range(10):
            mu = float(rng.uniform(-2, 2))
            logvar = float(rng.uniform(-2, 1.5))
            closed = kl_unit_gaussian(np.array([mu]), np.array([logvar]))
            assert closed == pytest.approx(kl_by_quadrature(mu, logvar), abs=1e-6)

    def test_non_negative(self):
        rng = np.random.default_rng(3)
        for _ in range(100):
            mu = rng.standard_normal(4)
            logvar = rng.uniform(-3, 3, 4)
            assert kl_unit_gaussian(mu, logvar) >= 0.0

    def test_zero_only_at_standard_normal(self):
        assert kl_unit_gaussian(np.array([1e-7]), np.array([0.0])) > 0.0
        assert kl_unit_gaussian(np.array([0.0]), np.array([1e-6])) > 0.0

    def test_shape_mismatch(self):
        with pytest.raises(ValueError, match="shape mismatch"):
            kl_unit_gaussian(np.zeros(2), np.zeros(3))

    def test_non_finite_rejected(self):
        with pytest.raises(ValueError, match="finite"):
            kl_unit_gaussian(np.array([np.nan]), np.array([0.0]))


class TestReparameterize:
    def test_zero_noise_returns_mean(self):
        mu = np.array([1.0, -2.0])
        assert np.array_equal(reparameterize(mu, np.zeros(2), np.zeros(2)), mu)

    def test_unit_variance_shift(self):
        z = reparameterize(np.array([3.0]), np.array([0.0]), np.array([1.0]))
        assert z == pytest.approx([4.0])

    def test_monte_carlo_mean(self):
        rng = np.random.default_rng(0)
        mu = np.array([0.7])
        logvar = np.array([0.4])
        n = 100_000
        draws = np.array([reparameterize(mu, logvar, rng.standard_normal(1))[0] for _ in range(200)])
        # vectorized equivalent for the big sample
        eps = rng.standard_normal(n)
        z = mu[0] + np.exp(0.5 * logvar[0]) * eps
        sigma = np.exp(0.5 * logvar[0])
        assert abs(z.mean() - mu[0]) < 3 * sigma / np.sqrt(n)
        assert abs(draws.mean() - mu[0]) < 4 * sigma / np.sqrt(200)


def gaussian_corpus(n=240, seed=0):
    rng = np.random.default_rng(seed)
    return [gaussian_peak(float(rng.uniform(0.5, 2.0)), 1.0) for _ in range(n)]


def simulator_peak_corpus():
    """Segments extracted from simulated faulty spectra at signature bins."""
    params = MotorParameters(50.0, 2, 0.04, 9, 7.5, 25.0)
    segments = []
    for seed in range(40):
        spec = SimSpec(params=params, fault=FaultClass.INTER_TURN_SHORT, fault_amp_db=-6.0, seed=seed)
        rec = simulate(spec)
        win = window_spectrum(rec.samples, rec.sample_rate_hz)
        for b in (26, 74, 126, 174, 226):
            seg = extract_segment(win, b)
            if not seg.degenerate:
                segments.append(seg)
    return segments


class TestTraining:
    def test_loss_decreases(self):
        model = train_vae(gaussian_corpus(), epochs=60, seed=0)
        assert model.loss_history[-1] < model.loss_history[0]
        assert np.all(np.isfinite(model.loss_history))

    def test_deterministic(self):
        a = train_vae(gaussian_corpus(), epochs=15, seed=5)
        b = train_vae(gaussian_corpus(), epochs=15, seed=5)
        for pa, pb in zip(a.parameters(), b.parameters()):
            assert np.array_equal(pa.data, pb.data)

    def test_needs_a_full_batch(self):
        with pytest.raises(ValueError, match="one batch"):
            train_vae(gaussian_corpus(10), epochs=1)

    def test_degenerate_segments_excluded(self):
        degenerate = [PeakSegment(values=np.zeros(20), degenerate=True) for _ in range(40)]
        with pytest.raises(ValueError, match="non-degenerate"):
            train_vae(degenerate, epochs=1)

    def test_reconstruction_error_on_simulator_corpus(self):
        segments = simulator_peak_corpus()
        model = train_vae(segments, epochs=500, seed=1)
        data = np.stack([s.values for s in segments])
        from motorsig.neural import Tensor

        mu, _ = model.encode(Tensor(data))
        recon = model.decode(mu).data
        mse = float(np.mean((recon - data) ** 2))
        assert mse < 0.02

    def test_checkpoint_round_trip(self, tmp_path):
        model = train_vae(gaussian_corpus(64), epochs=10, seed=2)
        path = tmp_path / "vae.ckpt"
        model.save(path)
        fresh = VaeModel.create(seed=99)
        fresh.load(path)
        z = np.random.default_rng(0).standard_normal((4, model.latent_dim))
        assert np.array_equal(model.decode_array(z), fresh.decode_array(z))


@pytest.fixture(scope="module")
def model():
    return train_vae(gaussian_corpus(), epochs=400, seed=3)


class TestGeneration:

    def test_zero_draws(self, model):
        assert generate_peaks(model, 0) == []

    def test_values_in_unit_interval(self, model):
        for seg in generate_peaks(model, 50, seed=1):
            assert seg.values.min() >= 0.0
            assert seg.values.max() <= 1.0
            assert seg.values.max() == pytest.approx(1.0)  # rescaled to unit max

    def test_non_collapse(self, model):
        segs = generate_peaks(model, 100, seed=2)
        stack = np.stack([s.values for s in segs])
        dists = [
            np.linalg.norm(stack[i] - stack[j])
            for i in range(20)
            for j in range(i + 1, 20)
        ]
        assert np.mean(dists) > 1e-3

    def test_unimodal_majority(self, model):
        segs = generate_peaks(model, 100, seed=4)
        unimodal = 0
        for seg in segs:
            diff = np.diff(seg.values)
            diff = np.where(np.abs(diff) <= 0.02, 0.0, diff)
            signs = np.sign(diff)
            signs = signs[signs != 0]
            changes = int(np.sum(signs[1:] != signs[:-1])) if signs.size else 0
            unimodal += changes <= 1
        assert unimodal >= 90

    def test_degenerate_generator_detected(self):
        model = VaeModel.create(seed=0)
        model.dec_out.bias.data[:] = -50.0  # decoder pinned near zero
        with pytest.raises(RuntimeError, match="degenerate generator"):
            generate_peaks(model, 5, seed=0)

    def test_source_determinism(self, model):
        source = VaePeakSource(model)
        a = source.sample(np.random.default_rng(11)).values
        b = source.sample(np.random.default_rng(11)).values
        assert np.array_equal(a, b)

    def test_source_degenerate_error(self):
        model = VaeModel.create(seed=0)
        model.dec_out.bias.data[:] = -50.0
        with pytest.raises(RuntimeError, match="degenerate generator"):
            VaePeakSource(model).sample(np.random.default_rng(0))
