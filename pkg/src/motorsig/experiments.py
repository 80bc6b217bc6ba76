"""Experiment protocols: synthetic-only and simulator-tested benchmarks.

Five protocols are provided:

  E1       binary, train and test on healthy + injected anomalies
  E2       five-class with Gaussian-kernel generation; SVM comparator
  E3       binary, train on injected anomalies, test on simulated faults
  E4       three-class variant of E3
  EPSILON  accuracy of CNN/SVM/MLP vs number of real anomalous training
           windows, against the injection approach that uses none

Each run is reproducible from its config: corpora, generators, and model
training all derive from per-purpose substreams of the experiment seeds,
and the emitted CSV is byte-identical across reruns of one config.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, fields, replace
from pathlib import Path

import numpy as np

from .augment import (
    GaussianPeakSource,
    build_augmented_dataset,
    collect_segments,
    insertable_bins,
    peak_training_bins,
)
from .classifier import (
    EvalReport,
    ResNetConfig,
    SeedStats,
    aggregate_reports,
    build_resnet,
    evaluate,
    report_from_predictions,
    train,
    train_mlp,
    train_mlp_arrays,
    train_svm,
)
from .motor import FaultClass, MotorParameters
from .signal_io import window_statistics
from .sim_oracle import SimSpec, simulate
from .spectrum import LabeledDataset, SpectrumWindow, frequency_to_bin, next_power_of_two, save_dataset, window_spectrum
from .vae import VaePeakSource, train_vae

__all__ = [
    "DataLeakageError",
    "ExperimentConfig",
    "ExperimentResult",
    "ReportRow",
    "default_config",
    "parse_config_overrides",
    "load_experiment_config",
    "config_canonical_text",
    "config_hash",
    "run_e1",
    "run_e2",
    "run_e3",
    "run_e4",
    "run_epsilon",
    "run_experiment",
    "render_table",
    "write_report_csv",
    "read_report_csv",
    "ensure_no_leakage",
]

EXPERIMENT_IDS = ("E1", "E2", "E3", "E4", "EPSILON")

SGDA_MODEL = "sgda_resnet"


class DataLeakageError(RuntimeError):
    """A test recording shares its source with a training recording."""


@dataclass(frozen=True)
class ExperimentConfig:
    """Resolved configuration of one experiment run."""

    experiment_id: str
    generator_option: str
    faults: tuple[FaultClass, ...]
    seeds: tuple[int, ...] = (0, 1, 2, 3, 4)
    train_per_class: int = 300
    test_per_class: int = 100
    severity_grid_db: tuple[float, ...] = (-20.0, -30.0, -40.0)
    fault_amp_db: float = -20.0
    counts: tuple[int, ...] = (1, 10, 25, 50, 100, 300)
    # motor physics
    supply_frequency_hz: float = 50.0
    pole_pairs: int = 2
    slip: float = 0.04
    n_balls: int = 9
    ball_diameter_mm: float = 7.5
    pitch_diameter_mm: float = 25.0
    contact_angle_rad: float = 0.0
    mechanical_frequencies_hz: tuple[float, ...] = ()
    max_order: int = 1
    # simulated corpus
    window_len: int = 8192
    sample_rate_hz: float = 8192.0
    noise_std: float = 0.005
    fundamental_amp: float = 1.0
    # per-recording load variation: amplitude drawn uniformly within
    # fundamental_amp * (1 +/- amp_variation)
    amp_variation: float = 0.07
    harmonic_amps: tuple[tuple[int, float], ...] = ((3, 0.05), (5, 0.02))
    # generators
    amp_fraction_range: tuple[float, float] = (0.3, 1.0)
    sigma_range: tuple[float, float] = (0.5, 2.0)
    vae_epochs: int = 300
    vae_max_segments: int = 320
    # classifier training
    epochs: int = 4
    batch_size: int = 16
    lr: float = 1e-3
    block_channels: tuple[int, ...] = (16, 32, 64, 128)
    kernel_size: int = 7
    svm_c: float = 1000.0
    svm_epochs: int = 300
    mlp_hidden: tuple[int, ...] = (64,)
    mlp_epochs: int = 10
    # epsilon MLP input: "stats" feeds untailored time-domain statistics
    # (the comparator cannot adapt its features to unseen anomalies);
    # "spectrum" feeds the raw 250-bin magnitudes instead
    mlp_features: str = "stats"
    # protocol knobs
    real_anomaly_fraction: float = 0.0
    test_synthetic_fraction: float = 0.0

    def __post_init__(self) -> None:
        if self.experiment_id not in EXPERIMENT_IDS:
            raise ValueError(f"unknown experiment id {self.experiment_id!r}; expected one of {EXPERIMENT_IDS}")
        if self.generator_option not in ("A", "B"):
            raise ValueError(f"generator option must be 'A' (VAE) or 'B' (Gaussian kernel), got {self.generator_option!r}")
        if not self.seeds:
            raise ValueError("seeds must be non-empty")
        if not self.faults or any(f is FaultClass.HEALTHY for f in self.faults):
            raise ValueError("faults must be a non-empty list of anomalous classes")
        if self.experiment_id in ("E2", "E4") and len(self.faults) < 2:
            raise ValueError(f"{self.experiment_id} needs at least 2 anomalous classes, got {len(self.faults)}")
        if not 0.0 <= self.real_anomaly_fraction <= 1.0:
            raise ValueError(f"real_anomaly_fraction must lie in [0, 1], got {self.real_anomaly_fraction}")
        if not 0.0 <= self.test_synthetic_fraction <= 1.0:
            raise ValueError(f"test_synthetic_fraction must lie in [0, 1], got {self.test_synthetic_fraction}")
        if not 0.0 <= self.amp_variation < 1.0:
            raise ValueError(f"amp_variation must lie in [0, 1), got {self.amp_variation}")
        if self.mlp_features not in ("stats", "spectrum"):
            raise ValueError(f"mlp_features must be 'stats' or 'spectrum', got {self.mlp_features!r}")

    def motor(self) -> MotorParameters:
        return MotorParameters(
            supply_frequency_hz=self.supply_frequency_hz,
            pole_pairs=self.pole_pairs,
            slip=self.slip,
            n_balls=self.n_balls,
            ball_diameter_mm=self.ball_diameter_mm,
            pitch_diameter_mm=self.pitch_diameter_mm,
            contact_angle_rad=self.contact_angle_rad,
        )

    def feature_scale(self) -> float:
        """2 / N_fft: converts magnitudes to sinusoid-amplitude units."""
        return 2.0 / next_power_of_two(self.window_len)

    def user_frequencies(self) -> tuple[float, ...] | None:
        return self.mechanical_frequencies_hz or None

    def n_classes(self) -> int:
        return 1 + len(self.faults)

    def class_list(self) -> list[FaultClass]:
        ordered = [f for f in FaultClass if f in self.faults]
        return [FaultClass.HEALTHY, *ordered]


_EXPERIMENT_DEFAULTS: dict[str, dict] = {
    "E1": dict(generator_option="A", faults=(FaultClass.ROTOR_BAR,)),
    "E2": dict(
        generator_option="B",
        faults=(
            FaultClass.ROTOR_BAR,
            FaultClass.BEARING_OUTER_RACE,
            FaultClass.BEARING_INNER_RACE,
            FaultClass.BEARING_BALL,
        ),
    ),
    "E3": dict(generator_option="A", faults=(FaultClass.INTER_TURN_SHORT,)),
    # mechanical_other stands in for rotor imbalance / looseness, which show
    # up at rotational-frequency harmonics k * f_r (f_r = 24 Hz by default)
    "E4": dict(
        generator_option="A",
        faults=(FaultClass.INTER_TURN_SHORT, FaultClass.MECHANICAL_OTHER),
        mechanical_frequencies_hz=(24.0, 48.0, 72.0, 96.0, 120.0),
    ),
    "EPSILON": dict(generator_option="A", faults=(FaultClass.INTER_TURN_SHORT,)),
}


def default_config(experiment_id: str) -> ExperimentConfig:
    eid = experiment_id.upper()
    if eid not in _EXPERIMENT_DEFAULTS:
        raise ValueError(f"unknown experiment id {experiment_id!r}; expected one of {EXPERIMENT_IDS}")
    return ExperimentConfig(experiment_id=eid, **_EXPERIMENT_DEFAULTS[eid])


def _parse_value(name: str, text: str):
    text = text.strip()
    if name in ("faults",):
        return tuple(FaultClass.from_name(t) for t in text.split(",") if t.strip())
    if name == "harmonic_amps":
        pairs = []
        for item in text.split(","):
            if not item.strip():
                continue
            order, _, amp = item.partition(":")
            pairs.append((int(order), float(amp)))
        return tuple(pairs)
    if name in ("generator_option", "experiment_id"):
        return text.upper()
    if name == "mlp_features":
        return text.lower()
    if name in ("seeds", "counts", "block_channels", "mlp_hidden"):
        return tuple(int(t) for t in text.split(",") if t.strip())
    if name in ("severity_grid_db", "mechanical_frequencies_hz", "amp_fraction_range", "sigma_range"):
        return tuple(float(t) for t in text.split(",") if t.strip())
    if name in ("pole_pairs", "n_balls", "max_order", "window_len", "train_per_class", "test_per_class",
                "vae_epochs", "vae_max_segments", "epochs", "batch_size", "kernel_size", "svm_epochs",
                "mlp_epochs"):
        return int(text)
    return float(text)


def parse_config_overrides(text: str) -> dict:
    """Parse ``key = value`` lines into ExperimentConfig field overrides."""
    known = {f.name for f in fields(ExperimentConfig)}
    overrides: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        if key not in known:
            raise ValueError(f"line {lineno}: unknown config key {key!r}")
        overrides[key] = _parse_value(key, value)
    return overrides


def load_experiment_config(experiment_id: str, config_path: str | Path | None = None) -> ExperimentConfig:
    """Defaults for ``experiment_id`` overlaid with a config file, if any."""
    cfg = default_config(experiment_id)
    if config_path is None:
        return cfg
    overrides = parse_config_overrides(Path(config_path).read_text())
    declared = overrides.pop("experiment_id", None)
    if declared is not None and declared != cfg.experiment_id:
        raise ValueError(f"config file declares experiment {declared}, but {cfg.experiment_id} was requested")
    return replace(cfg, **overrides)


def _canonical_value(value) -> str:
    if isinstance(value, tuple):
        return ",".join(_canonical_value(v) for v in value)
    if isinstance(value, FaultClass):
        return value.value
    if isinstance(value, float):
        return repr(value)
    return str(value)


def config_canonical_text(cfg: ExperimentConfig) -> str:
    lines = []
    for f in fields(ExperimentConfig):
        value = getattr(cfg, f.name)
        if f.name == "harmonic_amps":
            rendered = ",".join(f"{o}:{a!r}" for o, a in value)
        else:
            rendered = _canonical_value(value)
        lines.append(f"{f.name} = {rendered}")
    return "\n".join(lines) + "\n"


def config_hash(cfg: ExperimentConfig) -> str:
    return hashlib.sha256(config_canonical_text(cfg).encode()).hexdigest()[:12]


# --------------------------------------------------------------------------
# corpus construction


def _purpose_seed(seed: int, tag: int) -> int:
    """Independent integer sub-seed for one purpose within one run seed."""
    return int(np.random.SeedSequence([seed, tag]).generate_state(1)[0])


_TAG_TRAIN_POOL = 0
_TAG_VAE = 1
_TAG_AUGMENT_TRAIN = 2
_TAG_TEST_POOL = 3
_TAG_AUGMENT_TEST = 4
_TAG_MODEL = 5
_TAG_TEST_FAULT = 6
_TAG_TRAIN_FAULT = 7


def _sim_records(
    cfg: ExperimentConfig,
    fault: FaultClass,
    n: int,
    master_seed: int,
    id_tag: str,
    fault_amp_db: float | None = None,
):
    """n single-window recordings, each from its own seeded simulation.

    Per-recording fundamental amplitudes jitter uniformly within
    ``1 +/- amp_variation`` to model load variation between recordings.
    """
    rng = np.random.default_rng(master_seed)
    rec_seeds = rng.integers(0, 2**62, size=n)
    amps = cfg.fundamental_amp * rng.uniform(1.0 - cfg.amp_variation, 1.0 + cfg.amp_variation, size=n)
    duration = cfg.window_len / cfg.sample_rate_hz
    records = []
    for i, (s, amp) in enumerate(zip(rec_seeds, amps)):
        spec = SimSpec(
            params=cfg.motor(),
            fault=fault,
            fault_amp_db=cfg.fault_amp_db if fault_amp_db is None else fault_amp_db,
            fundamental_amp=float(amp),
            harmonic_amps=dict(cfg.harmonic_amps),
            noise_std=cfg.noise_std,
            duration_s=duration,
            sample_rate_hz=cfg.sample_rate_hz,
            seed=int(s),
            max_order=cfg.max_order,
            mechanical_frequencies_hz=cfg.mechanical_frequencies_hz,
            source_id=f"sim-{fault.value}-{id_tag}-{i}",
        )
        records.append(simulate(spec))
    return records


def _spectra(records, label: FaultClass) -> list[SpectrumWindow]:
    return [
        window_spectrum(rec.samples, rec.sample_rate_hz, origin=f"{rec.source_id}:0", label=label)
        for rec in records
    ]


def _sim_windows(
    cfg: ExperimentConfig,
    fault: FaultClass,
    n: int,
    master_seed: int,
    id_tag: str,
    fault_amp_db: float | None = None,
) -> list[SpectrumWindow]:
    return _spectra(_sim_records(cfg, fault, n, master_seed, id_tag, fault_amp_db), fault)


def _fault_signature_bins(cfg: ExperimentConfig, fault: FaultClass, bin_width_hz: float, n_bins: int) -> list[int]:
    return insertable_bins(
        cfg.motor(), fault, bin_width_hz, n_bins,
        max_order=cfg.max_order, user_frequencies_hz=cfg.user_frequencies(),
    )


def _build_peak_source(cfg: ExperimentConfig, seed: int, pool, real_anomalous=None):
    """Option A: VAE trained on peak segments; option B: Gaussian kernels."""
    if cfg.generator_option == "B":
        return GaussianPeakSource(sigma_range=cfg.sigma_range)
    first = pool[0]
    harmonic_orders = tuple(o for o, _ in cfg.harmonic_amps)
    segments = collect_segments(
        pool,
        peak_training_bins(cfg.supply_frequency_hz, harmonic_orders, first.bin_width_hz, first.n_bins),
    )
    if real_anomalous:
        for w in real_anomalous:
            bins = _fault_signature_bins(cfg, w.label, w.bin_width_hz, w.n_bins)
            segments.extend(collect_segments([w], bins))
    rng = np.random.default_rng(_purpose_seed(seed, _TAG_VAE))
    if len(segments) > cfg.vae_max_segments:
        keep = rng.choice(len(segments), size=cfg.vae_max_segments, replace=False)
        segments = [segments[i] for i in sorted(keep)]
    model = train_vae(
        segments,
        epochs=cfg.vae_epochs,
        lr=cfg.lr,
        seed=_purpose_seed(seed, _TAG_VAE),
        batch_size=cfg.batch_size,
    )
    return VaePeakSource(model)


def _sgda_train_set(cfg: ExperimentConfig, seed: int) -> tuple[LabeledDataset, object]:
    """Healthy windows plus injected anomalies; optionally a real-anomaly
    fraction replacing part of the synthetic ones (off by default)."""
    pool = _sim_windows(
        cfg, FaultClass.HEALTHY, 2 * cfg.train_per_class,
        _purpose_seed(seed, _TAG_TRAIN_POOL), f"train{seed}",
    )
    n_real = int(round(cfg.real_anomaly_fraction * cfg.train_per_class))
    real_by_fault: dict[FaultClass, list[SpectrumWindow]] = {}
    if n_real > 0:
        for fi, fault in enumerate(cfg.faults):
            real_by_fault[fault] = _sim_windows(
                cfg, fault, n_real,
                _purpose_seed(seed, _TAG_TRAIN_FAULT) + fi, f"train{seed}",
            )
    source = _build_peak_source(
        cfg, seed, pool,
        real_anomalous=[w for ws in real_by_fault.values() for w in ws],
    )
    dataset = build_augmented_dataset(
        pool,
        cfg.motor(),
        cfg.faults,
        source,
        per_class=cfg.train_per_class,
        seed=_purpose_seed(seed, _TAG_AUGMENT_TRAIN),
        max_order=cfg.max_order,
        user_frequencies_hz=cfg.user_frequencies(),
        amp_fraction_range=cfg.amp_fraction_range,
    )
    if n_real > 0:
        windows = list(dataset.windows)
        for fi, fault in enumerate(cfg.faults):
            # replace the tail of each fault's synthetic block with real windows
            block_end = cfg.train_per_class * (fi + 2)
            windows[block_end - n_real : block_end] = real_by_fault[fault]
        dataset = LabeledDataset(windows=tuple(windows))
    return dataset, source


def _synthetic_test_set(cfg: ExperimentConfig, seed: int, source) -> LabeledDataset:
    """Fresh healthy windows plus injected anomalies (E1/E2 protocol)."""
    pool = _sim_windows(
        cfg, FaultClass.HEALTHY, 2 * cfg.test_per_class,
        _purpose_seed(seed, _TAG_TEST_POOL), f"test{seed}",
    )
    return build_augmented_dataset(
        pool,
        cfg.motor(),
        cfg.faults,
        source,
        per_class=cfg.test_per_class,
        seed=_purpose_seed(seed, _TAG_AUGMENT_TEST),
        max_order=cfg.max_order,
        user_frequencies_hz=cfg.user_frequencies(),
        amp_fraction_range=cfg.amp_fraction_range,
    )


def _simulator_test_set(cfg: ExperimentConfig, seed: int, severity_db: float, source) -> LabeledDataset:
    """Held-out healthy plus simulated physical faults (E3/E4/EPSILON)."""
    n_synth = int(round(cfg.test_synthetic_fraction * cfg.test_per_class))
    n_sim = cfg.test_per_class - n_synth
    pool_size = cfg.test_per_class + (2 * n_synth if n_synth else 0)
    pool = _sim_windows(
        cfg, FaultClass.HEALTHY, max(pool_size, cfg.test_per_class),
        _purpose_seed(seed, _TAG_TEST_POOL), f"test{seed}",
    )
    windows = [w.with_label(FaultClass.HEALTHY) for w in pool[: cfg.test_per_class]]
    for fi, fault in enumerate(cfg.faults):
        windows.extend(
            _sim_windows(
                cfg, fault, n_sim,
                _purpose_seed(seed, _TAG_TEST_FAULT) + fi, f"test{seed}",
                fault_amp_db=severity_db,
            )
        )
    if n_synth:
        synthetic = build_augmented_dataset(
            pool[cfg.test_per_class :],
            cfg.motor(),
            cfg.faults,
            source,
            per_class=n_synth,
            seed=_purpose_seed(seed, _TAG_AUGMENT_TEST),
            max_order=cfg.max_order,
            user_frequencies_hz=cfg.user_frequencies(),
            amp_fraction_range=cfg.amp_fraction_range,
        )
        windows.extend(w for w in synthetic if w.label is not FaultClass.HEALTHY)
    return LabeledDataset(windows=tuple(windows))


def ensure_no_leakage(train: LabeledDataset, test: LabeledDataset) -> None:
    """Raise DataLeakageError when train and test share a source recording."""
    shared = train.source_ids() & test.source_ids()
    if shared:
        sample = ", ".join(sorted(shared)[:5])
        raise DataLeakageError(f"data leakage: test reuses training recordings ({sample})")


# --------------------------------------------------------------------------
# reporting


@dataclass(frozen=True)
class ReportRow:
    """One aggregated metric row of an experiment report."""

    experiment_id: str
    model: str
    variant: str
    accuracy: SeedStats
    macro_f1: SeedStats


@dataclass(frozen=True)
class ExperimentResult:
    """Aggregated rows plus every per-seed report, keyed (model, variant)."""

    config: ExperimentConfig
    rows: tuple[ReportRow, ...]
    reports: dict[tuple[str, str], list[EvalReport]]

    def row(self, model: str, variant: str) -> ReportRow:
        for r in self.rows:
            if r.model == model and r.variant == variant:
                return r
        raise KeyError(f"no report row for model={model!r} variant={variant!r}")


def _make_row(cfg: ExperimentConfig, model: str, variant: str, reports: list[EvalReport]) -> ReportRow:
    stats = aggregate_reports(reports)
    return ReportRow(
        experiment_id=cfg.experiment_id,
        model=model,
        variant=variant,
        accuracy=stats["accuracy"],
        macro_f1=stats["macro_f1"],
    )


def _resnet_config(cfg: ExperimentConfig, seed: int) -> ResNetConfig:
    return ResNetConfig(
        n_classes=cfg.n_classes(),
        block_channels=cfg.block_channels,
        kernel_size=cfg.kernel_size,
        batch_size=cfg.batch_size,
        lr=cfg.lr,
        epochs=cfg.epochs,
        seed=_purpose_seed(seed, _TAG_MODEL),
        feature_scale=cfg.feature_scale(),
    )


# --------------------------------------------------------------------------
# experiment protocols


def _run_synthetic(cfg: ExperimentConfig, with_svm: bool) -> ExperimentResult:
    """Shared E1/E2 protocol: train and test on healthy + injected data."""
    reports: dict[tuple[str, str], list[EvalReport]] = {(SGDA_MODEL, "synthetic"): []}
    if with_svm:
        reports[("svm", "synthetic")] = []
    for seed in cfg.seeds:
        train_set, source = _sgda_train_set(cfg, seed)
        test_set = _synthetic_test_set(cfg, seed, source)
        ensure_no_leakage(train_set, test_set)

        rcfg = _resnet_config(cfg, seed)
        model = build_resnet(rcfg)
        train(model, train_set, rcfg)
        reports[(SGDA_MODEL, "synthetic")].append(evaluate(model, test_set))

        if with_svm:
            # Comparators get no synthetic anomalies: they train on the
            # healthy windows alone, with the full label space declared.
            healthy_only = LabeledDataset(
                windows=tuple(w for w in train_set if w.label is FaultClass.HEALTHY)
            )
            svm = train_svm(
                healthy_only, c_param=cfg.svm_c, epochs=cfg.svm_epochs,
                seed=seed, classes=cfg.class_list(),
            )
            reports[("svm", "synthetic")].append(evaluate(svm, test_set))
    rows = [_make_row(cfg, model_name, variant, reps) for (model_name, variant), reps in reports.items()]
    return ExperimentResult(config=cfg, rows=tuple(rows), reports=reports)


def run_e1(cfg: ExperimentConfig) -> ExperimentResult:
    """Binary classification, synthetic anomalies on both sides."""
    return _run_synthetic(cfg, with_svm=False)


def run_e2(cfg: ExperimentConfig) -> ExperimentResult:
    """Multiclass with Gaussian-kernel generation plus the SVM comparator."""
    return _run_synthetic(cfg, with_svm=True)


def _run_simulator_tested(cfg: ExperimentConfig) -> ExperimentResult:
    """Shared E3/E4 protocol: injected training, simulator-fault testing."""
    reports: dict[tuple[str, str], list[EvalReport]] = {
        (SGDA_MODEL, f"db{severity:g}"): [] for severity in cfg.severity_grid_db
    }
    for seed in cfg.seeds:
        train_set, source = _sgda_train_set(cfg, seed)
        rcfg = _resnet_config(cfg, seed)
        model = build_resnet(rcfg)
        train(model, train_set, rcfg)
        for severity in cfg.severity_grid_db:
            test_set = _simulator_test_set(cfg, seed, severity, source)
            ensure_no_leakage(train_set, test_set)
            reports[(SGDA_MODEL, f"db{severity:g}")].append(evaluate(model, test_set))
    rows = [_make_row(cfg, model_name, variant, reps) for (model_name, variant), reps in reports.items()]
    return ExperimentResult(config=cfg, rows=tuple(rows), reports=reports)


def run_e3(cfg: ExperimentConfig) -> ExperimentResult:
    """Binary: healthy vs one physically simulated fault."""
    return _run_simulator_tested(cfg)


def run_e4(cfg: ExperimentConfig) -> ExperimentResult:
    """Three-class: healthy plus two physically simulated faults."""
    return _run_simulator_tested(cfg)


def run_epsilon(cfg: ExperimentConfig) -> ExperimentResult:
    """Accuracy vs number of real anomalous training windows.

    The CNN/SVM/MLP comparators receive ``count`` simulated fault windows
    in training; the injection approach trains on zero real anomalies, so
    its row cannot depend on the count (the identical per-seed run is
    reported at every count).

    The MLP comparator cannot tailor its preprocessing to anomalies it has
    never seen, so by default it runs on generic time-domain statistics
    of each window (``mlp_features = "stats"``); set ``"spectrum"`` to
    feed it the raw 250-bin magnitudes instead.
    """
    fault = cfg.faults[0]
    max_count = max(cfg.counts)
    reports: dict[tuple[str, str], list[EvalReport]] = {}
    for count in cfg.counts:
        for model_name in ("cnn", "svm", "mlp", SGDA_MODEL):
            reports[(model_name, f"count{count}")] = []
    use_stats = cfg.mlp_features == "stats"
    classes = [FaultClass.HEALTHY, fault]

    for seed in cfg.seeds:
        train_set, source = _sgda_train_set(cfg, seed)

        test_h = _sim_records(cfg, FaultClass.HEALTHY, cfg.test_per_class,
                              _purpose_seed(seed, _TAG_TEST_POOL), f"test{seed}")
        test_f = _sim_records(cfg, fault, cfg.test_per_class,
                              _purpose_seed(seed, _TAG_TEST_FAULT), f"test{seed}",
                              fault_amp_db=cfg.fault_amp_db)
        test_set = LabeledDataset(
            windows=tuple(_spectra(test_h, FaultClass.HEALTHY) + _spectra(test_f, fault))
        )
        ensure_no_leakage(train_set, test_set)

        rcfg = _resnet_config(cfg, seed)
        sgda_model = build_resnet(rcfg)
        train(sgda_model, train_set, rcfg)
        sgda_report = evaluate(sgda_model, test_set)

        # the comparators share the injection pipeline's healthy corpus
        healthy_records = _sim_records(
            cfg, FaultClass.HEALTHY, 2 * cfg.train_per_class,
            _purpose_seed(seed, _TAG_TRAIN_POOL), f"train{seed}",
        )[: cfg.train_per_class]
        fault_records = _sim_records(
            cfg, fault, max_count,
            _purpose_seed(seed, _TAG_TRAIN_FAULT), f"train{seed}",
        )
        healthy_windows = _spectra(healthy_records, FaultClass.HEALTHY)
        fault_windows = _spectra(fault_records, fault)
        if use_stats:
            train_stats = np.stack([window_statistics(r.samples) for r in healthy_records + fault_records])
            test_stats = np.stack([window_statistics(r.samples) for r in test_h + test_f])
            y_test = np.array([0] * len(test_h) + [1] * len(test_f))

        for count in cfg.counts:
            if count > len(fault_windows):
                raise ValueError(f"count {count} exceeds available anomalous pool of {len(fault_windows)}")
            comparator_set = LabeledDataset(windows=tuple(healthy_windows + fault_windows[:count]))
            ensure_no_leakage(comparator_set, test_set)

            ccfg = replace(rcfg, seed=_purpose_seed(seed, _TAG_MODEL) + count)
            cnn = build_resnet(ccfg)
            train(cnn, comparator_set, ccfg)
            reports[("cnn", f"count{count}")].append(evaluate(cnn, test_set))

            svm = train_svm(comparator_set, c_param=cfg.svm_c, epochs=cfg.svm_epochs, seed=seed)
            reports[("svm", f"count{count}")].append(evaluate(svm, test_set))

            mlp_seed = _purpose_seed(seed, _TAG_MODEL) + count
            if use_stats:
                x_mlp = np.concatenate([train_stats[: cfg.train_per_class], train_stats[cfg.train_per_class : cfg.train_per_class + count]])
                y_mlp = np.array([0] * cfg.train_per_class + [1] * count)
                mlp = train_mlp_arrays(
                    x_mlp, y_mlp, classes,
                    hidden_dims=cfg.mlp_hidden, epochs=cfg.mlp_epochs,
                    seed=mlp_seed, lr=cfg.lr, batch_size=cfg.batch_size,
                )
                mlp_report = report_from_predictions(y_test, mlp.predict(test_stats), classes)
            else:
                mlp = train_mlp(
                    comparator_set, hidden_dims=cfg.mlp_hidden, epochs=cfg.mlp_epochs,
                    seed=mlp_seed, lr=cfg.lr, batch_size=cfg.batch_size,
                )
                mlp_report = evaluate(mlp, test_set)
            reports[("mlp", f"count{count}")].append(mlp_report)

            reports[(SGDA_MODEL, f"count{count}")].append(sgda_report)

    rows = [_make_row(cfg, model_name, variant, reps) for (model_name, variant), reps in reports.items()]
    return ExperimentResult(config=cfg, rows=tuple(rows), reports=reports)


_RUNNERS = {
    "E1": run_e1,
    "E2": run_e2,
    "E3": run_e3,
    "E4": run_e4,
    "EPSILON": run_epsilon,
}


# --------------------------------------------------------------------------
# persistence


_CSV_COLUMNS = (
    "experiment_id", "model", "variant",
    "accuracy_mean", "accuracy_std", "f1_mean", "f1_std", "seed_count",
    "generator_option", "seeds", "severity_grid_db", "config_hash",
)


def write_report_csv(result: ExperimentResult, path: str | Path) -> None:
    """Emit the aggregated rows with full provenance, deterministically."""
    cfg = result.config
    chash = config_hash(cfg)
    seeds = ";".join(str(s) for s in cfg.seeds)
    grid = ";".join(f"{s:g}" for s in cfg.severity_grid_db)
    lines = [",".join(_CSV_COLUMNS)]
    for row in result.rows:
        lines.append(
            ",".join(
                (
                    row.experiment_id,
                    row.model,
                    row.variant,
                    f"{row.accuracy.mean:.6f}",
                    f"{row.accuracy.std:.6f}",
                    f"{row.macro_f1.mean:.6f}",
                    f"{row.macro_f1.std:.6f}",
                    str(row.accuracy.n_seeds),
                    cfg.generator_option,
                    seeds,
                    grid,
                    chash,
                )
            )
        )
    Path(path).write_text("\n".join(lines) + "\n")


def read_report_csv(path: str | Path) -> list[dict[str, str]]:
    lines = Path(path).read_text().splitlines()
    if not lines or lines[0] != ",".join(_CSV_COLUMNS):
        raise ValueError(f"{path}: not a motorsig report CSV")
    return [dict(zip(_CSV_COLUMNS, line.split(","))) for line in lines[1:] if line.strip()]


def render_table(rows: list[dict[str, str]]) -> str:
    """Plain-text table of report rows, paper-style accuracy in percent."""
    header = ("experiment", "model", "variant", "accuracy (%)", "F1-score")
    body = []
    for r in rows:
        acc = f"{100 * float(r['accuracy_mean']):.2f} +/- {100 * float(r['accuracy_std']):.2f}"
        f1 = f"{float(r['f1_mean']):.2f} +/- {float(r['f1_std']):.2f}"
        body.append((r["experiment_id"], r["model"], r["variant"], acc, f1))
    widths = [max(len(header[i]), *(len(b[i]) for b in body)) if body else len(header[i]) for i in range(5)]
    fmt = "  ".join(f"{{:<{w}}}" for w in widths)
    lines = [fmt.format(*header), fmt.format(*("-" * w for w in widths))]
    lines.extend(fmt.format(*b) for b in body)
    return "\n".join(lines)


def _sample_windows(cfg: ExperimentConfig) -> LabeledDataset:
    """A small deterministic spectrum sample (first seed) for figures."""
    seed = cfg.seeds[0]
    # pool of 16 healthy windows keeps the generator trainable (needs one
    # batch of segments) while staying cheap
    mini = replace(cfg, train_per_class=8)
    dataset, _ = _sgda_train_set(mini, seed)
    picks: list[SpectrumWindow] = []
    seen: set[FaultClass] = set()
    for w in dataset:
        if w.label not in seen:
            picks.append(w)
            seen.add(w.label)
    return LabeledDataset(windows=tuple(picks))


def run_experiment(cfg: ExperimentConfig, out_root: str | Path) -> tuple[Path, ExperimentResult]:
    """Run one experiment and persist its artifacts.

    The run directory is ``<out_root>/<experiment_id>-<config_hash>`` and
    contains ``config.resolved.txt``, ``report.csv``, ``table.txt``, and
    ``samples.csv``. Reruns of an identical config overwrite the same
    directory with byte-identical CSV content.
    """
    runner = _RUNNERS[cfg.experiment_id]
    result = runner(cfg)
    run_dir = Path(out_root) / f"{cfg.experiment_id}-{config_hash(cfg)}"
    run_dir.mkdir(parents=True, exist_ok=True)
    (run_dir / "config.resolved.txt").write_text(config_canonical_text(cfg))
    write_report_csv(result, run_dir / "report.csv")
    (run_dir / "table.txt").write_text(render_table(read_report_csv(run_dir / "report.csv")) + "\n")
    save_dataset(_sample_windows(cfg), run_dir / "samples.csv")
    return run_dir, result
