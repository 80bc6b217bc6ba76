"""Classifier tests: ResNet construction and training, evaluation metrics,
SVM and MLP comparators."""

import numpy as np
import pytest

from motorsig.classifier import (
    EvalReport,
    ResNetConfig,
    aggregate_reports,
    build_resnet,
    evaluate,
    report_from_predictions,
    train,
    train_mlp,
    train_svm,
)
from motorsig.motor import FaultClass
from motorsig.spectrum import LabeledDataset, SpectrumWindow


def toy_dataset(n_per_class=20, classes=(FaultClass.HEALTHY, FaultClass.ROTOR_BAR), seed=0, n_bins=250):
    """Separable blobs: class k has a tall peak at bin 40 + 60k."""
    rng = np.random.default_rng(seed)
    windows = []
    for k, cls in enumerate(classes):
        for i in range(n_per_class):
            mags = np.abs(rng.standard_normal(n_bins)) * 0.05
            mags[40 + 60 * k] = 1.0 + rng.uniform(-0.1, 0.1)
            windows.append(SpectrumWindow(mags, 1.0, origin=f"{cls.value}-{i}:0", label=cls))
    return LabeledDataset(windows=tuple(windows))


def small_cfg(n_classes=2, epochs=8, seed=0):
    return ResNetConfig(
        n_classes=n_classes,
        block_channels=(4, 8, 16, 32),
        kernel_size=7,
        batch_size=16,
        epochs=epochs,
        seed=seed,
    )


class TestBuildResnet:
    def test_output_shape_single_window(self):
        model = build_resnet(small_cfg())
        logits = model.predict_logits(np.zeros((1, 250)))
        assert logits.shape == (1, 2)

    def test_rejects_single_class(self):
        with pytest.raises(ValueError, match="at least 2"):
            build_resnet(small_cfg(n_classes=1))

    def test_seeded_builds_identical(self):
        a = build_resnet(small_cfg(seed=9))
        b = build_resnet(small_cfg(seed=9))
        for pa, pb in zip(a.parameters(), b.parameters()):
            assert np.array_equal(pa.data, pb.data)

    def test_zero_input_yields_head_bias(self):
        model = build_resnet(small_cfg())
        model.head.bias.data[:] = [0.25, -0.75]
        logits = model.predict_logits(np.zeros((3, 250)))
        assert logits == pytest.approx(np.tile([0.25, -0.75], (3, 1)))

    def test_default_channels_double(self):
        cfg = ResNetConfig(n_classes=2)
        assert cfg.block_channels == (64, 128, 256, 512)
        assert all(b == 2 * a for a, b in zip(cfg.block_channels, cfg.block_channels[1:]))

    def test_parameter_count_deterministic(self):
        a = build_resnet(small_cfg(seed=1))
        b = build_resnet(small_cfg(seed=2))
        assert [p.data.shape for p in a.parameters()] == [p.data.shape for p in b.parameters()]


class TestTrain:
    def test_separable_blobs_reach_full_accuracy(self):
        dataset = toy_dataset()
        cfg = small_cfg(epochs=20)
        model = build_resnet(cfg)
        history = train(model, dataset, cfg)
        assert history["accuracy"][-1] == 1.0
        assert np.all(np.isfinite(history["loss"]))
        assert history["loss"][-1] < history["loss"][0]

    def test_deterministic_history(self):
        dataset = toy_dataset()
        runs = []
        for _ in range(2):
            cfg = small_cfg(epochs=4, seed=3)
            model = build_resnet(cfg)
            runs.append(train(model, dataset, cfg))
        assert runs[0] == runs[1]

    def test_empty_dataset(self):
        cfg = small_cfg()
        with pytest.raises(ValueError, match="empty"):
            train(build_resnet(cfg), LabeledDataset(windows=()), cfg)

    def test_class_count_mismatch(self):
        dataset = toy_dataset()
        cfg = small_cfg(n_classes=3)
        with pytest.raises(ValueError, match="classes"):
            train(build_resnet(cfg), dataset, cfg)

    def test_checkpoint_preserves_logits(self, tmp_path):
        dataset = toy_dataset(8)
        cfg = small_cfg(epochs=2)
        model = build_resnet(cfg)
        train(model, dataset, cfg)
        path = tmp_path / "resnet.ckpt"
        model.save(path)
        fresh = build_resnet(small_cfg(seed=77))
        fresh.load(path)
        x = dataset.features()
        assert np.array_equal(model.predict_logits(x), fresh.predict_logits(x))


class _ConstantPredictor:
    def __init__(self, classes, index=0):
        self.classes = classes
        self.index = index

    def predict(self, features):
        return np.full(len(features), self.index, dtype=np.int64)


class TestEvaluate:
    def test_perfect_predictions(self):
        dataset = toy_dataset(10)
        cfg = small_cfg(epochs=20)
        model = build_resnet(cfg)
        train(model, dataset, cfg)
        report = evaluate(model, dataset)
        assert report.accuracy == 1.0
        assert report.macro_f1 == 1.0
        assert np.trace(report.confusion) == len(dataset)

    def test_constant_predictor_balanced_binary(self):
        dataset = toy_dataset(10)
        model = _ConstantPredictor([FaultClass.HEALTHY, FaultClass.ROTOR_BAR])
        report = evaluate(model, dataset)
        # predicted class: precision 0.5, recall 1 -> F1 2/3; other class 0
        assert report.accuracy == 0.5
        assert report.macro_f1 == pytest.approx(1.0 / 3.0)

    def test_empty_test_set(self):
        model = _ConstantPredictor([FaultClass.HEALTHY, FaultClass.ROTOR_BAR])
        with pytest.raises(ValueError, match="empty"):
            evaluate(model, LabeledDataset(windows=()))

    def test_unknown_label_rejected(self):
        dataset = toy_dataset(4, classes=(FaultClass.HEALTHY, FaultClass.BEARING_BALL))
        model = _ConstantPredictor([FaultClass.HEALTHY, FaultClass.ROTOR_BAR])
        with pytest.raises(ValueError, match="not in model classes"):
            evaluate(model, dataset)

    def test_permutation_invariance(self):
        dataset = toy_dataset(10)
        rng = np.random.default_rng(5)
        perm = rng.permutation(len(dataset))
        shuffled = LabeledDataset(windows=tuple(dataset.windows[i] for i in perm))
        model = _ConstantPredictor([FaultClass.HEALTHY, FaultClass.ROTOR_BAR], index=1)
        a = evaluate(model, dataset)
        b = evaluate(model, shuffled)
        assert a.accuracy == b.accuracy
        assert a.macro_f1 == b.macro_f1
        assert np.array_equal(a.confusion, b.confusion)

    def test_confusion_row_sums_match_class_counts(self):
        dataset = toy_dataset(7)
        model = _ConstantPredictor([FaultClass.HEALTHY, FaultClass.ROTOR_BAR], index=1)
        report = evaluate(model, dataset)
        assert report.confusion.sum(axis=1).tolist() == [7, 7]


class TestAggregate:
    def test_mean_and_std(self):
        reports = [
            report_from_predictions(np.array([0, 1]), np.array([0, 1]), [FaultClass.HEALTHY, FaultClass.ROTOR_BAR]),
            report_from_predictions(np.array([0, 1]), np.array([0, 0]), [FaultClass.HEALTHY, FaultClass.ROTOR_BAR]),
        ]
        stats = aggregate_reports(reports)
        assert stats["accuracy"].mean == pytest.approx(0.75)
        assert stats["accuracy"].std == pytest.approx(np.std([1.0, 0.5], ddof=1))
        assert stats["accuracy"].n_seeds == 2


class TestSvm:
    def test_two_point_separation(self):
        windows = (
            SpectrumWindow(np.r_[np.ones(1), np.zeros(249)] , 1.0, label=FaultClass.HEALTHY),
            SpectrumWindow(np.r_[np.zeros(249), np.ones(1)], 1.0, label=FaultClass.ROTOR_BAR),
        )
        dataset = LabeledDataset(windows=windows)
        model = train_svm(dataset, c_param=100.0, epochs=500)
        assert evaluate(model, dataset).accuracy == 1.0

    def test_hinge_objective_moving_average_non_increasing(self):
        dataset = toy_dataset(25)
        model = train_svm(dataset, c_param=100.0, epochs=400)
        smooth = np.convolve(model.objective_history, np.ones(50) / 50, mode="valid")
        assert np.all(np.diff(smooth) <= 1e-9)

    def test_three_class_orthogonal_means(self):
        rng = np.random.default_rng(2)
        windows = []
        classes = (FaultClass.HEALTHY, FaultClass.ROTOR_BAR, FaultClass.ECCENTRICITY)
        for k, cls in enumerate(classes):
            for i in range(15):
                mags = np.abs(rng.standard_normal(250)) * 0.01
                mags[10 + 80 * k] = 1.0
                windows.append(SpectrumWindow(mags, 1.0, label=cls))
        dataset = LabeledDataset(windows=tuple(windows))
        model = train_svm(dataset, c_param=100.0, epochs=600)
        assert evaluate(model, dataset).accuracy == 1.0

    def test_single_class_rejected_without_declared_classes(self):
        dataset = toy_dataset(6, classes=(FaultClass.HEALTHY,))
        with pytest.raises(ValueError, match="single class"):
            train_svm(dataset)

    def test_declared_label_space_allows_missing_classes(self):
        dataset = toy_dataset(6, classes=(FaultClass.HEALTHY,))
        model = train_svm(dataset, classes=[FaultClass.HEALTHY, FaultClass.ROTOR_BAR])
        preds = model.predict(dataset.features())
        assert np.all(preds == 0)  # always the class it saw

    def test_deterministic(self):
        dataset = toy_dataset(10)
        a = train_svm(dataset, seed=0)
        b = train_svm(dataset, seed=123)  # full-batch fit ignores the seed
        assert np.array_equal(a.weights, b.weights)
        assert np.array_equal(a.bias, b.bias)


class TestMlp:
    def test_no_hidden_layer_is_logistic_regression(self):
        dataset = toy_dataset(20)
        model = train_mlp(dataset, hidden_dims=(), epochs=30, seed=0, feature_scale=1.0)
        assert len(model.layers) == 1
        assert evaluate(model, dataset).accuracy == 1.0

    def test_output_shape(self):
        dataset = toy_dataset(8)
        model = train_mlp(dataset, hidden_dims=(16,), epochs=2, seed=0)
        assert model.predict_logits(dataset.features()).shape == (len(dataset), 2)

    def test_seeded_determinism(self):
        dataset = toy_dataset(8)
        a = train_mlp(dataset, hidden_dims=(8,), epochs=3, seed=4)
        b = train_mlp(dataset, hidden_dims=(8,), epochs=3, seed=4)
        for pa, pb in zip(a.parameters(), b.parameters()):
            assert np.array_equal(pa.data, pb.data)

    def test_empty_dataset(self):
        with pytest.raises(ValueError, match="empty"):
            train_mlp(LabeledDataset(windows=()))
