"""Autodiff engine tests: hand-worked values, finite-difference oracles,
optimizer behavior, and checkpoint round-trips."""

import numpy as np
import pytest

from motorsig.neural import (
    Adam,
    Conv1d,
    Dense,
    Tensor,
    add,
    add_scalar,
    conv1d,
    dense,
    exp,
    finite_difference_check,
    global_avg_pool,
    he_normal,
    leaky_relu,
    load_checkpoint,
    mean_all,
    mul,
    reshape,
    save_checkpoint,
    scale,
    sigmoid,
    softmax_cross_entropy,
    sub,
    sum_all,
    tensor,
)

TOL = 1e-4


def away_from_zero(rng, shape, margin=0.2):
    """Random values bounded away from 0 so kinked ops stay differentiable."""
    x = rng.standard_normal(shape)
    return x + np.sign(x) * margin


class TestHandValues:
    def test_conv_cross_correlation(self):
        x = tensor([[1.0, 2.0, 3.0]])
        k = tensor([[[1.0, 1.0]]])
        b = tensor([0.0])
        out = conv1d(x, k, b, stride=1, padding=0)
        assert out.data.tolist() == [[3.0, 5.0]]

    def test_identity_kernel_plus_bias(self):
        x = tensor([[4.0, -2.0, 7.0]])
        k = tensor([[[1.0]]])
        b = tensor([0.5])
        out = conv1d(x, k, b)
        assert out.data.tolist() == [[4.5, -1.5, 7.5]]

    def test_conv_output_length(self):
        x = tensor(np.zeros((2, 3, 25)))
        k = tensor(np.zeros((4, 3, 7)))
        b = tensor(np.zeros(4))
        assert conv1d(x, k, b, stride=2, padding=3).data.shape == (2, 4, (25 + 6 - 7) // 2 + 1)

    def test_conv_shape_mismatch_reports_both_shapes(self):
        x = tensor(np.zeros((2, 25)))
        k = tensor(np.zeros((4, 3, 7)))
        with pytest.raises(ValueError, match=r"\(2, 25\).*\(4, 3, 7\)"):
            conv1d(x, k, tensor(np.zeros(4)))

    def test_dense_identity(self):
        x = tensor([3.0, 4.0])
        w = tensor(np.eye(2))
        b = tensor(np.zeros(2))
        assert dense(x, w, b).data.tolist() == [3.0, 4.0]

    def test_dense_hand_value(self):
        out = dense(tensor([3.0, 4.0]), tensor([[1.0, 2.0]]), tensor([1.0]))
        assert out.data.tolist() == [12.0]

    def test_dense_shape_mismatch(self):
        with pytest.raises(ValueError, match="dense"):
            dense(tensor([1.0, 2.0, 3.0]), tensor([[1.0, 2.0]]), tensor([0.0]))

    def test_leaky_relu_values(self):
        out = leaky_relu(tensor([2.0, -1.0]), 0.01)
        assert out.data.tolist() == [2.0, -0.01]

    def test_leaky_relu_rejects_bad_alpha(self):
        with pytest.raises(ValueError, match="alpha"):
            leaky_relu(tensor([1.0]), 0.0)

    def test_cross_entropy_uniform_logits(self):
        assert softmax_cross_entropy(tensor([0.0, 0.0]), 0).item() == pytest.approx(np.log(2.0))
        assert softmax_cross_entropy(tensor([1.0] * 5), 3).item() == pytest.approx(np.log(5.0))

    def test_cross_entropy_out_of_range(self):
        with pytest.raises(ValueError, match="out of range"):
            softmax_cross_entropy(tensor([0.0, 0.0]), 2)

    def test_residual_add_of_zeros(self):
        x = tensor([[1.0, 2.0], [3.0, 4.0]])
        out = add(x, tensor(np.zeros((2, 2))))
        assert np.array_equal(out.data, x.data)

    def test_global_avg_pool_constant(self):
        x = tensor(np.full((2, 3, 10), 6.5))
        assert np.allclose(global_avg_pool(x).data, 6.5)

    def test_sigmoid_extreme_inputs_stable(self):
        out = sigmoid(tensor([-1000.0, 0.0, 1000.0]))
        assert np.all(np.isfinite(out.data))
        assert out.data[0] == pytest.approx(0.0, abs=1e-12)
        assert out.data[1] == 0.5
        assert out.data[2] == pytest.approx(1.0, abs=1e-12)

    def test_reshape_round_trip(self):
        x = tensor(np.arange(12.0).reshape(3, 4))
        back = reshape(reshape(x, (12,)), (3, 4))
        assert np.array_equal(back.data, x.data)

    def test_backward_requires_scalar(self):
        x = tensor([1.0, 2.0], requires_grad=True)
        with pytest.raises(ValueError, match="scalar"):
            add(x, x).backward()


class TestGradientOracles:
    """Central finite differences vs analytic gradients (the module-level
    exhaustive sweep lives in the acceptance suite)."""

    def test_leaky_relu_gradient_at_negative_input(self):
        x = tensor([-3.0], requires_grad=True)
        leaky_relu(x, 0.01).backward()
        analytic = x.grad[0]
        h = 1e-6
        fd = (((-3.0 + h) * 0.01) - ((-3.0 - h) * 0.01)) / (2 * h)
        assert analytic == pytest.approx(0.01, abs=1e-12)
        assert analytic == pytest.approx(fd, abs=1e-6)

    @pytest.mark.parametrize("stride,padding", [(1, 0), (1, 3), (2, 2), (3, 1)])
    def test_conv1d_gradients(self, stride, padding):
        rng = np.random.default_rng(stride * 10 + padding)
        x = tensor(rng.standard_normal((2, 3, 11)), requires_grad=True)
        k = tensor(rng.standard_normal((4, 3, 5)), requires_grad=True)
        b = tensor(rng.standard_normal(4), requires_grad=True)
        err = finite_difference_check(
            lambda x_, k_, b_: conv1d(x_, k_, b_, stride=stride, padding=padding), [x, k, b], rng=rng
        )
        assert err < TOL

    def test_dense_gradients(self):
        rng = np.random.default_rng(0)
        x = tensor(rng.standard_normal((5, 7)), requires_grad=True)
        w = tensor(rng.standard_normal((3, 7)), requires_grad=True)
        b = tensor(rng.standard_normal(3), requires_grad=True)
        assert finite_difference_check(dense, [x, w, b], rng=rng) < TOL

    def test_softmax_cross_entropy_gradient(self):
        rng = np.random.default_rng(1)
        logits = tensor(rng.standard_normal((6, 4)), requires_grad=True)
        targets = rng.integers(0, 4, size=6)
        assert finite_difference_check(lambda t: softmax_cross_entropy(t, targets), [logits], rng=rng) < TOL

    def test_pool_gradient(self):
        rng = np.random.default_rng(2)
        x = tensor(rng.standard_normal((2, 4, 9)), requires_grad=True)
        assert finite_difference_check(global_avg_pool, [x], rng=rng) < TOL

    def test_elementwise_chain_gradient(self):
        rng = np.random.default_rng(3)
        a = tensor(away_from_zero(rng, (4, 4)), requires_grad=True)
        b = tensor(away_from_zero(rng, (4, 4)), requires_grad=True)

        def fn(a_, b_):
            return sum_all(mul(exp(scale(a_, 0.3)), add(sub(a_, b_), add_scalar(b_, 0.7))))

        assert finite_difference_check(fn, [a, b], rng=rng) < TOL

    def test_sigmoid_and_mean_gradient(self):
        rng = np.random.default_rng(4)
        x = tensor(rng.standard_normal((3, 5)), requires_grad=True)
        assert finite_difference_check(lambda t: mean_all(sigmoid(t)), [x], rng=rng) < TOL

    def test_gradient_accumulates_over_shared_input(self):
        x = tensor([2.0], requires_grad=True)
        y = add(mul(x, x), x)  # x^2 + x -> dy/dx = 2x + 1
        y.backward()
        assert x.grad[0] == pytest.approx(5.0)


class TestAdam:
    def test_zero_gradient_leaves_parameters(self):
        p = tensor([1.0, -2.0], requires_grad=True)
        opt = Adam([p], lr=0.01)
        p.grad = np.zeros(2)
        opt.step()
        assert p.data.tolist() == [1.0, -2.0]
        assert opt.state.step == 1

    def test_first_step_closed_form(self):
        # m_hat = g, v_hat = g^2 -> delta = -lr * g / (|g| + eps)
        p = tensor([0.0], requires_grad=True)
        opt = Adam([p], lr=0.001)
        p.grad = np.array([1.0])
        opt.step()
        assert p.data[0] == pytest.approx(-0.001 * 1.0 / (1.0 + 1e-8), rel=1e-12)

    def test_missing_gradient_names_parameter(self):
        p = tensor([1.0], requires_grad=True, name="head.bias")
        opt = Adam([p])
        with pytest.raises(ValueError, match="head.bias"):
            opt.step()

    def test_deterministic_runs(self):
        def run():
            rng = np.random.default_rng(0)
            p = tensor(rng.standard_normal(4), requires_grad=True)
            opt = Adam([p], lr=0.05)
            for _ in range(50):
                opt.zero_grad()
                loss = sum_all(mul(p, p))
                loss.backward()
                opt.step()
            return p.data.copy()

        assert np.array_equal(run(), run())

    def test_descent_on_separable_toy_problem(self):
        rng = np.random.default_rng(6)
        x = np.concatenate([rng.standard_normal((40, 3)) + 4.0, rng.standard_normal((40, 3)) - 4.0])
        y = np.array([0] * 40 + [1] * 40)
        w = tensor(rng.standard_normal((2, 3)) * 0.1, requires_grad=True)
        b = tensor(np.zeros(2), requires_grad=True)
        opt = Adam([w, b], lr=0.01)
        losses = []
        for _ in range(200):
            opt.zero_grad()
            loss = softmax_cross_entropy(dense(tensor(x), w, b), y)
            loss.backward()
            opt.step()
            losses.append(loss.item())
        smooth = np.convolve(losses, np.ones(20) / 20, mode="valid")
        assert np.all(np.diff(smooth) <= 1e-9)
        assert losses[-1] < losses[0]


class TestInitialization:
    def test_seeded_layers_identical(self):
        a = Dense(8, 4, np.random.default_rng(3))
        b = Dense(8, 4, np.random.default_rng(3))
        assert np.array_equal(a.weights.data, b.weights.data)

    def test_he_scale(self):
        rng = np.random.default_rng(0)
        w = he_normal(rng, (4000,), fan_in=50)
        assert w.std() == pytest.approx(np.sqrt(2.0 / 50.0), rel=0.05)

    def test_biases_start_at_zero(self):
        layer = Conv1d(2, 3, 5, np.random.default_rng(0))
        assert np.array_equal(layer.bias.data, np.zeros(3))


class TestCheckpoint:
    def test_round_trip_bit_exact(self, tmp_path):
        rng = np.random.default_rng(8)
        named = {
            "block0.conv1.kernels": rng.standard_normal((4, 2, 7)),
            "head.bias": rng.standard_normal(3),
            "scalarish": rng.standard_normal((1,)),
        }
        path = tmp_path / "model.ckpt"
        save_checkpoint(path, named)
        loaded = load_checkpoint(path)
        assert list(loaded) == list(named)
        for key in named:
            assert loaded[key].shape == named[key].shape
            assert np.array_equal(loaded[key], named[key])

    def test_rejects_foreign_file(self, tmp_path):
        path = tmp_path / "bad.ckpt"
        path.write_bytes(b"NOTMAGIC" + b"\x00" * 16)
        with pytest.raises(ValueError, match="not a motorsig checkpoint"):
            load_checkpoint(path)
