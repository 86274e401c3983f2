import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from qmlkit.optim import OPTIMIZERS, SGD, Adagrad, Adam, Momentum, clip_gradient, lr_schedule, make_optimizer


class TestStep:
    def test_sgd(self):
        theta = np.array([1.0])
        SGD(lr=0.1).step([theta], [np.array([2.0])])
        assert theta[0] == pytest.approx(0.8, abs=1e-15)

    def test_momentum_second_step(self):
        theta = np.array([0.0])
        opt = Momentum(lr=0.1, gamma=0.9)
        opt.step([theta], [np.ones(1)])
        before = theta[0]
        opt.step([theta], [np.ones(1)])
        assert theta[0] - before == pytest.approx(-0.19, abs=1e-15)

    @pytest.mark.parametrize("g", [2.0, -2.0, 1e-3])
    def test_adam_first_step(self, g):
        theta = np.array([0.0])
        Adam(lr=1e-3).step([theta], [np.array([g])])
        assert theta[0] == pytest.approx(-1e-3 * np.sign(g), rel=1e-4)

    def test_adam_bias_correction_constant_gradient(self):
        # with the step-indexed correction the update stays lr * sign(g) for constant g
        theta = np.array([0.0])
        opt = Adam(lr=1e-2)
        for _ in range(50):
            prev = theta[0]
            opt.step([theta], [np.array([3.0])])
            assert prev - theta[0] == pytest.approx(1e-2, rel=1e-6)

    def test_adagrad_steps_shrink(self):
        theta = np.zeros(3)
        opt = Adagrad(lr=0.1)
        steps = []
        for _ in range(20):
            prev = theta.copy()
            opt.step([theta], [np.array([1.0, -0.5, 2.0])])
            steps.append(np.abs(theta - prev))
        assert np.all(np.diff(np.array(steps), axis=0) <= 0)

    def test_counter(self):
        opt = Adam()
        p = np.zeros(2)
        for _ in range(3):
            opt.step([p], [np.ones(2)])
        assert opt.t == 3
        assert opt.state[0]["m"].shape == p.shape

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            SGD().step([np.zeros(2)], [np.zeros(3)])

    def test_non_finite(self):
        with pytest.raises(FloatingPointError):
            SGD().step([np.zeros(2)], [np.array([1.0, np.nan])])

    def test_bad_lr(self):
        with pytest.raises(ValueError):
            SGD(lr=0.0)

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            make_optimizer("lbfgs")


@pytest.mark.parametrize("kind", sorted(OPTIMIZERS))
class TestQuadraticBowl:
    def test_converges(self, kind):
        theta = np.array([0.6, -0.8])
        opt = make_optimizer(kind)
        for _ in range(10**4):
            opt.step([theta], [2.0 * theta])
            if np.linalg.norm(theta) < 1e-3:
                break
        assert np.linalg.norm(theta) < 1e-3

    def test_deterministic(self, kind):
        grads = np.random.default_rng(3).normal(size=(30, 4))
        out = []
        for _ in range(2):
            theta = np.ones(4)
            opt = make_optimizer(kind)
            for g in grads:
                opt.step([theta], [g])
            out.append(theta)
        assert out[0].tobytes() == out[1].tobytes()


class TestClip:
    def test_rescales(self):
        assert clip_gradient(np.array([2.0, 0.0]), 1.0).tolist() == [1.0, 0.0]

    def test_small_unchanged(self):
        assert clip_gradient(np.array([0.3, 0.4]), 1.0).tolist() == [0.3, 0.4]

    @given(arrays(float, st.integers(1, 20), elements=st.floats(-1e3, 1e3)))
    def test_norm(self, g):
        out = clip_gradient(g, 3.0)
        assert abs(np.linalg.norm(out) - min(np.linalg.norm(g), 3.0)) <= 1e-12 * max(1.0, np.linalg.norm(g))

    def test_global_norm_list(self):
        out = clip_gradient([np.array([3.0]), np.array([4.0])], 1.0)
        assert [x.tolist() for x in out] == [[0.6], [0.8]]

    def test_bad_threshold(self):
        with pytest.raises(ValueError):
            clip_gradient(np.ones(2), 0.0)


class TestSchedule:
    @pytest.mark.parametrize("epoch", [0, 7, 1000])
    def test_constant(self, epoch):
        assert lr_schedule("constant", epoch, 0.1) == 0.1

    def test_exponential_start(self):
        assert lr_schedule("exponential", 0, 0.1, decay=0.99) == 0.1

    def test_step_decay(self):
        assert lr_schedule("step-decay", 250, 0.1, step_size=100, factor=0.5) == pytest.approx(0.025)

    def test_negative_epoch(self):
        with pytest.raises(ValueError):
            lr_schedule("constant", -1, 0.1)
