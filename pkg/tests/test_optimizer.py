import numpy as np
import pytest

from slowalign.optimizer import SGD, OptimizerConfig, uniform_lr_config


def one_param(value):
    return {"cls": {"w": np.array([float(value)])}}


def test_vanilla_step():
    groups = one_param(1.0)
    sgd = SGD(groups, OptimizerConfig(lr_cls=0.1, momentum=0.0))
    sgd.step({"w": np.array([1.0])})
    assert groups["cls"]["w"][0] == pytest.approx(0.9, abs=1e-15)


def test_two_rate_update_ratio():
    groups = {"rep": {"a": np.zeros(1)}, "cls": {"b": np.zeros(1)}}
    sgd = SGD(groups, OptimizerConfig(lr_rep=0.0001, lr_cls=0.01, momentum=0.0))
    sgd.step({"a": np.ones(1), "b": np.ones(1)})
    assert groups["cls"]["b"][0] / groups["rep"]["a"][0] == pytest.approx(100.0, rel=1e-12)


def test_momentum_two_step_recursion():
    # v <- 0.9 v + g with g = 1 twice: w = -(0.1 + 0.1 * 1.9) = -0.29
    groups = one_param(0.0)
    sgd = SGD(groups, OptimizerConfig(lr_cls=0.1, momentum=0.9))
    sgd.step({"w": np.array([1.0])})
    sgd.step({"w": np.array([1.0])})
    assert groups["cls"]["w"][0] == pytest.approx(-0.29, abs=1e-15)


def test_weight_decay_folds_into_gradient():
    groups = one_param(2.0)
    sgd = SGD(groups, OptimizerConfig(lr_cls=0.1, momentum=0.0, weight_decay=0.5))
    sgd.step({"w": np.array([0.0])})
    # g = 0 + 0.5 * 2 = 1 -> w = 2 - 0.1
    assert groups["cls"]["w"][0] == pytest.approx(1.9, abs=1e-15)


def test_zero_momentum_equals_vanilla_gd():
    gen = np.random.Generator(np.random.Philox(0))
    w = gen.standard_normal(8)
    groups = {"cls": {"w": w.copy()}}
    sgd = SGD(groups, OptimizerConfig(lr_cls=0.05, momentum=0.0))
    expected = w.copy()
    for step in range(5):
        g = gen.standard_normal(8)
        sgd.step({"w": g})
        expected -= 0.05 * g
        assert np.array_equal(groups["cls"]["w"], expected)


def test_groups_do_not_cross_contaminate():
    groups = {"rep": {"a": np.ones(3)}, "cls": {"b": np.ones(3)}}
    sgd = SGD(groups, OptimizerConfig(lr_rep=0.001, lr_cls=0.1))
    sgd.step({"b": np.ones(3)})
    assert np.array_equal(groups["rep"]["a"], np.ones(3))
    sgd.step({"a": np.ones(3)})
    assert not np.array_equal(groups["rep"]["a"], np.ones(3))


def test_shape_mismatch_raises():
    sgd = SGD(one_param(0.0), OptimizerConfig())
    with pytest.raises(ValueError):
        sgd.step({"w": np.zeros(2)})


def test_uniform_lr_config():
    cfg = uniform_lr_config(0.005)
    assert cfg.lr_rep == cfg.lr_cls == 0.005
    cfg = uniform_lr_config(0.01)
    assert cfg.lr_rep == cfg.lr_cls == 0.01
    with pytest.raises(ValueError):
        uniform_lr_config(0.0)


def test_config_validation():
    with pytest.raises(ValueError):
        OptimizerConfig(lr_rep=-1.0)
    with pytest.raises(ValueError):
        OptimizerConfig(batch_size=0)


def test_deterministic_given_same_inputs():
    def run():
        groups = {"cls": {"w": np.ones(4)}}
        sgd = SGD(groups, OptimizerConfig(lr_cls=0.1, momentum=0.9))
        gen = np.random.Generator(np.random.Philox(42))
        for _ in range(10):
            sgd.step({"w": gen.standard_normal(4)})
        return groups["cls"]["w"]

    assert np.array_equal(run(), run())
