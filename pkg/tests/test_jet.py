import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from core.config import settings
from core.errors import DomainError
from utils.jet import Jet, smoothstep, stack, unit_step_parts
from utils.parallel import chunks, map_chunks, map_ordered, pairwise_sum

finite = st.floats(-5, 5)


@given(finite, finite)
def test_product_and_quotient_rules(x, y):
    X = Jet.variable(np.array(x), 0)
    Y = Jet.variable(np.array(y), 1)
    prod = X * Y
    assert_allclose(prod.grad, [y, x, 0.0])
    if abs(y) > 1e-3:
        quot = X / Y
        assert_allclose(quot.grad, [1 / y, -x / y**2, 0.0], rtol=1e-10)


@given(st.floats(0.1, 5), st.floats(-2, 2))
def test_real_powers_and_logs(x, n):
    X = Jet.variable(np.array(x), 2)
    p = X**n
    assert p.value == pytest.approx(x**n)
    assert p.grad[2] == pytest.approx(n * x ** (n - 1))
    assert X.log().grad[2] == pytest.approx(1 / x)


def test_jet_exponent_with_constant_value_reduces_to_power():
    X = Jet.variable(np.array([-2.0, 3.0]), 0)
    cube = X ** Jet.constant(3.0, (2,))
    assert_allclose(cube.value, [-8.0, 27.0])
    assert_allclose(cube.grad[:, 0], [12.0, 27.0])


def test_negative_power_of_zero():
    with pytest.raises(DomainError):
        Jet.variable(np.array([0.0, 1.0]), 0) ** -1


def test_log_domain():
    with pytest.raises(DomainError):
        Jet.variable(np.array(0.0), 0).log()


def test_step_parts():
    s, d1, d2 = unit_step_parts(np.array([-0.5, 0.0, 0.5, 1.0, 1.5]))
    assert_allclose(s, [0.0, 0.0, 0.5, 1.0, 1.0], atol=1e-15)
    assert d1[0] == d1[-1] == 0.0
    assert d1[2] == pytest.approx(2.0)
    assert d2[2] == pytest.approx(0.0, abs=1e-12)


@given(st.floats(-1, 2))
def test_smoothstep_is_monotone_and_bounded(x):
    value = smoothstep(0.0, 1.0, x)
    assert 0.0 <= value <= 1.0
    assert smoothstep(0.0, 1.0, x + 0.01) >= value
    assert value + smoothstep(0.0, 1.0, 1.0 - x) == pytest.approx(1.0)


def test_smoothstep_interval_check():
    with pytest.raises(DomainError):
        smoothstep(1.0, 1.0, 0.5)


def test_stack_layout():
    points = np.array([[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]])
    comps = [Jet.variable(points[:, i], i) * 2.0 for i in range(3)]
    values, grads = stack(comps)
    assert values.shape == (2, 3)
    assert grads.shape == (2, 3, 3)
    assert_allclose(grads[0], 2.0 * np.eye(3))


def test_chunks_cover_points_in_order():
    points = np.arange(30.0).reshape(10, 3)
    blocks = chunks(points, 4)
    assert [len(b) for b in blocks] == [4, 4, 2]
    assert_allclose(np.concatenate(blocks), points)
    assert len(chunks(points[:0], 4)) == 1


def test_map_chunks_is_independent_of_workers():
    points = np.random.default_rng(3).random((101, 3))

    def work(block):
        return np.sin(block).sum(axis=-1)

    serial = np.concatenate(map_chunks(work, points, jobs=1, chunk_size=7))
    threaded = np.concatenate(map_chunks(work, points, jobs=4, chunk_size=7))
    assert np.array_equal(serial, threaded)


def test_map_ordered_keeps_item_order():
    assert map_ordered(lambda x: x * x, [3, 1, 2], jobs=3) == [9, 1, 4]


def test_pairwise_sum():
    assert pairwise_sum([]) == 0.0
    assert pairwise_sum([1.0, 2.0, 3.0]) == 6.0
    values = np.random.default_rng(1).random(1001)
    assert pairwise_sum(values) == pytest.approx(math.fsum(values), rel=1e-14)


def test_default_chunk_size_comes_from_settings(monkeypatch):
    monkeypatch.setattr(settings, "chunk_size", 3)
    assert [len(b) for b in chunks(np.zeros((7, 3)))] == [3, 3, 1]
