import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from core.errors import ArityError, DomainError, ExpressionSyntaxError, UnknownIdentifier
from services.expr import BinOp, Call, Neg, Num, Var, depends_on, eval_jet, eval_value, parse, substitute, to_text

XYZ = ("x", "y", "z")


def _text(children):
    return st.one_of(
        st.tuples(children, st.sampled_from(["+", "-", "*", "/"]), children).map(lambda t: f"({t[0]} {t[1]} {t[2]})"),
        children.map(lambda c: f"-{c}"),
        children.map(lambda c: f"sin({c})"),
        st.tuples(children, st.sampled_from(["2", "3", "0.5"])).map(lambda t: f"{t[0]}^{t[1]}"),
        st.tuples(children, st.integers(1, 9)).map(lambda t: f"({t[1]} * {t[0]})"),
    )


expressions = st.recursive(st.sampled_from(list(XYZ)), _text, max_leaves=8)


def test_power_binds_tighter_than_unary_minus():
    e = parse("-x^2", XYZ)
    assert e == Neg(BinOp("^", Var("x", 0), Num(2.0)))
    assert eval_value(e, [3.0, 0.0, 0.0]) == pytest.approx(-9.0)


def test_power_is_right_associative_and_folded():
    assert parse("2^3^2", XYZ) == Num(512.0)
    assert parse("(2^3)^2", XYZ) == Num(64.0)


def test_constants_and_precedence():
    assert parse("1 + 2 * 3", XYZ) == Num(7.0)
    assert parse("2 * pi", XYZ) == Num(2.0 * math.pi)
    assert eval_value(parse("x - y - z", XYZ), [1.0, 2.0, 3.0]) == pytest.approx(-4.0)
    assert eval_value(parse("x / y / z", XYZ), [8.0, 2.0, 2.0]) == pytest.approx(2.0)


@given(expressions)
def test_printed_form_parses_back(text):
    e = parse(text, XYZ)
    assert parse(to_text(e), XYZ) == e


@given(st.floats(-3, 3), st.floats(-3, 3), st.floats(-3, 3))
def test_gradient_is_exact(x, y, z):
    jet = eval_jet(parse("x * y + sin(x) - z^2", XYZ), [x, y, z])
    assert jet.value == pytest.approx(x * y + math.sin(x) - z**2)
    assert_allclose(jet.grad, [y + math.cos(x), x, -2 * z], rtol=1e-12, atol=1e-12)


def test_batch_shapes():
    points = np.random.default_rng(0).random((4, 5, 3))
    jet = eval_jet(parse("exp(x) * y", XYZ), points)
    assert jet.value.shape == (4, 5)
    assert jet.grad.shape == (4, 5, 3)
    assert_allclose(jet.grad[..., 0], np.exp(points[..., 0]) * points[..., 1])


def test_constant_broadcasts_over_batch():
    jet = eval_jet(parse("3", XYZ), np.zeros((6, 3)))
    assert_allclose(jet.value, 3.0)
    assert_allclose(jet.grad, 0.0)


def test_smoothstep_is_flat_outside_its_interval():
    e = parse("smoothstep(0.25, 0.75, x)", XYZ)
    jet = eval_jet(e, [[0.1, 0, 0], [0.5, 0, 0], [0.9, 0, 0]])
    assert_allclose(jet.value, [0.0, 0.5, 1.0], atol=1e-15)
    assert jet.grad[0, 0] == 0.0 and jet.grad[2, 0] == 0.0
    assert jet.grad[1, 0] > 0


def test_dsmoothstep_matches_smoothstep_gradient():
    points = np.column_stack([np.linspace(0.0, 1.0, 41), np.zeros(41), np.zeros(41)])
    step = eval_jet(parse("smoothstep(0.2, 0.8, x)", XYZ), points)
    slope = eval_value(parse("dsmoothstep(0.2, 0.8, x)", XYZ), points)
    assert_allclose(step.grad[:, 0], slope, rtol=1e-12, atol=1e-14)


@pytest.mark.parametrize(
    "text, error",
    [
        ("", ExpressionSyntaxError),
        ("x +", ExpressionSyntaxError),
        ("(x", ExpressionSyntaxError),
        ("x $ y", ExpressionSyntaxError),
        ("w", UnknownIdentifier),
        ("foo(x)", UnknownIdentifier),
        ("sin(x, y)", ArityError),
        ("smoothstep(x)", ArityError),
    ],
)
def test_parse_errors(text, error):
    with pytest.raises(error):
        parse(text, XYZ)


def test_syntax_error_reports_position():
    with pytest.raises(ExpressionSyntaxError) as info:
        parse("x + * y", XYZ)
    assert info.value.position == 4
    with pytest.raises(ExpressionSyntaxError) as info:
        parse("   ", XYZ)
    assert info.value.position == 0


@pytest.mark.parametrize(
    "text, point",
    [
        ("1 / (x - y)", [1.0, 1.0, 0.0]),
        ("sqrt(x)", [-1.0, 0.0, 0.0]),
        ("sqrt(x)", [0.0, 0.0, 0.0]),
        ("smoothstep(1, 0, x)", [0.5, 0.0, 0.0]),
        ("x^0.5", [-2.0, 0.0, 0.0]),
    ],
)
def test_domain_errors(text, point):
    with pytest.raises(DomainError):
        eval_jet(parse(text, XYZ), point)


def test_sqrt_of_a_stationary_zero_is_fine():
    jet = eval_jet(parse("sqrt(x^2 + y^2)", XYZ), [1.0, 0.0, 5.0])
    assert jet.value == pytest.approx(1.0)
    origin = eval_jet(parse("sqrt(x^2 + y^2)", XYZ), [0.0, 0.0, 5.0])
    assert origin.value == 0.0
    assert_allclose(origin.grad, 0.0)


def test_unfolded_division_by_zero_literal_survives_printing():
    e = parse("1 / 0", XYZ)
    assert isinstance(e, BinOp)
    assert parse(to_text(e), XYZ) == e


def test_substitute_and_depends_on():
    e = parse("x * sin(y)", XYZ)
    shifted = substitute(e, {"y": parse("y + 2 * pi", XYZ)})
    assert depends_on(shifted, 1)
    assert not depends_on(shifted, 2)
    assert_allclose(eval_value(shifted, [2.0, 0.3, 0.0]), eval_value(e, [2.0, 0.3, 0.0]))
    assert substitute(parse("x + y", XYZ), {"x": Num(1.0), "y": Num(2.0)}) == Num(3.0)


def test_points_must_have_three_coordinates():
    with pytest.raises(ValueError):
        eval_jet(parse("x", XYZ), [1.0, 2.0])


def test_overflowing_literals_stay_unfolded():
    e = parse("1e308 * 10 + x", XYZ)
    assert isinstance(e.left, BinOp)
    assert parse(to_text(e), XYZ) == e
    assert isinstance(parse("exp(1000)", XYZ), Call)


@pytest.mark.parametrize("text", ["1e400", "x + 2e999"])
def test_non_finite_literals_are_rejected(text):
    with pytest.raises(ExpressionSyntaxError):
        parse(text, XYZ)


def _smooth_text(children):
    return st.one_of(
        st.tuples(children, st.sampled_from(["+", "-", "*"]), children).map(lambda t: f"({t[0]} {t[1]} {t[2]})"),
        children.map(lambda c: f"sin({c})"),
        children.map(lambda c: f"cos({c})"),
        children.map(lambda c: f"exp(0.5 * {c})"),
        st.tuples(children, st.sampled_from(["2", "3"])).map(lambda t: f"{t[0]}^{t[1]}"),
        children.map(lambda c: f"smoothstep(-0.5, 0.5, {c})"),
    )


smooth_expressions = st.recursive(st.sampled_from(["x", "y", "z", "0.7"]), _smooth_text, max_leaves=6)
unit = st.floats(-1, 1)


@given(smooth_expressions, unit, unit, unit)
def test_gradient_matches_central_differences(text, x, y, z):
    e = parse(text, XYZ)
    point = np.array([x, y, z])
    jet = eval_jet(e, point)
    h = 1e-6
    steps = np.eye(3) * h
    fd = np.array([(eval_value(e, point + s) - eval_value(e, point - s)) / (2 * h) for s in steps])
    scale = 1.0 + abs(float(jet.value)) + float(np.max(np.abs(jet.grad)))
    assert_allclose(jet.grad, fd, rtol=0, atol=1e-5 * scale)


@pytest.mark.parametrize("delta", [1e-2, 1e-3, 1e-4])
def test_smoothstep_is_c1_at_its_ends(delta):
    e = parse("smoothstep(0.25, 0.75, x)", XYZ)
    points = [[0.25 - delta, 0, 0], [0.25, 0, 0], [0.25 + delta, 0, 0], [0.75 - delta, 0, 0], [0.75, 0, 0], [0.75 + delta, 0, 0]]
    jet = eval_jet(e, points)
    assert_allclose(jet.value[:3], 0.0, atol=1e-12)
    assert_allclose(jet.value[3:], 1.0, atol=1e-12)
    assert_allclose(jet.grad[:, 0], 0.0, atol=1e-12)
