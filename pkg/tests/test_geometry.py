import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from core.errors import ConfigError, DomainError, NotSPD, SingularSample
from services.expr import parse
from services.geometry import (
    Chart,
    MetricField,
    SingularLocus,
    VectorFieldExpr,
    christoffel,
    covariant_derivative,
    divergence,
    divergence_batch,
    integrate_scalar,
    metric_at,
    midpoint_grid,
    parse_grid,
    quadrature_grid,
    random_points,
    sample_grid,
    two_form,
    wedge3,
)
from services.models import get_model, solid_torus_chart, torus_chart

TWO_PI = 2.0 * math.pi


@pytest.mark.parametrize("text, expected", [("64x16x16", (64, 16, 16)), ("8,4,2", (8, 4, 2)), ("32", (32, 32, 32))])
def test_parse_grid(text, expected):
    assert parse_grid(text) == expected


@pytest.mark.parametrize("text", ["1x2x3", "4x4", "axbxc", ""])
def test_parse_grid_rejects(text):
    with pytest.raises(ConfigError):
        parse_grid(text)


def test_chart_validation():
    with pytest.raises(ValueError):
        Chart(coord_names=("x", "y", "z"), domain=((1.0, 0.0), (0.0, 1.0), (0.0, 1.0)))
    with pytest.raises(ValueError):
        Chart(coord_names=("x", "x", "z"), domain=((0.0, 1.0),) * 3)
    with pytest.raises(ValueError):
        Chart(
            coord_names=("x", "y", "z"),
            domain=((0.0, 1.0),) * 3,
            singular_loci=(SingularLocus(coordinate="r", value=0.0),),
        )


def test_sample_grid_avoids_singular_locus():
    chart = solid_torus_chart()
    points = sample_grid(chart, (4, 4, 4), r_min=1e-3)
    assert points.shape == (64, 3)
    assert points[:, 0].min() == pytest.approx(1e-3)
    assert points[:, 0].max() == pytest.approx(1.0)
    # periodic axes use cell midpoints
    assert_allclose(np.unique(points[:, 1]), (np.arange(4) + 0.5) * TWO_PI / 4)


def test_random_points_are_seeded_and_clear_of_loci():
    chart = solid_torus_chart()
    a = random_points(chart, 500, seed=7, r_min=0.05)
    b = random_points(chart, 500, seed=7, r_min=0.05)
    assert np.array_equal(a, b)
    assert a[:, 0].min() >= 0.05


def test_midpoint_grid_refuses_singular_nodes():
    chart = Chart(
        coord_names=("r", "phi", "t"),
        domain=((-1.0, 1.0), (0.0, 1.0), (0.0, 1.0)),
        singular_loci=(SingularLocus(coordinate="r", value=0.0),),
    )
    with pytest.raises(SingularSample):
        midpoint_grid(chart, (3, 2, 2))
    points, cell = midpoint_grid(chart, (4, 2, 2))
    assert len(points) == 16
    assert cell == pytest.approx(2.0 / 4 * 0.5 * 0.5)


def test_restricted_chart_drops_periodicity_on_narrowed_axes():
    chart = torus_chart()
    narrow = chart.restricted(((0.0, 0.5), (0.0, 1.0), (0.0, 1.0)), name="half")
    assert narrow.periodic == (False, True, True)
    assert narrow.name == "half"
    assert narrow.volume() == pytest.approx(0.5)


def test_polar_christoffel_symbols():
    model = get_model("cylinder")
    gamma = christoffel(model.metric, [2.0, 0.3, 0.0])
    expected = np.zeros((3, 3, 3))
    expected[0, 1, 1] = -2.0
    expected[1, 0, 1] = expected[1, 1, 0] = 0.5
    assert_allclose(gamma, expected, atol=1e-15)


def test_covariant_derivative_and_divergence():
    model = get_model("cylinder")
    chart = model.chart
    d_phi = VectorFieldExpr.from_strings(chart, ["0", "1", "0"])
    d_r = VectorFieldExpr.from_strings(chart, ["1", "0", "0"])
    assert_allclose(covariant_derivative(model.metric, d_phi, d_phi, [1.5, 0.0, 0.0]), [-1.5, 0.0, 0.0], atol=1e-15)
    assert divergence(model.metric, d_r, [1.5, 0.0, 0.0]) == pytest.approx(1 / 1.5)


def test_metric_at_rejects_indefinite_metric():
    chart = torus_chart()
    bad = MetricField.diagonal(chart, "1", "x - 0.5", "1")
    G, _ = metric_at(bad, [0.9, 0.0, 0.0])
    assert G[1, 1] == pytest.approx(0.4)
    with pytest.raises(NotSPD) as info:
        metric_at(bad, [0.1, 0.0, 0.0])
    assert info.value.minor == 2


def test_metric_at_rejects_singular_locus():
    model = get_model("reeb")
    with pytest.raises(SingularSample):
        metric_at(model.metric, [0.0, 1.0, 1.0])


def test_wedge_normalization():
    assert wedge3([1.0, 0.0, 0.0], two_form({(1, 2): 1.0})) == pytest.approx(1.0)
    assert wedge3([0.0, 1.0, 0.0], two_form({(0, 2): 1.0})) == pytest.approx(-1.0)


def test_quadrature_requires_periodic_or_compact_support():
    chart = get_model("cylinder").chart
    with pytest.raises(ConfigError):
        quadrature_grid(chart, (4, 4, 4))
    points, _ = quadrature_grid(chart, (4, 4, 4), compact_support=True)
    assert len(points) == 64


def test_midpoint_rule_is_exact_for_low_modes():
    chart = torus_chart(TWO_PI)
    total = integrate_scalar(chart, parse("sin(x)^2 * cos(y)^2", chart.coord_names), (8, 8, 2))
    assert total == pytest.approx(math.pi * math.pi * TWO_PI, rel=1e-12)


def test_midpoint_rule_converges_spectrally():
    chart = torus_chart(TWO_PI)
    f = parse("exp(sin(x))", chart.coord_names)
    bessel_i0 = 1.2660658777520082
    exact = TWO_PI * bessel_i0 * TWO_PI**2
    errors = [abs(integrate_scalar(chart, f, (n, 2, 2)) - exact) for n in (4, 8, 16)]
    assert errors[1] < errors[0] * 1e-2
    assert errors[2] < 1e-10 * exact


def test_volume_element_uses_the_metric():
    model = get_model("cylinder")
    chart = model.chart.model_copy(update={"periodic": (True, True, True)})
    area = integrate_scalar(chart, lambda pts: np.ones(len(pts)), (16, 4, 4), metric=model.metric)
    # integral of r dr dphi dz over [0.5, 2] x [0, 2 pi] x [-1, 1]
    assert area == pytest.approx(0.5 * (4.0 - 0.25) * TWO_PI * 2.0, rel=1e-12)


@pytest.mark.parametrize("point", [[3.0, 0.0, 0.0], [1.0, 0.0, 1.5], [0.4, 0.0, 0.0], [float("nan"), 0.0, 0.0]])
def test_metric_at_rejects_points_outside_the_chart(point):
    model = get_model("cylinder")
    with pytest.raises(DomainError):
        metric_at(model.metric, point)


def test_metric_at_wraps_periodic_axes():
    model = get_model("cylinder")
    G, _ = metric_at(model.metric, [1.5, 10.0, 0.0])
    assert_allclose(G, np.diag([1.0, 2.25, 1.0]))


CURVED_METRIC = [
    "2 + sin(2 * pi * y)",
    "0.3 * cos(2 * pi * z)",
    "0",
    "1.5 + 0.5 * sin(2 * pi * x)",
    "0.2 * sin(2 * pi * x)",
    "1 + 0.25 * cos(2 * pi * y)",
]


def test_connection_is_metric_compatible():
    chart = torus_chart()
    g = MetricField.from_strings(chart, CURVED_METRIC)
    X = VectorFieldExpr.from_strings(chart, ["y * sin(2 * pi * x)", "cos(2 * pi * z)", "x * z"])
    Y = VectorFieldExpr.from_strings(chart, ["1", "y^2", "sin(2 * pi * (x + y))"])
    axes = [VectorFieldExpr.from_strings(chart, row) for row in (["1", "0", "0"], ["0", "1", "0"], ["0", "0", "1"])]
    for p in random_points(chart, 25, seed=11):
        G, dG = metric_at(g, p)
        x, dx = X.jets(p)
        y, dy = Y.jets(p)
        for k, e in enumerate(axes):
            d_inner = x @ dG[:, :, k] @ y + dx[:, k] @ G @ y + x @ G @ dy[:, k]
            compatible = covariant_derivative(g, e, X, p) @ G @ y + x @ G @ covariant_derivative(g, e, Y, p)
            assert d_inner == pytest.approx(compatible, abs=1e-9)


def test_constant_metric_has_no_christoffel_symbols():
    chart = torus_chart()
    g = MetricField.from_strings(chart, ["2", "0.3", "0", "1.5", "0.2", "1"])
    assert_allclose(christoffel(g, [0.3, 0.6, 0.9]), 0.0, atol=0.0)


def test_divergence_integral_converges_under_refinement():
    chart = torus_chart()
    g = MetricField.euclidean(chart)
    X = VectorFieldExpr.from_strings(chart, ["exp(2 * sin(2 * pi * x) + cos(6 * pi * x + 1))", "0", "0"])

    def div_X(points):
        G, dG = g.jets(points)
        v, dv = X.jets(points)
        return divergence_batch(np.linalg.inv(G), dG, v, dv)

    errors = [abs(integrate_scalar(chart, div_X, (n, n, n), metric=g)) for n in (8, 16, 32)]
    assert errors[0] > errors[1] > errors[2]
    assert abs(integrate_scalar(chart, div_X, (64, 64, 64), metric=g)) <= 1e-10
