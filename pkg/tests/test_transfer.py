import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from core.errors import ConfigError, NotTransverse
from services.distributions import KernelForm, evaluate
from services.geometry import OneFormField, sample_grid
from services.models import TransferredMetric, contact_deformation_scan, get_model, parse_s_range, transfer_metric


@pytest.fixture
def tilted():
    return get_model("torus-tilted")


def test_transfer_to_tilted_planes(tilted):
    _, report = transfer_metric(tilted.metric, tilted.foliation, tilted.distributions["tilted"], tilted.chart, grid=(4, 4, 4))
    assert report.points == 64
    assert report.min_angle == pytest.approx(math.pi / 2 - 0.1)
    assert report.max_abs_det_B <= 1e-8
    assert report.max_residual <= 1e-8


def test_transferred_metric_keeps_the_old_normal_unit(tilted):
    metric, _ = transfer_metric(tilted.metric, tilted.foliation, tilted.distributions["tilted"], tilted.chart, grid=(2, 2, 2))
    points = sample_grid(tilted.chart, (3, 3, 3))
    G, _ = metric.jets(points)
    pieces = metric.pieces(points)
    n = pieces["n"][0]
    assert_allclose(np.einsum("...a,...ab,...b->...", n, G, n), 1.0, rtol=1e-12)
    PX1 = pieces["PX1"][0]
    assert_allclose(np.einsum("...a,...ab,...b->...", PX1, G, n), 0.0, atol=1e-12)


def test_transferred_metric_is_a_metric_source():
    model = get_model("torus-graph")
    chart = model.chart
    eta = KernelForm(alpha=OneFormField.from_strings(chart, ["0", "-0.2", "1"]))
    metric, report = transfer_metric(model.metric, model.foliation, eta, chart, grid=(8, 4, 4))
    assert report.points == 128
    assert report.max_abs_K_source <= 1e-8
    moved = evaluate(metric, eta, sample_grid(chart, (8, 4, 4)))
    assert moved.valid.all()
    assert np.all(np.linalg.eigvalsh(metric.jets(sample_grid(chart, (4, 4, 4)))[0]) > 0)


def test_transfer_requires_transverse_target(tilted):
    eta = KernelForm(alpha=OneFormField.from_strings(tilted.chart, ["1", "0", "0"]))
    with pytest.raises(NotTransverse) as info:
        transfer_metric(tilted.metric, tilted.foliation, eta, tilted.chart, grid=(2, 2, 2))
    assert info.value.angle == pytest.approx(0.0, abs=1e-12)
    metric = TransferredMetric(g=tilted.metric, xi=tilted.foliation, eta=eta)
    with pytest.raises(NotTransverse):
        metric.jets([[0.1, 0.2, 0.3]])


@pytest.mark.parametrize(
    "text, expected",
    [("-0.2:0.2:3", [-0.2, 0.0, 0.2]), ("0.5:1:1", [0.5]), ("0:1:5", [0.0, 0.25, 0.5, 0.75, 1.0])],
)
def test_parse_s_range(text, expected):
    assert parse_s_range(text) == pytest.approx(expected)


@pytest.mark.parametrize("text", ["1:2", "a:b:c", "0:1:0"])
def test_parse_s_range_rejects(text):
    with pytest.raises(ConfigError):
        parse_s_range(text)


def test_rotating_deformation_of_the_flat_foliation():
    model = get_model("torus-scan")
    report = contact_deformation_scan(model.foliation.alpha, model.form("rotating"), [0.0, 0.1, -0.3], grid=(4, 4, 4))
    still, small, large = report.entries
    assert still.contact_abs_min == pytest.approx(0.0, abs=1e-15)
    assert still.normal_deviation_max == pytest.approx(0.0, abs=1e-7)
    assert small.contact_min == pytest.approx(-0.01)
    assert small.contact_max == pytest.approx(-0.01)
    assert small.normal_deviation_max == pytest.approx(math.atan(0.1))
    assert small.transversality_min == pytest.approx(math.pi / 2 - math.atan(0.1))
    assert large.contact_max == pytest.approx(-0.09)
    assert report.grid == (4, 4, 4)


def test_scan_order_is_independent_of_workers():
    model = get_model("torus-scan")
    s_values = parse_s_range("-0.5:0.5:11")
    serial = contact_deformation_scan(model.foliation.alpha, model.form("rotating"), s_values, grid=(4, 4, 4), jobs=1)
    threaded = contact_deformation_scan(model.foliation.alpha, model.form("rotating"), s_values, grid=(4, 4, 4), jobs=4)
    assert serial == threaded
    assert [e.s for e in serial.entries] == pytest.approx(s_values)


@pytest.mark.parametrize("name", ["sphere", "cylinder"])
def test_transfer_onto_itself_changes_nothing(name):
    model = get_model(name)
    metric, report = transfer_metric(model.metric, model.foliation, model.foliation, model.chart, grid=(6, 6, 6))
    assert report.min_angle == pytest.approx(math.pi / 2)
    assert report.max_residual <= 1e-9
    points = sample_grid(model.chart, (3, 3, 3))
    assert_allclose(metric.jets(points)[0], model.metric.jets(points)[0], atol=1e-12)
