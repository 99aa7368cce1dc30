import numpy as np
import pytest
from numpy.testing import assert_allclose

from core.domain import Classification
from core.errors import ConfigError, DomainError
from services.distributions import classify, evaluate
from services.geometry import sample_grid
from services.models import (
    closed_form_B_reeb,
    collar_model,
    compare_closed_form,
    get_model,
    reeb_profile,
)


def test_profile_breakpoints():
    f, df, G, dG = reeb_profile(np.array([0.2, 0.5, 0.8]))
    assert_allclose(f, [0.0, 0.5, 1.0], atol=1e-15)
    assert df[0] == df[2] == 0.0
    assert G[0] == pytest.approx(0.04)
    assert G[1] == G[2] == 1.0
    assert dG[0] == pytest.approx(0.4)


def test_numeric_B_matches_closed_form():
    comparison = compare_closed_form(count=100, seed=3)
    assert comparison.points == 100
    assert comparison.max_abs_error < 1e-9
    assert comparison.max_abs_det < 1e-12


def test_closed_form_is_diagonal_with_one_live_entry():
    r = np.linspace(0.01, 1.0, 200)
    B = closed_form_B_reeb(r)
    assert_allclose(B[:, 0, 1], 0.0)
    assert_allclose(B[:, 0, 0] * B[:, 1, 1], 0.0, atol=1e-15)
    assert np.any(B[:, 1, 1] != 0.0)


@pytest.mark.parametrize("r", [0.0, -0.5, 1.5, float("nan")])
def test_closed_form_domain(r):
    with pytest.raises(DomainError):
        closed_form_B_reeb(r)


def test_reeb_foliation_is_parabolic(reeb):
    report = classify(reeb.metric, reeb.foliation, reeb.chart, grid=(32, 8, 8), frame=reeb.frames["leaf"])
    assert report.classification == Classification.parabolic
    assert report.points_valid == report.points_total


@pytest.mark.slow
def test_reeb_acceptance_resolution(reeb):
    report = classify(reeb.metric, reeb.foliation, reeb.chart, grid=(64, 16, 16), jobs=1)
    assert report.classification == Classification.parabolic
    assert report.points_total == 64 * 16 * 16
    assert max(abs(report.aggregates["K_e"].max), abs(report.aggregates["K_e"].min)) <= 1e-8
    comparison = compare_closed_form(count=200, seed=0)
    assert comparison.max_abs_error <= 1e-9


@pytest.mark.parametrize("interval", [(0.01, 0.3), (0.7, 1.0)])
def test_disks_and_boundary_tori_are_totally_geodesic(reeb, interval):
    chart = reeb.chart.restricted((interval, reeb.chart.domain[1], reeb.chart.domain[2]))
    sample = evaluate(reeb.metric, reeb.foliation, sample_grid(chart, (16, 8, 8)))
    assert sample.valid.all()
    assert np.max(sample.B_norm) < 1e-10


def test_leaf_frame_span_is_co_oriented_with_the_form(reeb):
    points = sample_grid(reeb.chart, (8, 4, 4))
    kernel = evaluate(reeb.metric, reeb.foliation, points)
    span = evaluate(reeb.metric, reeb.distributions["leaf-frame"], points)
    assert_allclose(span.normal, kernel.normal, atol=1e-12)


def test_collar_parallel_row_vanishes():
    collar = collar_model(0.2)
    points = sample_grid(collar.chart, (16, 4, 4))
    X, Y = collar.frames["parallel"]
    frame = np.stack([X.values(points), Y.values(points)], axis=-2)
    sample = evaluate(collar.metric, collar.foliation, points, frame=frame)
    assert sample.valid.all()
    assert np.max(np.abs(sample.B[:, 1, :])) < 1e-12
    assert np.max(np.abs(sample.frobenius)) < 1e-12
    assert np.max(np.abs(sample.B[:, 0, 0])) > 0.1


def test_collar_turns_tori_into_annuli():
    collar = collar_model(0.2)
    alpha = collar.foliation.alpha.values(np.array([[1.0, 0.0, 0.0], [1.4, 0.0, 0.0]]))
    assert_allclose(alpha, [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]], atol=1e-15)
    assert collar.parameters == {"epsilon": 0.2}


def test_collar_width_must_be_positive():
    with pytest.raises(ConfigError):
        collar_model(0.0)


def test_catalog_lookup():
    assert get_model("reeb").model_id == "reeb"
    with pytest.raises(ConfigError) as info:
        get_model("klein-bottle")
    assert "reeb" in info.value.detail
