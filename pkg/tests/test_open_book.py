import numpy as np
import pytest
from numpy.testing import assert_allclose

from core.domain import Classification
from core.errors import ConfigError, OverlapMismatch
from schemas.chart import AtlasDocument
from services.distributions import evaluate
from services.geometry import sample_grid
from services.models import (
    assemble_open_book_demo,
    check_atlas,
    check_overlap,
    get_model,
    model_from_document,
    model_to_document,
    open_book_document,
)


def test_open_book_atlas_glues():
    report = assemble_open_book_demo()
    assert [c.name for c in report.charts] == ["reeb", "collar", "product"]
    assert all(c.classification == Classification.parabolic for c in report.charts)
    assert len(report.overlaps) == 2
    for overlap in report.overlaps:
        assert overlap.metric_mismatch <= 1e-9
        assert overlap.leaf_tangency <= 1e-9
        assert overlap.round_trip <= 1e-9
    assert report.monodromy.parabolic
    assert report.gluing_error <= 1e-9


def test_untwisted_monodromy_is_trivial():
    report = check_atlas(open_book_document(k=0), grid=(8, 4, 4))
    assert report.monodromy.stages == 0
    assert report.gluing_error == 0.0


@pytest.mark.parametrize("delta, epsilon", [(0.4, 0.2), (0.0, 0.2), (0.15, 0.2)])
def test_overlap_width_is_checked(delta, epsilon):
    with pytest.raises(ConfigError):
        open_book_document(epsilon=epsilon, delta=delta)


def _with_forward(doc: AtlasDocument, forward, inverse) -> AtlasDocument:
    first = doc.transitions[0].model_copy(update={"forward": forward, "inverse": inverse})
    return doc.model_copy(update={"transitions": [first] + doc.transitions[1:]})


def test_misplaced_transition_is_a_mismatch():
    doc = _with_forward(open_book_document(), ("r + 0.2", "phi", "t"), ("r - 0.2", "phi", "t"))
    with pytest.raises(OverlapMismatch) as info:
        check_atlas(doc, grid=(8, 4, 4))
    assert info.value.context["overlap"] == "reeb->collar"

    report = check_atlas(doc, grid=(8, 4, 4), strict=False)
    assert report.overlaps[0].leaf_tangency > 1e-3
    assert report.overlaps[0].metric_mismatch <= 1e-9


def test_transition_leaving_the_target_chart():
    doc = _with_forward(open_book_document(), ("r + 1", "phi", "t"), ("r - 1", "phi", "t"))
    with pytest.raises(ConfigError):
        check_atlas(doc, grid=(8, 4, 4))


def test_collar_to_product_overlap():
    doc = open_book_document()
    models = {c.model_id: model_from_document(c) for c in doc.charts}
    overlap = check_overlap(doc.transitions[1], models["collar"], models["product"])
    assert overlap.points == 512
    assert overlap.metric_mismatch == 0.0
    assert overlap.round_trip == 0.0


def test_model_document_round_trip(repository, reeb):
    path = repository.save("reeb.json", model_to_document(reeb))
    loaded = model_from_document(repository.load_model(path))
    assert loaded.model_id == "reeb"
    assert loaded.chart == reeb.chart
    assert set(loaded.distributions) == {"foliation", "leaf-frame"}
    assert set(loaded.forms) == {"dphi"}
    assert loaded.named_frames == {"foliation": "leaf"}

    points = sample_grid(reeb.chart, (8, 4, 4))
    for name in ("foliation", "leaf-frame"):
        before = evaluate(reeb.metric, reeb.distributions[name], points)
        after = evaluate(loaded.metric, loaded.distributions[name], points)
        assert_allclose(after.B, before.B, atol=1e-14)
        assert_allclose(after.normal, before.normal, atol=1e-14)


def test_bare_chart_forms_become_distributions(repository, write_json):
    path = write_json(
        "chart.json",
        {
            "coords": ["x", "y", "z"],
            "domain": [[0, 1], [0, 1], [0, 1]],
            "periodic": [True, True, True],
            "metric": ["1", "0", "0", "1", "0", "1"],
            "forms": {"alpha": ["0", "0", "1"], "beta": ["-y", "x", "1"]},
        },
    )
    model = model_from_document(repository.load_model(path))
    assert model.model_id == "chart"
    assert set(model.distributions) == {"alpha", "beta"}
    assert model.default_distribution == "alpha"
    assert model.forms == {}
    assert_allclose(model.form("beta").values(np.array([0.2, 0.3, 0.4])), [-0.3, 0.2, 1.0])


@pytest.mark.parametrize(
    "content",
    [
        '{"coords": ["x", "y", "z"], "domain": [[0, 1], [0, 1], [0, 1]], "metric": ["1", "0", "0", "1", "0"]}',
        '{"coords": ["x", "y", "z"], "domain": [[0, 1], [0, 1], [0, 1]], "metric": ["1", "0", "0", "1", "0", "1"], '
        '"distributions": {"xi": {"kind": "kernel", "form": "missing"}}}',
        "{not json",
    ],
)
def test_invalid_documents(repository, tmp_path, content):
    (tmp_path / "bad.json").write_text(content, encoding="utf-8")
    with pytest.raises(ConfigError):
        repository.load_model("bad.json")


def test_missing_document(repository):
    with pytest.raises(ConfigError) as info:
        repository.load_model("nowhere.json")
    assert info.value.to_dict()["path"] == "nowhere.json"


def test_document_without_anything_to_classify():
    doc = model_to_document(get_model("torus-flat"))
    with pytest.raises(ConfigError):
        model_from_document(doc.model_copy(update={"forms": {}, "distributions": {}}))


def test_frames_survive_the_round_trip(reeb):
    loaded = model_from_document(model_to_document(reeb))
    points = np.array([[0.5, 0.1, 0.2]])
    for before, after in zip(reeb.frames["leaf"], loaded.frames["leaf"]):
        assert_allclose(after.values(points), before.values(points))
