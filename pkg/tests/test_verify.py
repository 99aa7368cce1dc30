import math

import pytest
from pydantic import ValidationError

from core.domain import Classification, ExpectationKind
from core.errors import ConfigError
from schemas.suite import CheckSpec, Expectation, SuiteSpec
from services.models import get_model, model_to_document
from services.verify import ALIASES, BUILTIN_SUITES, OPERATIONS, judge, random_spd_pairs, resolve_suite, run_check, run_suite, validate_suite


def _classify(target: str, classification: Classification, negate: bool = False, **kwargs) -> CheckSpec:
    return CheckSpec(
        name=f"{target} is {'not ' if negate else ''}{classification.value}",
        target=target,
        operation="classify",
        grid=(4, 4, 4),
        expectation=Expectation(kind=ExpectationKind.classification, classification=classification, negate=negate),
        **kwargs,
    )


def test_judge_bounds():
    assert judge(1e-9, Expectation(), 1e-8) == (True, {"max": 1e-8, "min": None})
    assert judge(1e-7, Expectation(), 1e-8)[0] is False
    assert judge(0.5, Expectation(bound=1.0), 1e-8)[0]
    assert judge(0.05, Expectation(minimum=0.1), 1e-8)[0] is False
    assert judge(0.2, Expectation(minimum=0.1), 1e-8)[0]
    assert judge(float("nan"), Expectation(bound=1.0), 1e-8)[0] is False
    assert judge(None, Expectation(), 1e-8)[0] is False


def test_judge_classification_and_equality():
    parabolic = Expectation(kind=ExpectationKind.classification, classification=Classification.parabolic)
    assert judge("parabolic", parabolic, 1e-8) == (True, "parabolic")
    elliptic_not = Expectation(kind=ExpectationKind.classification, classification=Classification.elliptic, negate=True)
    assert judge("parabolic", elliptic_not, 1e-8) == (True, {"not": "elliptic"})
    assert judge("elliptic", elliptic_not, 1e-8)[0] is False

    two = Expectation(kind=ExpectationKind.equality, value=2.0)
    assert judge(2.0 + 1e-13, two, 1e-12)[0]
    assert judge(2.1, two, 1e-12)[0] is False


def test_expectations_need_their_fields():
    with pytest.raises(ValidationError):
        Expectation(kind=ExpectationKind.classification)
    with pytest.raises(ValidationError):
        Expectation(kind=ExpectationKind.equality)


@pytest.mark.parametrize(
    "check",
    [
        CheckSpec(name="bad tolerance", target="cylinder", operation="classify", tolerance=-1.0),
        CheckSpec(name="bad operation", target="cylinder", operation="curl"),
        CheckSpec(name="bad grid", target="cylinder", operation="classify", grid=(1, 4, 4)),
    ],
)
def test_validate_suite_rejects(check):
    with pytest.raises(ConfigError) as info:
        validate_suite(SuiteSpec(name="broken", checks=[check]))
    assert info.value.context["check"] == check.name


def test_empty_suite_passes_vacuously():
    report = run_suite(SuiteSpec(name="empty"))
    assert report.passed and report.vacuous
    assert report.total == report.failures == 0


def test_suite_counts_failures_in_order():
    spec = SuiteSpec(
        name="mixed",
        checks=[
            _classify("cylinder", Classification.parabolic),
            _classify("sphere", Classification.parabolic),
            _classify("sphere", Classification.hyperbolic, negate=True),
        ],
    )
    report = run_suite(spec)
    assert not report.passed and not report.vacuous
    assert report.total == 3 and report.failures == 1
    assert [r.passed for r in report.results] == [True, False, True]
    assert report.results[1].measured == "elliptic"
    assert "timings" not in report.body()
    assert set(report.timings) == {c.name for c in spec.checks}


def test_errors_become_failed_results(repository):
    check = CheckSpec(name="missing target", target="missing.json", operation="max_abs_K", grid=(4, 4, 4))
    result, seconds = run_check(check, repository=repository)
    assert not result.passed
    assert result.error["type"] == "ConfigError"
    assert result.measured is None
    assert seconds >= 0


def test_checks_read_model_files(repository, write_json):
    path = write_json("cylinder.json", model_to_document(get_model("cylinder")).model_dump(mode="json"))
    result, _ = run_check(_classify(str(path), Classification.parabolic), repository=repository)
    assert result.passed
    assert result.details["points_valid"] == 64


def test_measure_must_exist():
    check = CheckSpec(name="bad measure", target="page", operation="metric_path", grid=(4, 4, 4), params={"measure": "speed"})
    result, _ = run_check(check)
    assert result.error["type"] == "ConfigError"


def test_resolve_suite(repository, write_json):
    assert resolve_suite("builtin:reeb-parabolic").name == "reeb-parabolic"
    assert resolve_suite("product-fibration").name == "product-fibration"
    with pytest.raises(ConfigError):
        resolve_suite("builtin:no-such-suite")
    path = write_json("suite.json", {"name": "file-suite", "checks": []})
    assert resolve_suite(str(path), repository).name == "file-suite"


def test_builtin_suites_are_valid():
    for build in BUILTIN_SUITES.values():
        spec = build()
        validate_suite(spec)
        assert spec.checks
        assert all(check.operation in OPERATIONS for check in spec.checks)


def test_random_pairs_are_seeded_and_positive():
    pairs = random_spd_pairs(count=5, seed=1)
    assert pairs == random_spd_pairs(count=5, seed=1)
    for G, H in pairs:
        g11, g12, g22 = (float(e) for e in G)
        assert g11 > 0 and g11 * g22 - g12 * g12 > 0
        assert all(h.startswith(g) and "smoothstep" in h for g, h in zip(G, H))


SLOW_SUITES = {"mean-curvature-divergence", "metric-path-interface"}


@pytest.mark.parametrize(
    "name",
    [pytest.param(name, marks=pytest.mark.slow) if name in SLOW_SUITES else name for name in BUILTIN_SUITES],
)
def test_builtin_suite_passes(name):
    report = run_suite(resolve_suite(name))
    failed = [(r.name, r.measured, r.error) for r in report.results if not r.passed]
    assert report.passed, failed


def test_scan_deviation_tracks_the_smallest_parameter():
    check = resolve_suite("contact-deformation-scan").checks[1]
    result, _ = run_check(check)
    assert result.measured == pytest.approx(math.atan(0.1))


@pytest.mark.parametrize("alias", sorted(ALIASES))
def test_numbered_names_select_builtin_suites(alias):
    assert ALIASES[alias] in BUILTIN_SUITES
    assert resolve_suite(f"builtin:{alias}").name == ALIASES[alias]
    assert resolve_suite(alias).name == ALIASES[alias]


def test_transfer_check_accepts_a_tilted_target():
    check = CheckSpec(
        name="tilted reeb planes",
        target="reeb",
        operation="transfer",
        grid=(8, 4, 4),
        params={"eta": {"beta": "dphi", "s": 0.05}, "measure": "min_angle"},
        expectation=Expectation(minimum=1e-3),
    )
    result, _ = run_check(check)
    assert result.passed, result.error
    assert result.details["max_abs_K_source"] <= 1e-8
    unknown, _ = run_check(check.model_copy(update={"params": {"eta": {"beta": "dz"}}}))
    assert unknown.error["type"] == "ConfigError"
