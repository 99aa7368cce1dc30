"""
Suite execution: validate a SuiteSpec, run each check, compare against its
expectation and assemble a SuiteReport in check order.
"""

from __future__ import annotations

import logging
import math
import time
from typing import Any, Optional, Tuple

from core.domain import ExpectationKind
from core.errors import ConfigError, PlaneFieldError
from repositories.document_repository import DocumentRepository
from schemas.suite import CheckResult, CheckSpec, Expectation, SuiteReport, SuiteSpec
from services.verify.operations import OPERATIONS, CheckContext
from utils.parallel import map_ordered

logger = logging.getLogger(__name__)


def validate_suite(spec: SuiteSpec) -> None:
    for check in spec.checks:
        if check.operation not in OPERATIONS:
            raise ConfigError(f"check {check.name!r}: unknown operation {check.operation!r}", check=check.name)
        if not check.tolerance > 0:
            raise ConfigError(f"check {check.name!r}: tolerance must be positive, got {check.tolerance}", check=check.name)
        if check.grid is not None and any(c < 2 for c in check.grid):
            raise ConfigError(f"check {check.name!r}: grid counts must be >= 2", check=check.name)


def judge(measured: Any, expectation: Expectation, tolerance: float) -> Tuple[bool, Any]:
    """Whether ``measured`` meets the expectation, plus the bound that was applied."""
    if expectation.kind == ExpectationKind.classification:
        held = measured == expectation.classification.value
        bound = expectation.classification.value
    elif expectation.kind == ExpectationKind.equality:
        held = _finite(measured) and abs(float(measured) - expectation.value) <= tolerance
        bound = {"value": expectation.value, "tolerance": tolerance}
    else:
        upper = expectation.bound
        if upper is None and expectation.minimum is None:
            upper = tolerance
        held = _finite(measured)
        if held and upper is not None:
            held = float(measured) <= upper
        if held and expectation.minimum is not None:
            held = float(measured) >= expectation.minimum
        bound = {"max": upper, "min": expectation.minimum}
    if expectation.negate:
        held = not held
        bound = {"not": bound}
    return held, bound


def _finite(value: Any) -> bool:
    try:
        return math.isfinite(float(value))
    except (TypeError, ValueError):
        return False


def run_check(check: CheckSpec, jobs: Optional[int] = None, repository: Optional[DocumentRepository] = None) -> Tuple[CheckResult, float]:
    ctx = CheckContext(
        target=check.target,
        grid=check.grid,
        tolerance=check.tolerance,
        params=check.params,
        jobs=jobs,
        repository=repository or DocumentRepository(),
    )
    started = time.perf_counter()
    try:
        measured, details = OPERATIONS[check.operation](ctx)
    except PlaneFieldError as exc:
        logger.warning("check %s failed with %s", check.name, exc.detail)
        result = CheckResult(name=check.name, target=check.target, operation=check.operation, passed=False, error=exc.to_dict())
    except Exception as exc:
        logger.error("check %s raised", check.name, exc_info=True)
        error = {"type": type(exc).__name__, "detail": str(exc)}
        result = CheckResult(name=check.name, target=check.target, operation=check.operation, passed=False, error=error)
    else:
        passed, bound = judge(measured, check.expectation, check.tolerance)
        if not passed:
            logger.warning("check %s failed: measured %r against %r", check.name, measured, bound)
        result = CheckResult(
            name=check.name,
            target=check.target,
            operation=check.operation,
            passed=passed,
            measured=measured,
            bound=bound,
            details=details,
        )
    return result, time.perf_counter() - started


def run_suite(spec: SuiteSpec, jobs: Optional[int] = None, repository: Optional[DocumentRepository] = None) -> SuiteReport:
    validate_suite(spec)
    # checks run one after another; jobs goes to the grid evaluation inside each
    outcomes = map_ordered(lambda check: run_check(check, jobs, repository), spec.checks, 1)
    results = [result for result, _ in outcomes]
    timings = {}
    for check, (_, seconds) in zip(spec.checks, outcomes):
        timings[check.name] = timings.get(check.name, 0.0) + seconds
    failures = sum(not r.passed for r in results)
    if not results:
        logger.info("suite %s has no checks and passes vacuously", spec.name)
    else:
        logger.info("suite %s: %d/%d checks passed", spec.name, len(results) - failures, len(results))
    return SuiteReport(
        suite=spec.name,
        passed=failures == 0,
        vacuous=not results,
        total=len(results),
        failures=failures,
        results=results,
        timings=timings,
    )
