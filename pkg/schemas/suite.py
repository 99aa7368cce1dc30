from typing import Any, Dict, List, Optional, Tuple

from pydantic import BaseModel, Field, model_validator

from core.domain import Classification, ExpectationKind


class Expectation(BaseModel):
    """
    bound: measured <= bound (or >= minimum); classification: the measured
    class equals ``classification``; equality: |measured - value| <= tolerance.
    """

    kind: ExpectationKind = ExpectationKind.bound
    bound: Optional[float] = None
    minimum: Optional[float] = None
    classification: Optional[Classification] = None
    value: Optional[float] = None
    negate: bool = Field(False, description="pass when the expectation does NOT hold")

    @model_validator(mode="after")
    def check_fields(self):
        if self.kind == ExpectationKind.classification and self.classification is None:
            raise ValueError("classification expectations need a classification")
        if self.kind == ExpectationKind.equality and self.value is None:
            raise ValueError("equality expectations need a value")
        return self


class CheckSpec(BaseModel):
    name: str
    target: str = Field(description="catalog model name or path to a model/chart JSON file")
    operation: str
    grid: Optional[Tuple[int, int, int]] = None
    tolerance: float = 1e-8
    expectation: Expectation = Field(default_factory=Expectation)
    params: Dict[str, Any] = Field(default_factory=dict)


class SuiteSpec(BaseModel):
    name: str
    description: str = ""
    checks: List[CheckSpec] = Field(default_factory=list)


class CheckResult(BaseModel):
    name: str
    target: str
    operation: str
    passed: bool
    measured: Optional[Any] = None
    bound: Optional[Any] = None
    details: Dict[str, Any] = Field(default_factory=dict)
    error: Optional[Dict[str, Any]] = None


class SuiteReport(BaseModel):
    suite: str
    passed: bool
    vacuous: bool = False
    total: int
    failures: int
    results: List[CheckResult]
    # seconds per check, kept apart from the deterministic body
    timings: Dict[str, float] = Field(default_factory=dict)

    def body(self) -> Dict[str, Any]:
        return self.model_dump(mode="json", exclude={"timings"})
