from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, Field, field_validator, model_validator

from core.domain import DistributionKind

Interval = Tuple[float, float]


class LocusDocument(BaseModel):
    coordinate: str
    value: float
    note: str = ""


class DistributionDocument(BaseModel):
    """A kernel distribution names a form; a span names two vectors."""

    kind: DistributionKind
    form: Optional[str] = None
    S: Optional[str] = None
    T: Optional[str] = None
    sign: int = 1

    @model_validator(mode="after")
    def check_references(self):
        if self.kind == DistributionKind.kernel and not self.form:
            raise ValueError("kernel distributions need a form name")
        if self.kind == DistributionKind.span and not (self.S and self.T):
            raise ValueError("span distributions need vectors S and T")
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        return self


class ChartDocument(BaseModel):
    name: str = "chart"
    coords: Tuple[str, str, str]
    domain: Tuple[Interval, Interval, Interval]
    periodic: Tuple[bool, bool, bool] = (False, False, False)
    singular_loci: List[LocusDocument] = Field(default_factory=list)
    metric: List[str] = Field(description="upper-triangle entries g11 g12 g13 g22 g23 g33")
    forms: Dict[str, List[str]] = Field(default_factory=dict)
    vectors: Dict[str, List[str]] = Field(default_factory=dict)
    distributions: Dict[str, DistributionDocument] = Field(default_factory=dict)
    frames: Dict[str, Tuple[str, str]] = Field(default_factory=dict)

    @field_validator("metric")
    @classmethod
    def check_metric(cls, v):
        if len(v) != 6:
            raise ValueError("metric needs 6 upper-triangle entries")
        return v

    @field_validator("forms", "vectors")
    @classmethod
    def check_components(cls, v):
        for name, components in v.items():
            if len(components) != 3:
                raise ValueError(f"{name!r} needs exactly 3 components")
        return v

    @model_validator(mode="after")
    def check_names(self):
        for name, dist in self.distributions.items():
            if dist.form and dist.form not in self.forms:
                raise ValueError(f"distribution {name!r} refers to unknown form {dist.form!r}")
            for vec in (dist.S, dist.T):
                if vec and vec not in self.vectors:
                    raise ValueError(f"distribution {name!r} refers to unknown vector {vec!r}")
        for name, pair in self.frames.items():
            for vec in pair:
                if vec not in self.vectors:
                    raise ValueError(f"frame {name!r} refers to unknown vector {vec!r}")
        return self


class ModelDocument(ChartDocument):
    model_id: str
    parameters: Dict[str, float] = Field(default_factory=dict)
    named_frames: Dict[str, str] = Field(default_factory=dict)
    default_distribution: Optional[str] = None


class TransitionDocument(BaseModel):
    """
    Coordinate change between two charts of an atlas. forward is written in
    the source coordinates, inverse in the target coordinates, and overlap is
    a box in source coordinates.
    """

    name: str
    source: str
    target: str
    forward: Tuple[str, str, str]
    inverse: Tuple[str, str, str]
    overlap: Tuple[Interval, Interval, Interval]


class MonodromyDocument(BaseModel):
    u: Interval
    v: Interval
    a: float
    b: float
    k: int = 1
    margins: Tuple[float, float] = (0.1, 0.1)


class AtlasDocument(BaseModel):
    name: str = "atlas"
    charts: List[ModelDocument]
    transitions: List[TransitionDocument] = Field(default_factory=list)
    monodromy: Optional[MonodromyDocument] = None

    @model_validator(mode="after")
    def check_charts(self):
        names = [c.model_id for c in self.charts]
        if len(set(names)) != len(names):
            raise ValueError("chart model ids must be unique")
        for tr in self.transitions:
            for ref in (tr.source, tr.target):
                if ref not in names:
                    raise ValueError(f"transition {tr.name!r} refers to unknown chart {ref!r}")
        return self
