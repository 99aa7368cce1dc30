from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, Field

from core.domain import Character, Classification


class FieldStats(BaseModel):
    min: Optional[float] = None
    max: Optional[float] = None
    mean: Optional[float] = None
    max_abs: Optional[float] = None


class PointRecord(BaseModel):
    point: List[float]
    frame: List[List[float]]
    B: List[List[float]]
    gram: List[List[float]]
    H: float
    K_e: float
    frobenius_residual: float
    contact_volume: float


class CurvatureReport(BaseModel):
    target: str
    chart: str
    distribution: str = "default"
    grid: Tuple[int, int, int]
    tol: float
    points_total: int
    points_valid: int
    aggregates: Dict[str, FieldStats]
    classification: Classification
    totally_geodesic: bool
    minimal: bool
    character: Character
    worst_points: List[PointRecord] = Field(default_factory=list)
    errors: List[dict] = Field(default_factory=list)
    records: Optional[List[PointRecord]] = None


class IntegralReport(BaseModel):
    target: str
    chart: str
    grid: Tuple[int, int, int]
    integral: float
    max_defect: float = Field(description="max |H + div n| over the quadrature nodes")
    volume: float


class ClosedFormComparison(BaseModel):
    points: int
    max_abs_error: float
    max_abs_det: float


class CollarResiduals(BaseModel):
    start: float
    end: float
    boundary: float


class MetricPathReport(BaseModel):
    path: str
    grid: Tuple[int, int, int]
    stages: int
    max_abs_det_dt: float
    det_residual: float = Field(description="max |det d_t G| / max(1, |d_t G|^2) away from flagged points")
    flagged_points: int
    collar: CollarResiduals
    spd: bool
    min_eigenvalue: float
    endpoint_error: float
    B_cross_check: Optional[float] = None
    parabolic: bool


class TransferReport(BaseModel):
    target: str
    points: int
    min_angle: float
    max_abs_det_B: float
    max_residual: float
    max_abs_K_source: float


class ScanEntry(BaseModel):
    s: float
    contact_min: float
    contact_max: float
    contact_abs_min: float
    transversality_min: float
    normal_deviation_max: float


class ScanReport(BaseModel):
    target: str
    grid: Tuple[int, int, int]
    entries: List[ScanEntry]


class ChartSummary(BaseModel):
    name: str
    classification: Classification
    max_abs_K: float
    totally_geodesic: bool


class OverlapReport(BaseModel):
    name: str
    points: int
    metric_mismatch: float
    leaf_tangency: float
    round_trip: float


class AtlasReport(BaseModel):
    charts: List[ChartSummary]
    overlaps: List[OverlapReport]
    monodromy: Optional[MetricPathReport] = None
    gluing_error: Optional[float] = None
    tol: float
