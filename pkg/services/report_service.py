import logging
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Type, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel

from core.errors import ConfigError
from repositories.document_repository import DocumentRepository
from schemas.chart import AtlasDocument, ChartDocument, ModelDocument
from schemas.report import AtlasReport, CurvatureReport, IntegralReport, MetricPathReport, ScanReport, TransferReport
from schemas.suite import SuiteReport, SuiteSpec
from services.distributions import classify, evaluate, integral_mean_curvature
from services.geometry import OneFormField, axis_nodes
from services.models import (
    MODELS,
    Model,
    check_atlas,
    collar_model,
    contact_deformation_scan,
    get_model,
    model_from_document,
    model_to_document,
    open_book_document,
    parse_s_range,
    product_example,
    reeb_solid_torus,
)
from services.verify import resolve_suite, run_suite

logger = logging.getLogger(__name__)

SCHEMAS: Dict[str, Type[BaseModel]] = {
    "chart": ChartDocument,
    "model": ModelDocument,
    "atlas": AtlasDocument,
    "curvature-report": CurvatureReport,
    "integral-report": IntegralReport,
    "metric-path-report": MetricPathReport,
    "transfer-report": TransferReport,
    "scan-report": ScanReport,
    "atlas-report": AtlasReport,
    "suite": SuiteSpec,
    "suite-report": SuiteReport,
}

EMITTABLE = ("reeb", "collar", "product", "atlas")


class ReportService:
    def __init__(self, root: Optional[Union[str, Path]] = None):
        self.documents = DocumentRepository(root)

    def load_model(self, target: str) -> Model:
        """A catalog name, or a chart/model JSON file."""
        if target in MODELS:
            return get_model(target)
        return model_from_document(self.documents.load_model(target))

    def _distribution(self, model: Model, name: Optional[str]):
        name = name or model.default_distribution
        if name not in model.distributions:
            raise ConfigError(
                f"{model.model_id} has no distribution {name!r}; known: {', '.join(model.distributions)}"
            )
        return name, model.distributions[name]

    def check(
        self,
        target: str,
        distribution: Optional[str] = None,
        grid: Optional[Sequence[int]] = None,
        tol: Optional[float] = None,
        jobs: Optional[int] = None,
        include_records: bool = False,
    ) -> CurvatureReport:
        model = self.load_model(target)
        name, xi = self._distribution(model, distribution)
        return classify(
            model.metric,
            xi,
            model.chart,
            grid=grid,
            tol=tol,
            jobs=jobs,
            target=model.model_id,
            distribution=name,
            include_records=include_records,
            frame=model.frame_for(name),
        )

    def classify(self, target: str, **kwargs) -> Dict:
        report = self.check(target, **kwargs)
        return report.model_dump(
            mode="json",
            include={"target", "chart", "distribution", "grid", "tol", "points_total", "points_valid", "aggregates", "classification", "totally_geodesic", "minimal", "character"},
        )

    def integrate_h(
        self,
        target: str,
        distribution: Optional[str] = None,
        grid: Optional[Sequence[int]] = None,
        compact_support: bool = False,
        jobs: Optional[int] = None,
    ) -> IntegralReport:
        model = self.load_model(target)
        _, xi = self._distribution(model, distribution)
        return integral_mean_curvature(model.metric, xi, model.chart, grid=grid, compact_support=compact_support, jobs=jobs, target=model.model_id)

    def verify(self, suite: str, jobs: Optional[int] = None) -> SuiteReport:
        return run_suite(resolve_suite(suite, self.documents), jobs=jobs, repository=self.documents)

    def _form(self, model: Model, ref: str) -> OneFormField:
        """A named form of the model, or an inline triple 'a; b; c' in its coordinates."""
        if ";" in ref:
            return OneFormField.from_strings(model.chart, [part.strip() for part in ref.split(";")])
        try:
            return model.form(ref)
        except KeyError:
            known = sorted(set(model.forms) | set(model.distributions))
            raise ConfigError(f"{model.model_id} has no form {ref!r}; known: {', '.join(known)}") from None

    def scan(
        self,
        target: str,
        alpha: Optional[str],
        beta: str,
        s_range: str,
        grid: Optional[Sequence[int]] = None,
        jobs: Optional[int] = None,
    ) -> ScanReport:
        model = self.load_model(target)
        alpha0 = self._form(model, alpha or model.default_distribution)
        return contact_deformation_scan(
            alpha0,
            self._form(model, beta),
            parse_s_range(s_range),
            chart=model.chart,
            grid=grid,
            metric=model.metric,
            jobs=jobs,
            target=model.model_id,
        )

    def atlas(self, target: str, grid: Optional[Sequence[int]] = None, tol: Optional[float] = None, jobs: Optional[int] = None) -> AtlasReport:
        doc = open_book_document() if target == "open-book" else self.documents.load_atlas(target)
        return check_atlas(doc, grid=grid, tol=tol, jobs=jobs)

    def model_document(self, kind: str, epsilon: float = 0.2, k: int = 1, delta: float = 0.1) -> BaseModel:
        if kind == "reeb":
            return model_to_document(reeb_solid_torus())
        if kind == "collar":
            return model_to_document(collar_model(epsilon))
        if kind == "product":
            return model_to_document(product_example())
        if kind == "atlas":
            return open_book_document(k=k, epsilon=epsilon, delta=delta)
        raise ConfigError(f"unknown model kind {kind!r}; choose from {', '.join(EMITTABLE)}")

    def plotdata(
        self,
        target: str,
        axis: str,
        count: int = 101,
        at: Optional[Dict[str, float]] = None,
        distribution: Optional[str] = None,
        jobs: Optional[int] = None,
    ) -> pd.DataFrame:
        """H, K_e and friends along one coordinate line; the other coordinates sit at ``at`` or the chart center."""
        model = self.load_model(target)
        _, xi = self._distribution(model, distribution)
        chart = model.chart
        if axis not in chart.coord_names:
            raise ConfigError(f"{chart.name} has no coordinate {axis!r}; choose from {', '.join(chart.coord_names)}")
        if count < 2:
            raise ConfigError("plot data needs at least 2 points")
        at = dict(at or {})
        unknown = set(at) - set(chart.coord_names)
        if unknown:
            raise ConfigError(f"unknown coordinates in --at: {', '.join(sorted(unknown))}")
        index = chart.axis(axis)
        counts = [2, 2, 2]
        counts[index] = count
        line = axis_nodes(chart, counts)[index]
        points = np.empty((len(line), 3))
        for i, name in enumerate(chart.coord_names):
            lo, hi = chart.domain[i]
            points[:, i] = line if i == index else at.get(name, 0.5 * (lo + hi))
        frame_fields = model.frame_for(distribution or model.default_distribution)
        frame = None if frame_fields is None else np.stack([X.values(points) for X in frame_fields], axis=-2)
        sample = evaluate(model.metric, xi, points, frame=frame, jobs=jobs)
        columns: Dict[str, List] = {name: points[:, i] for i, name in enumerate(chart.coord_names)}
        columns.update(
            {
                "valid": sample.valid,
                "H": sample.H,
                "K_e": sample.K,
                "B_norm": sample.B_norm,
                "frobenius_residual": sample.frobenius,
                "contact_volume": sample.contact,
            }
        )
        return pd.DataFrame(columns)

    def schema(self, name: str) -> Dict:
        try:
            return SCHEMAS[name].model_json_schema()
        except KeyError:
            raise ConfigError(f"unknown schema {name!r}; known: {', '.join(SCHEMAS)}") from None

    def write(self, output: Union[str, Path], document: Union[BaseModel, Dict]) -> Path:
        return self.documents.save(output, document)

    def write_csv(self, output: Union[str, Path], frame: pd.DataFrame) -> Path:
        return self.documents.save_csv(output, frame)


def aggregates_frame(report: Union[CurvatureReport, Dict]) -> pd.DataFrame:
    """One row per aggregated field with its min/max/mean/max_abs."""
    data = report.model_dump(mode="json") if isinstance(report, BaseModel) else report
    rows = [{"field": name, **stats} for name, stats in data["aggregates"].items()]
    return pd.DataFrame(rows, columns=["field", "min", "max", "mean", "max_abs"])
