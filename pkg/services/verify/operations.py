"""
Registry of check operations. Each operation measures one number (or a
classification) on a target and returns it with a details dict.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Optional, Tuple

import numpy as np

from core.config import settings
from core.domain import Classification
from core.errors import ConfigError
from repositories.document_repository import DocumentRepository
from services.distributions import KernelForm, classify, evaluate, integral_mean_curvature
from services.expr import add, mul, num
from services.geometry import OneFormField, random_points, sample_grid
from services.models import (
    MODELS,
    Model,
    SurfaceMetric,
    TwistSpec,
    check_atlas,
    compare_closed_form,
    contact_deformation_scan,
    dehn_twist_pullback,
    get_model,
    model_from_document,
    open_book_document,
    rank_one_path,
    straight_line_path,
    surface_chart,
    transfer_metric,
    verify_metric_path,
)

logger = logging.getLogger(__name__)

Measurement = Tuple[Any, Dict[str, Any]]


@dataclass
class CheckContext:
    target: str
    grid: Optional[Tuple[int, int, int]]
    tolerance: float
    params: Dict[str, Any] = field(default_factory=dict)
    jobs: Optional[int] = None
    repository: DocumentRepository = field(default_factory=DocumentRepository)

    def model(self) -> Model:
        if self.target in MODELS:
            return get_model(self.target)
        return model_from_document(self.repository.load_model(self.target))

    def param(self, name: str, default: Any = None) -> Any:
        return self.params.get(name, default)

    def distribution(self, model: Model):
        name = self.param("distribution", model.default_distribution)
        if name not in model.distributions:
            raise ConfigError(f"{model.model_id} has no distribution {name!r}")
        return name, model.distributions[name]


OPERATIONS: Dict[str, Callable[[CheckContext], Measurement]] = {}


def operation(name: str):
    def register(fn: Callable[[CheckContext], Measurement]):
        OPERATIONS[name] = fn
        return fn

    return register


def _chart_for(ctx: CheckContext, model: Model):
    """The model chart, optionally narrowed by params {"ranges": {coord: [lo, hi]}}."""
    ranges = ctx.param("ranges") or {}
    domain = list(model.chart.domain)
    for coord, interval in ranges.items():
        domain[model.chart.axis(coord)] = tuple(interval)
    return model.chart.restricted(domain) if ranges else model.chart


def _report(ctx: CheckContext):
    model = ctx.model()
    name, xi = ctx.distribution(model)
    return classify(
        model.metric,
        xi,
        _chart_for(ctx, model),
        grid=ctx.grid,
        tol=ctx.tolerance,
        jobs=ctx.jobs,
        target=model.model_id,
        distribution=name,
    )


def _sample(ctx: CheckContext, frame_name: Optional[str] = None):
    model = ctx.model()
    _, xi = ctx.distribution(model)
    points = sample_grid(_chart_for(ctx, model), ctx.grid or settings.default_grid)
    frame = None
    if frame_name:
        X, Y = model.frames[frame_name]
        frame = np.stack([X.values(points), Y.values(points)], axis=-2)
    return evaluate(model.metric, xi, points, frame=frame, jobs=ctx.jobs)


def _max_valid(sample, values: np.ndarray) -> float:
    values = values[sample.valid]
    return float(np.max(values)) if values.size else float("nan")


@operation("classify")
def classify_op(ctx: CheckContext) -> Measurement:
    report = _report(ctx)
    return report.classification.value, {
        "points_valid": report.points_valid,
        "max_abs_K": report.aggregates["K_e"].max_abs,
        "character": report.character.value,
    }


@operation("max_abs_K")
def max_abs_K(ctx: CheckContext) -> Measurement:
    report = _report(ctx)
    return report.aggregates["K_e"].max_abs, {"classification": report.classification.value}


@operation("max_B_norm")
def max_B_norm(ctx: CheckContext) -> Measurement:
    """params: {"regions": {coord: [[lo, hi], ...]}} measures only inside those slabs."""
    regions = ctx.param("regions")
    if not regions:
        sample = _sample(ctx)
        return _max_valid(sample, sample.B_norm), {"points": int(np.count_nonzero(sample.valid))}
    worst = 0.0
    details = {}
    for coord, intervals in regions.items():
        for lo, hi in intervals:
            sub = CheckContext(ctx.target, ctx.grid, ctx.tolerance, {**ctx.params, "ranges": {coord: [lo, hi]}}, ctx.jobs, ctx.repository)
            sample = _sample(sub)
            value = _max_valid(sample, sample.B_norm)
            details[f"{coord} in [{lo}, {hi}]"] = value
            worst = max(worst, value)
    return worst, details


@operation("frobenius")
def frobenius(ctx: CheckContext) -> Measurement:
    """params: {"stat": "abs_max" | "abs_min"}."""
    sample = _sample(ctx)
    values = np.abs(sample.frobenius[sample.valid])
    stat = ctx.param("stat", "abs_max")
    if stat not in ("abs_max", "abs_min"):
        raise ConfigError(f"unknown frobenius statistic {stat!r}")
    if not values.size:
        return float("nan"), {"stat": stat}
    return float(np.max(values) if stat == "abs_max" else np.min(values)), {"stat": stat}


@operation("contact_volume")
def contact_volume_op(ctx: CheckContext) -> Measurement:
    """params: {"stat": "min" | "max" | "abs_min" | "abs_max"}."""
    sample = _sample(ctx)
    values = sample.contact[sample.valid]
    stat = ctx.param("stat", "abs_min")
    reducers = {
        "min": np.min,
        "max": np.max,
        "abs_min": lambda v: np.min(np.abs(v)),
        "abs_max": lambda v: np.max(np.abs(v)),
    }
    if stat not in reducers:
        raise ConfigError(f"unknown contact statistic {stat!r}")
    return float(reducers[stat](values)) if values.size else float("nan"), {"stat": stat}


@operation("collar_t_row")
def collar_t_row(ctx: CheckContext) -> Measurement:
    model = ctx.model()
    frame_name = ctx.param("frame") or model.named_frames.get(model.default_distribution)
    if not frame_name:
        raise ConfigError(f"{model.model_id} has no named frame for its foliation")
    sample = _sample(ctx, frame_name)
    det = np.abs(sample.B[:, 0, 0] * sample.B[:, 1, 1] - sample.B[:, 0, 1] * sample.B[:, 1, 0])
    row = np.max(np.abs(sample.B[:, 1, :]), axis=-1)
    return _max_valid(sample, row), {"max_abs_det_B": _max_valid(sample, det)}


@operation("closed_form_reeb")
def closed_form_reeb(ctx: CheckContext) -> Measurement:
    comparison = compare_closed_form(count=int(ctx.param("count", 200)), seed=int(ctx.param("seed", 0)))
    return comparison.max_abs_error, comparison.model_dump()


@operation("integral_H")
def integral_H(ctx: CheckContext) -> Measurement:
    model = ctx.model()
    _, xi = ctx.distribution(model)
    report = integral_mean_curvature(model.metric, xi, model.chart, grid=ctx.grid, jobs=ctx.jobs, target=model.model_id)
    return abs(report.integral), report.model_dump(mode="json")


@operation("divergence_defect")
def divergence_defect(ctx: CheckContext) -> Measurement:
    """max |H + div n| at seeded random points."""
    model = ctx.model()
    _, xi = ctx.distribution(model)
    points = random_points(model.chart, int(ctx.param("count", 100)), seed=int(ctx.param("seed", 0)))
    sample = evaluate(model.metric, xi, points, jobs=ctx.jobs)
    return _max_valid(sample, np.abs(sample.H + sample.div_normal)), {"points": len(points)}


@operation("frame_invariance")
def frame_invariance(ctx: CheckContext) -> Measurement:
    """
    Re-evaluate with frames A.(S, T) for seeded random invertible A and report
    the worst of the relative K change and |B' - A B A^T|.
    """
    model = ctx.model()
    _, xi = ctx.distribution(model)
    rng = np.random.default_rng(int(ctx.param("seed", 0)))
    points = random_points(model.chart, int(ctx.param("count", 100)), seed=int(ctx.param("seed", 0)))
    base = evaluate(model.metric, xi, points, jobs=ctx.jobs)
    A = np.eye(2) + 0.3 * rng.normal(size=(len(points), 2, 2))
    moved = evaluate(model.metric, xi, points, frame=A @ base.frame, jobs=ctx.jobs)
    ok = base.valid & moved.valid
    scale = np.maximum(1.0, np.abs(base.K[ok]))
    k_change = float(np.max(np.abs(moved.K[ok] - base.K[ok]) / scale)) if np.any(ok) else float("nan")
    expected = A @ base.B @ np.swapaxes(A, -1, -2)
    b_scale = np.maximum(1.0, np.max(np.abs(expected), axis=(-1, -2)))
    b_change = float(np.max(np.max(np.abs(moved.B - expected), axis=(-1, -2))[ok] / b_scale[ok])) if np.any(ok) else float("nan")
    return max(k_change, b_change), {"K_relative": k_change, "B_transform": b_change}


def _surface_pair(ctx: CheckContext):
    u = tuple(ctx.param("u", (1.0, 2.0)))
    v = tuple(ctx.param("v", (0.0, 2.0 * np.pi)))
    chart = surface_chart(u, v, periodic=tuple(ctx.param("periodic", (False, True))))
    G = SurfaceMetric.from_strings(chart, ctx.param("G", ["1", "0", "1"]))
    twist = ctx.param("twist")
    if twist:
        H = dehn_twist_pullback(G, TwistSpec(**twist))
    else:
        H = SurfaceMetric.from_strings(chart, ctx.param("H", ["1", "0", "1"]))
    return G, H


@operation("metric_path")
def metric_path(ctx: CheckContext) -> Measurement:
    """
    params: u, v, G, H (or twist {a, b, k}), kind "rank-one" | "straight",
    margins, and measure, a field of the path report (default det_residual).
    """
    G, H = _surface_pair(ctx)
    margins = tuple(ctx.param("margins", (0.1, 0.1)))
    kind = ctx.param("kind", "rank-one")
    if kind == "rank-one":
        path = rank_one_path(G, H, margins=margins, grid=ctx.grid)
    elif kind == "straight":
        path = straight_line_path(G, H, margins=margins, reparametrize=bool(ctx.param("reparametrize", False)))
    else:
        raise ConfigError(f"unknown path kind {kind!r}")
    report = verify_metric_path(path, grid=ctx.grid, tol=ctx.tolerance)
    measure = ctx.param("measure", "det_residual")
    dumped = report.model_dump(mode="json")
    if measure not in dumped:
        raise ConfigError(f"metric path reports have no field {measure!r}")
    return dumped[measure], dumped


@operation("twist_det_defect")
def twist_det_defect(ctx: CheckContext) -> Measurement:
    """max |det H(p) - det G(phi(p))| for H the twist pullback of G."""
    G, _ = _surface_pair(ctx)
    tw = TwistSpec(**ctx.param("twist", {"a": 1.25, "b": 1.75, "k": 1}))
    H = dehn_twist_pullback(G, tw)
    points = sample_grid(G.chart, ctx.grid or settings.default_grid)
    det_H = np.linalg.det(H.jets(points)[0])
    det_G = np.linalg.det(G.jets(tw.apply(points))[0])
    return float(np.max(np.abs(det_H - det_G))), {"points": len(points)}


def _tilted(model: Model, xi, tilt: Dict[str, Any]) -> KernelForm:
    """ker(alpha + s beta) for the kernel form alpha of xi; beta is a form name or three expressions."""
    if not isinstance(xi, KernelForm):
        raise ConfigError("a tilted target needs a kernel-form source", distribution=str(type(xi).__name__))
    beta = tilt.get("beta")
    if isinstance(beta, str):
        try:
            beta = model.form(beta)
        except KeyError:
            raise ConfigError(f"{model.model_id} has no form {beta!r}") from None
    else:
        beta = OneFormField.from_strings(model.chart, beta)
    s = num(float(tilt.get("s", 0.1)))
    components = tuple(add(a, mul(s, b)) for a, b in zip(xi.alpha.components, beta.components))
    return KernelForm(alpha=OneFormField(chart=model.chart, components=components))


@operation("transfer")
def transfer(ctx: CheckContext) -> Measurement:
    """
    params: xi (distribution name), eta (a distribution name, or
    {"beta": form, "s": value} for ker(alpha_xi + s beta)), measure: a
    transfer report field.
    """
    model = ctx.model()
    xi_name = ctx.param("xi", model.default_distribution)
    if xi_name not in model.distributions:
        raise ConfigError(f"{model.model_id} has no distribution {xi_name!r}")
    xi = model.distributions[xi_name]
    eta = ctx.param("eta", "tilted")
    if isinstance(eta, dict):
        eta = _tilted(model, xi, eta)
    elif isinstance(eta, str) and eta in model.distributions:
        eta = model.distributions[eta]
    else:
        raise ConfigError(f"{model.model_id} has no distribution {eta!r}")
    _, report = transfer_metric(model.metric, xi, eta, model.chart, grid=ctx.grid, jobs=ctx.jobs, target=model.model_id)
    dumped = report.model_dump(mode="json")
    return dumped[ctx.param("measure", "max_abs_det_B")], dumped


@operation("scan")
def scan(ctx: CheckContext) -> Measurement:
    """
    params: alpha, beta (form names), s (list of values), measure:
    "contact_abs_min" (smallest |contact| over the nonzero s),
    "contact_abs_max" (largest |contact| over all s), "contact_min"
    or "deviation_at_smallest" (normal deviation at the smallest nonzero |s|).
    """
    model = ctx.model()
    alpha0 = model.form(ctx.param("alpha", model.default_distribution))
    beta = model.form(ctx.param("beta"))
    s_values = [float(s) for s in ctx.param("s", [-0.5, -0.25, 0.0, 0.25, 0.5])]
    report = contact_deformation_scan(alpha0, beta, s_values, chart=model.chart, grid=ctx.grid, metric=model.metric, jobs=ctx.jobs, target=model.model_id)
    nonzero = [e for e in report.entries if e.s != 0.0]
    measure = ctx.param("measure", "contact_abs_min")
    if measure == "contact_abs_min":
        value = min((e.contact_abs_min for e in nonzero), default=float("nan"))
    elif measure == "contact_abs_max":
        value = max(max(abs(e.contact_min), abs(e.contact_max)) for e in report.entries)
    elif measure == "contact_min":
        value = min(e.contact_min for e in report.entries)
    elif measure == "deviation_at_smallest":
        value = min(nonzero, key=lambda e: abs(e.s)).normal_deviation_max if nonzero else float("nan")
    else:
        raise ConfigError(f"unknown scan measure {measure!r}")
    return value, report.model_dump(mode="json")


def _atlas(ctx: CheckContext):
    if ctx.target == "open-book":
        doc = open_book_document(**ctx.param("demo", {}))
    else:
        doc = ctx.repository.load_atlas(ctx.target)
    return check_atlas(doc, grid=ctx.grid, tol=ctx.tolerance, jobs=ctx.jobs, strict=False)


@operation("atlas_mismatch")
def atlas_mismatch(ctx: CheckContext) -> Measurement:
    report = _atlas(ctx)
    worst = max((max(o.metric_mismatch, o.leaf_tangency, o.round_trip) for o in report.overlaps), default=0.0)
    if report.gluing_error is not None:
        worst = max(worst, report.gluing_error)
    return worst, report.model_dump(mode="json")


@operation("atlas_parabolic")
def atlas_parabolic(ctx: CheckContext) -> Measurement:
    report = _atlas(ctx)
    classes = [c.classification for c in report.charts]
    if report.monodromy is not None and not report.monodromy.parabolic:
        classes.append(Classification.mixed)
    worst = next((c for c in classes if c != Classification.parabolic), Classification.parabolic)
    return worst.value, {c.name: c.classification.value for c in report.charts}
