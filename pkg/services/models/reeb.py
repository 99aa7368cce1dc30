"""
Parabolic Reeb component on the solid torus.

Chart (r, phi, t) on [0, 1] x [0, 2pi] x [0, 2pi], metric diag(1, G(r), 1) and
foliation alpha = f(r) dr + (1 - f(r)) dt. Leaves are flat disks for
r <= 1/3 and flat tori for r >= 2/3; in between the disks turn into the
boundary-parallel tori.
"""

from __future__ import annotations

import math
from typing import Tuple

import numpy as np

from core.errors import DomainError
from schemas.report import ClosedFormComparison
from services.distributions import KernelForm, Span, evaluate
from services.geometry import Chart, MetricField, OneFormField, SingularLocus, VectorFieldExpr, random_points
from services.models.base import Model
from utils.jet import dsmoothstep, smoothstep

F_TEXT = "smoothstep(1/3, 2/3, r)"
G_TEXT = "(1 - smoothstep(1/4, 1/3, r)) * r^2 + smoothstep(1/4, 1/3, r)"

# leaf profile breakpoints and the interval where G blends r^2 into 1
F_BREAKS = (1.0 / 3.0, 2.0 / 3.0)
G_BREAKS = (0.25, 1.0 / 3.0)


def solid_torus_chart(name: str = "reeb") -> Chart:
    two_pi = 2.0 * math.pi
    return Chart(
        name=name,
        coord_names=("r", "phi", "t"),
        domain=((0.0, 1.0), (0.0, two_pi), (0.0, two_pi)),
        periodic=(False, True, True),
        singular_loci=(SingularLocus(coordinate="r", value=0.0, note="polar axis of the solid torus"),),
    )


def reeb_solid_torus() -> Model:
    chart = solid_torus_chart()
    metric = MetricField.diagonal(chart, "1", G_TEXT, "1")
    alpha = OneFormField.from_strings(chart, [F_TEXT, "0", f"1 - {F_TEXT}"])
    X = VectorFieldExpr.from_strings(chart, ["0", "1", "0"])
    Y = VectorFieldExpr.from_strings(chart, [f"1 - {F_TEXT}", "0", f"-{F_TEXT}"])
    return Model(
        model_id="reeb",
        chart=chart,
        metric=metric,
        # X x Y = -(f, 0, 1 - f), so the span is co-oriented by -1 to match alpha
        distributions={"foliation": KernelForm(alpha=alpha), "leaf-frame": Span(S=X, T=Y, sign=-1)},
        frames={"leaf": (X, Y)},
        named_frames={"foliation": "leaf"},
        forms={"dphi": OneFormField.from_strings(chart, ["0", "1", "0"])},
    )


def reeb_profile(r) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """f, f', G, G' at radius r (scalar or array)."""
    r = np.asarray(r, dtype=float)
    f = np.asarray(smoothstep(*F_BREAKS, r))
    df = np.asarray(dsmoothstep(*F_BREAKS, r))
    w = np.asarray(smoothstep(*G_BREAKS, r))
    dw = np.asarray(dsmoothstep(*G_BREAKS, r))
    G = (1.0 - w) * r**2 + w
    dG = -dw * r**2 + (1.0 - w) * 2.0 * r + dw
    return f, df, G, dG


def closed_form_B_reeb(r) -> np.ndarray:
    """
    Second fundamental form in the leaf frame X = d/dphi, Y = (1 - f) d/dr - f d/dt
    with the unit normal: diag(-f G'/2, -(1 - f) f') / sqrt(2 f^2 - 2 f + 1).
    """
    r_arr = np.asarray(r, dtype=float)
    bad = ~(np.isfinite(r_arr) & (r_arr > 0) & (r_arr <= 1))
    if np.any(bad):
        raise DomainError("closed_form_B_reeb", float(r_arr[bad].flat[0]))
    f, df, _, dG = reeb_profile(r_arr)
    norm = np.sqrt(2.0 * f**2 - 2.0 * f + 1.0)
    B = np.zeros(r_arr.shape + (2, 2))
    B[..., 0, 0] = -0.5 * f * dG / norm
    B[..., 1, 1] = -(1.0 - f) * df / norm
    return B


def compare_closed_form(count: int = 200, seed: int = 0, r_range: Tuple[float, float] = (1e-3, 1.0)) -> ClosedFormComparison:
    """Numeric B in the leaf frame against closed_form_B_reeb at seeded random points."""
    model = reeb_solid_torus()
    chart = model.chart.restricted((r_range, model.chart.domain[1], model.chart.domain[2]))
    points = random_points(chart, count, seed=seed)
    X, Y = model.frames["leaf"]
    frame = np.stack([X.values(points), Y.values(points)], axis=-2)
    sample = evaluate(model.metric, model.foliation, points, frame=frame)
    if sample.errors:
        raise sample.errors[min(sample.errors)]
    expected = closed_form_B_reeb(points[:, 0])
    det = sample.B[:, 0, 0] * sample.B[:, 1, 1] - sample.B[:, 0, 1] * sample.B[:, 1, 0]
    return ClosedFormComparison(
        points=count,
        max_abs_error=float(np.max(np.abs(sample.B - expected))),
        max_abs_det=float(np.max(np.abs(det))),
    )
