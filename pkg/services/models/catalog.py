"""
Named example models: the constructions from the models package plus the
small test geometries used by the suites (round cylinders and spheres,
contact forms, periodic plane fields on the flat 3-torus).
"""

from __future__ import annotations

import math
from typing import Callable, Dict, List

from core.errors import ConfigError
from services.distributions import KernelForm
from services.geometry import Chart, MetricField, OneFormField
from services.models.base import Model
from services.models.collar import collar_model
from services.models.product import SurfaceMetric, product_fibration, surface_chart
from services.models.reeb import reeb_solid_torus

TWO_PI = 2.0 * math.pi


def torus_chart(period: float = 1.0, name: str = "torus") -> Chart:
    return Chart(
        name=name,
        coord_names=("x", "y", "z"),
        domain=((0.0, period),) * 3,
        periodic=(True, True, True),
    )


def _kernel_model(model_id: str, chart: Chart, metric: MetricField, alpha: List[str], **extra) -> Model:
    return Model(
        model_id=model_id,
        chart=chart,
        metric=metric,
        distributions={"foliation": KernelForm(alpha=OneFormField.from_strings(chart, alpha))},
        **extra,
    )


def cylinder_example() -> Model:
    """Round cylinders r = const in cylindrical coordinates."""
    chart = Chart(
        name="cylinder",
        coord_names=("r", "phi", "z"),
        domain=((0.5, 2.0), (0.0, TWO_PI), (-1.0, 1.0)),
        periodic=(False, True, False),
    )
    return _kernel_model("cylinder", chart, MetricField.diagonal(chart, "1", "r^2", "1"), ["1", "0", "0"])


def sphere_example() -> Model:
    """Round spheres rho = const in punctured R^3, away from the polar axis."""
    chart = Chart(
        name="sphere",
        coord_names=("rho", "theta", "phi"),
        domain=((0.5, 2.0), (0.3, math.pi - 0.3), (0.0, TWO_PI)),
        periodic=(False, False, True),
    )
    metric = MetricField.diagonal(chart, "1", "rho^2", "rho^2 * sin(theta)^2")
    return _kernel_model("sphere", chart, metric, ["1", "0", "0"])


def standard_contact_example() -> Model:
    chart = Chart(name="standard-contact", coord_names=("x", "y", "z"), domain=((-1.0, 1.0),) * 3)
    return _kernel_model("standard-contact", chart, MetricField.euclidean(chart), ["-y", "x", "1"])


def rotating_contact_example() -> Model:
    chart = Chart(
        name="rotating-contact",
        coord_names=("x", "y", "z"),
        domain=((-1.0, 1.0), (-1.0, 1.0), (0.0, TWO_PI)),
        periodic=(False, False, True),
    )
    return _kernel_model("rotating-contact", chart, MetricField.euclidean(chart), ["cos(z)", "sin(z)", "0"])


def product_example() -> Model:
    page = surface_chart((0.0, TWO_PI), (0.0, TWO_PI), periodic=(True, True), name="product")
    G = SurfaceMetric.from_strings(page, ["1 + 0.5 * sin(u)^2", "0", "1"])
    return product_fibration(G)


def _torus_example(model_id: str, alpha: List[str]) -> Callable[[], Model]:
    def build() -> Model:
        chart = torus_chart(name=model_id)
        return _kernel_model(model_id, chart, MetricField.euclidean(chart), alpha)

    build.__name__ = model_id.replace("-", "_")
    return build


def torus_scan_example() -> Model:
    """dz on the 2 pi torus with the rotating form as deformation direction."""
    chart = torus_chart(TWO_PI, name="torus-scan")
    return _kernel_model(
        "torus-scan",
        chart,
        MetricField.euclidean(chart),
        ["0", "0", "1"],
        forms={"rotating": OneFormField.from_strings(chart, ["cos(z)", "sin(z)", "0"])},
    )


def tilted_plane_example(angle: float = 0.1) -> Model:
    """ker dz together with the same planes rotated by ``angle`` about the x axis."""
    chart = torus_chart(name="torus-tilted")
    c, s = math.cos(angle), math.sin(angle)
    tilted = OneFormField.from_strings(chart, ["0", repr(-s), repr(c)])
    model = _kernel_model("torus-tilted", chart, MetricField.euclidean(chart), ["0", "0", "1"])
    return model.model_copy(update={"distributions": {**model.distributions, "tilted": KernelForm(alpha=tilted)}})


MODELS: Dict[str, Callable[[], Model]] = {
    "reeb": reeb_solid_torus,
    "collar": collar_model,
    "product": product_example,
    "cylinder": cylinder_example,
    "sphere": sphere_example,
    "standard-contact": standard_contact_example,
    "rotating-contact": rotating_contact_example,
    "torus-flat": _torus_example("torus-flat", ["0", "0", "1"]),
    "torus-graph": _torus_example("torus-graph", ["0.3 * sin(2 * pi * x)", "0", "1"]),
    "torus-saddle": _torus_example("torus-saddle", ["0.3 * sin(2 * pi * x)", "0.2 * cos(2 * pi * y)", "1"]),
    "torus-wave": _torus_example("torus-wave", ["cos(2 * pi * z)", "sin(2 * pi * z)", "0"]),
    "torus-scan": torus_scan_example,
    "torus-tilted": tilted_plane_example,
}

# compact without boundary, so the integral of H must vanish
PERIODIC_EXAMPLES = ("product", "torus-flat", "torus-graph", "torus-saddle", "torus-wave")
FOLIATION_EXAMPLES = ("reeb", "collar", "product", "cylinder", "sphere", "torus-flat", "torus-graph", "torus-saddle", "torus-scan", "torus-tilted")
CONTACT_EXAMPLES = ("standard-contact", "rotating-contact", "torus-wave")


def get_model(name: str) -> Model:
    try:
        build = MODELS[name]
    except KeyError:
        raise ConfigError(f"unknown model {name!r}; known: {', '.join(sorted(MODELS))}") from None
    return build()
