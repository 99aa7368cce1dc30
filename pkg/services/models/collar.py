"""
Collar model [1, 1 + 2 eps] x T^2 with the flat metric dr^2 + dphi^2 + dt^2.

alpha = f dphi + (1 - f) dr turns the constant-r tori (f = 0) into the
constant-phi annuli (f = 1), which are the pages of the open book. Every
leaf contains the parallel direction d/dt, so B(., d/dt) = 0 and the
foliation is parabolic.
"""

import math

from core.errors import ConfigError
from services.distributions import KernelForm
from services.geometry import Chart, MetricField, OneFormField, VectorFieldExpr
from services.models.base import Model


def collar_chart(epsilon: float, name: str = "collar") -> Chart:
    two_pi = 2.0 * math.pi
    return Chart(
        name=name,
        coord_names=("r", "phi", "t"),
        domain=((1.0, 1.0 + 2.0 * epsilon), (0.0, two_pi), (0.0, two_pi)),
        periodic=(False, True, True),
    )


def collar_model(epsilon: float = 0.2) -> Model:
    if not epsilon > 0:
        raise ConfigError(f"collar width must be positive, got {epsilon}")
    chart = collar_chart(epsilon)
    f = f"smoothstep({1.0 + epsilon / 2.0!r}, {1.0 + epsilon!r}, r)"
    alpha = OneFormField.from_strings(chart, [f"1 - {f}", f, "0"])
    W = VectorFieldExpr.from_strings(chart, [f, f"-(1 - {f})", "0"])
    Dt = VectorFieldExpr.from_strings(chart, ["0", "0", "1"])
    return Model(
        model_id="collar",
        chart=chart,
        metric=MetricField.euclidean(chart),
        distributions={"foliation": KernelForm(alpha=alpha)},
        frames={"parallel": (W, Dt)},
        named_frames={"foliation": "parallel"},
        parameters={"epsilon": epsilon},
    )
