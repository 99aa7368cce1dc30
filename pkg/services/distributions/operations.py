"""
Single-point curvature functionals. Each wrapper evaluates one point through
the batched evaluator and raises the point's error instead of flagging it.
"""

from __future__ import annotations

from typing import Optional, Tuple, Union

import numpy as np

from services.distributions.plane_field import PlaneFieldSample, evaluate
from services.distributions.types import Distribution, KernelForm
from services.geometry import MetricSource, OneFormField, VectorFieldExpr, exterior_derivative, wedge3

FrameLike = Union[np.ndarray, Tuple[VectorFieldExpr, VectorFieldExpr], None]


def _frame_values(frame: FrameLike, p: np.ndarray) -> Optional[np.ndarray]:
    if frame is None:
        return None
    if isinstance(frame, (tuple, list)) and all(isinstance(v, VectorFieldExpr) for v in frame):
        return np.stack([v.values(p) for v in frame])[None]
    return np.asarray(frame, dtype=float).reshape(1, 2, 3)


def at_point(g: MetricSource, xi: Distribution, p, frame: FrameLike = None) -> PlaneFieldSample:
    p = np.asarray(p, dtype=float)
    sample = evaluate(g, xi, p[None, :], frame=_frame_values(frame, p), jobs=1)
    sample.raise_for(0)
    return sample


def tangent_frame(g: MetricSource, xi: Distribution, p) -> Tuple[np.ndarray, np.ndarray]:
    frame = at_point(g, xi, p).frame[0]
    return frame[0], frame[1]


def normal_field(g: MetricSource, xi: Distribution, p) -> np.ndarray:
    return at_point(g, xi, p).normal[0]


def second_fundamental_form(g: MetricSource, xi: Distribution, p, frame: FrameLike = None) -> np.ndarray:
    """B(S, T) = 1/2 g(nabla_S T + nabla_T S, n) in the given or default frame."""
    return at_point(g, xi, p, frame).B[0]


def mean_curvature(g: MetricSource, xi: Distribution, p) -> float:
    return float(at_point(g, xi, p).H[0])


def extrinsic_curvature(g: MetricSource, xi: Distribution, p) -> float:
    return float(at_point(g, xi, p).K[0])


def frobenius_residual(g: MetricSource, xi: Distribution, p) -> float:
    """g([S, T], n) / |S ^ T|; zero exactly where the plane field is integrable."""
    return float(at_point(g, xi, p).frobenius[0])


def contact_volume(alpha: Union[OneFormField, KernelForm], p) -> float:
    """alpha ^ d alpha as a multiple of dx1 ^ dx2 ^ dx3."""
    if isinstance(alpha, KernelForm):
        alpha = alpha.alpha
    A, dA = alpha.jets(np.asarray(p, dtype=float))
    return wedge3(A, exterior_derivative(dA))
