"""
Metric transfer from a plane field xi to a plane field eta transverse to the
normal of xi.

With (X1, X2) a g-orthonormal frame of xi, n its unit normal and P the
g-orthogonal projection onto eta, the new metric declares {P X1, P X2, n}
orthonormal: g~ = E^-T E^-1 for E = [P X1 | P X2 | n]. Everything is carried
as (value, partials) pairs so g~ is a metric source with exact first partials.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from core.config import settings
from core.errors import NotTransverse
from schemas.report import TransferReport
from services.distributions import Distribution, evaluate, form_jets, frame_jets, normal_jets
from services.geometry import Chart, MetricSource, safe_inverse, sample_grid, spd_mask

logger = logging.getLogger(__name__)

MIN_ANGLE = 1e-3

Field = Tuple[np.ndarray, np.ndarray]


def _inner(G, dG, X: Field, Y: Field) -> Field:
    x, dx = X
    y, dy = Y
    value = np.einsum("...a,...ab,...b->...", x, G, y)
    grad = (
        np.einsum("...ak,...ab,...b->...k", dx, G, y)
        + np.einsum("...a,...abk,...b->...k", x, dG, y)
        + np.einsum("...a,...ab,...bk->...k", x, G, dy)
    )
    return value, grad


def _scaled(X: Field, c: Field) -> Field:
    x, dx = X
    cv, dc = c
    return cv[..., None] * x, cv[..., None, None] * dx + x[..., :, None] * dc[..., None, :]


def _minus(X: Field, Y: Field) -> Field:
    return X[0] - Y[0], X[1] - Y[1]


def _unit(G, dG, X: Field) -> Field:
    norm2, dnorm2 = _inner(G, dG, X, X)
    inv = 1.0 / np.sqrt(norm2)
    return _scaled(X, (inv, -0.5 * inv[..., None] ** 3 * dnorm2))


def _project(G, dG, X: Field, nu: Field) -> Field:
    return _minus(X, _scaled(nu, _inner(G, dG, X, nu)))


@dataclass
class TransferredMetric:
    g: MetricSource
    xi: Distribution
    eta: Distribution
    min_angle: float = MIN_ANGLE
    chart: Optional[Chart] = None

    def pieces(self, points) -> Dict[str, Field]:
        points = np.atleast_2d(np.asarray(points, dtype=float))
        G, dG = self.g.jets(points)
        Ginv = safe_inverse(G)
        alive = spd_mask(G)
        A, dA, _, _ = form_jets(self.xi, points)
        n, dn, _ = normal_jets(Ginv, dG, A, dA, alive)
        A_eta, dA_eta, _, _ = form_jets(self.eta, points)
        nu, dnu, _ = normal_jets(Ginv, dG, A_eta, dA_eta, alive)

        sine = np.abs(np.einsum("...a,...ab,...b->...", n, G, nu))
        angle = np.arcsin(np.clip(sine, 0.0, 1.0))
        if np.any(angle < self.min_angle):
            bad = int(np.argmin(angle))
            raise NotTransverse(points[bad], float(angle[bad]))

        S, dS, T, dT = frame_jets(self.xi, points)
        X1 = _unit(G, dG, (S, dS))
        X2 = _unit(G, dG, _project(G, dG, (T, dT), X1))
        return {
            "n": (n, dn),
            "nu": (nu, dnu),
            "X1": X1,
            "X2": X2,
            "PX1": _project(G, dG, X1, (nu, dnu)),
            "PX2": _project(G, dG, X2, (nu, dnu)),
            "angle": (angle, np.zeros(angle.shape + (3,))),
        }

    def jets(self, points) -> Tuple[np.ndarray, np.ndarray]:
        p = self.pieces(points)
        columns = [p["PX1"], p["PX2"], p["n"]]
        E = np.stack([c[0] for c in columns], axis=-1)
        dE = np.stack([c[1] for c in columns], axis=-2)
        Einv = np.linalg.inv(E)
        dEinv = -np.einsum("...ia,...abk,...bj->...ijk", Einv, dE, Einv)
        G = np.einsum("...ca,...cb->...ab", Einv, Einv)
        dG = np.einsum("...cak,...cb->...abk", dEinv, Einv) + np.einsum("...ca,...cbk->...abk", Einv, dEinv)
        return G, dG


def transfer_metric(
    g: MetricSource,
    xi: Distribution,
    eta: Distribution,
    chart: Chart,
    grid: Optional[Sequence[int]] = None,
    min_angle: float = MIN_ANGLE,
    jobs: Optional[int] = None,
    target: Optional[str] = None,
) -> Tuple[TransferredMetric, TransferReport]:
    """
    Build g~ and compare the second fundamental form of eta under g~ in the
    frame (P X1, P X2) with that of xi under g in (X1, X2).
    """
    grid = tuple(grid or settings.default_grid)
    points = sample_grid(chart, grid)
    metric = TransferredMetric(g=g, xi=xi, eta=eta, min_angle=min_angle, chart=chart)
    p = metric.pieces(points)

    source = evaluate(g, xi, points, frame=np.stack([p["X1"][0], p["X2"][0]], axis=-2), jobs=jobs)
    moved = evaluate(metric, eta, points, frame=np.stack([p["PX1"][0], p["PX2"][0]], axis=-2), jobs=jobs)
    A_eta, _, _, _ = form_jets(eta, points)
    # under g~ the normal of eta is +-n; align the co-orientations before comparing
    orientation = np.sign(np.einsum("...a,...a->...", A_eta, p["n"][0]))
    ok = source.valid & moved.valid
    residual = np.abs(orientation[:, None, None] * moved.B - source.B).reshape(len(points), -1).max(axis=-1)
    det_moved = np.abs(moved.B[:, 0, 0] * moved.B[:, 1, 1] - moved.B[:, 0, 1] * moved.B[:, 1, 0])

    def worst(values: np.ndarray) -> float:
        return float(np.max(values[ok])) if np.any(ok) else float("nan")

    report = TransferReport(
        target=target or chart.name,
        points=int(np.count_nonzero(ok)),
        min_angle=float(np.min(p["angle"][0])),
        max_abs_det_B=worst(det_moved),
        max_residual=worst(residual),
        max_abs_K_source=worst(np.abs(source.K)),
    )
    logger.info("metric transfer on %s: residual %.3e, |det B| %.3e", report.target, report.max_residual, report.max_abs_det_B)
    return metric, report
