"""
Linear deformations alpha_s = alpha_0 + s beta of a foliation form, scanned
for the onset of contact behaviour.
"""

from __future__ import annotations

import logging
from typing import Optional, Sequence

import numpy as np

from core.config import settings
from core.errors import ConfigError
from schemas.report import ScanEntry, ScanReport
from services.geometry import Chart, MetricField, MetricSource, OneFormField, exterior_derivative, safe_inverse, sample_grid, wedge3
from utils.parallel import map_ordered

logger = logging.getLogger(__name__)

TINY = 1e-14


def parse_s_range(text: str) -> list:
    """'a:b:n' -> n evenly spaced values from a to b inclusive."""
    try:
        a, b, n = text.split(":")
        a, b, n = float(a), float(b), int(n)
    except ValueError as exc:
        raise ConfigError(f"invalid s-range {text!r}, expected a:b:n") from exc
    if n < 1:
        raise ConfigError(f"s-range {text!r} needs at least one value")
    return np.linspace(a, b, n).tolist() if n > 1 else [a]


def contact_deformation_scan(
    alpha0: OneFormField,
    beta: OneFormField,
    s_values: Sequence[float],
    chart: Optional[Chart] = None,
    grid: Optional[Sequence[int]] = None,
    metric: Optional[MetricSource] = None,
    jobs: Optional[int] = None,
    target: Optional[str] = None,
) -> ScanReport:
    """
    Per s: the range of alpha_s ^ d alpha_s, the smallest angle between
    ker(alpha_s) and the unperturbed normal n0, and the largest angle
    between the unit normals n_s and n0.
    """
    chart = chart or alpha0.chart
    grid = tuple(grid or settings.default_grid)
    metric = metric or MetricField.euclidean(chart)
    points = sample_grid(chart, grid)

    G, _ = metric.jets(points)
    Ginv = safe_inverse(G)
    A0, dA0 = alpha0.jets(points)
    Bv, dB = beta.jets(points)
    m0 = np.sqrt(np.maximum(np.einsum("...a,...ab,...b->...", A0, Ginv, A0), 0.0))
    alive0 = m0 > TINY
    n0 = np.einsum("...ab,...b->...a", Ginv, A0) / np.where(alive0, m0, 1.0)[:, None]

    def entry(s: float) -> ScanEntry:
        A = A0 + s * Bv
        contact = wedge3(A, exterior_derivative(dA0 + s * dB))
        m = np.sqrt(np.maximum(np.einsum("...a,...ab,...b->...", A, Ginv, A), 0.0))
        ok = alive0 & (m > TINY)
        # g(n_s, n0) = alpha_s(n0) / |alpha_s|_g
        cosine = np.einsum("...a,...a->...", A, n0)[ok] / m[ok]
        if not np.any(ok):
            nan = float("nan")
            return ScanEntry(s=s, contact_min=nan, contact_max=nan, contact_abs_min=nan, transversality_min=nan, normal_deviation_max=nan)
        return ScanEntry(
            s=float(s),
            contact_min=float(np.min(contact[ok])),
            contact_max=float(np.max(contact[ok])),
            contact_abs_min=float(np.min(np.abs(contact[ok]))),
            transversality_min=float(np.min(np.arcsin(np.clip(np.abs(cosine), 0.0, 1.0)))),
            normal_deviation_max=float(np.max(np.arccos(np.clip(cosine, -1.0, 1.0)))),
        )

    entries = map_ordered(entry, [float(s) for s in s_values], jobs)
    logger.info("scanned %d deformation parameters on %s", len(entries), chart.name)
    return ScanReport(target=target or chart.name, grid=grid, entries=entries)
