"""
Levi-Civita connection of a metric given by first-order jets.

Index conventions used across the package:
  G[..., a, b]        metric components g_ab
  dG[..., a, b, k]    partial d_k g_ab
  gamma[..., k, i, j] Christoffel symbol Gamma^k_ij
  dV[..., a, k]       partial d_k V^a of a vector (or 1-form) field
"""

from __future__ import annotations

from typing import Tuple

import numpy as np

from core.errors import DomainError, NotSPD, SingularSample
from services.geometry.fields import MetricSource, VectorFieldExpr, failing_minor, spd_mask


def safe_inverse(G: np.ndarray, valid: np.ndarray | None = None) -> np.ndarray:
    """Batched inverse; invalid matrices are replaced by the identity first."""
    if valid is None:
        valid = spd_mask(G)
    eye = np.broadcast_to(np.eye(3), G.shape)
    return np.linalg.inv(np.where(valid[..., None, None], G, eye))


def christoffel_symbols(Ginv: np.ndarray, dG: np.ndarray) -> np.ndarray:
    lowered = (
        np.einsum("...jli->...lij", dG)
        + np.einsum("...ilj->...lij", dG)
        - np.einsum("...ijl->...lij", dG)
    )
    return 0.5 * np.einsum("...kl,...lij->...kij", Ginv, lowered)


def covariant_derivative_batch(gamma: np.ndarray, X: np.ndarray, Y: np.ndarray, dY: np.ndarray) -> np.ndarray:
    return np.einsum("...i,...ki->...k", X, dY) + np.einsum("...kij,...i,...j->...k", gamma, X, Y)


def divergence_batch(Ginv: np.ndarray, dG: np.ndarray, V: np.ndarray, dV: np.ndarray) -> np.ndarray:
    # d_i log sqrt(det g) = 1/2 g^ab d_i g_ab
    log_vol = 0.5 * np.einsum("...ab,...bai->...i", Ginv, dG)
    return np.einsum("...ii->...", dV) + np.einsum("...i,...i->...", V, log_vol)


def _check_point(g: MetricSource, p: np.ndarray) -> None:
    if p.shape != (3,) or not np.all(np.isfinite(p)):
        raise DomainError("metric_at", p.tolist())
    chart = getattr(g, "chart", None)
    if chart is None:
        return
    for axis, ((lo, hi), periodic) in enumerate(zip(chart.domain, chart.periodic)):
        slack = 1e-12 * (hi - lo)
        if not periodic and not lo - slack <= p[axis] <= hi + slack:
            raise DomainError(f"chart {chart.name!r}", {chart.coord_names[axis]: float(p[axis]), "domain": [lo, hi]})
    for locus in chart.singular_loci:
        if p[chart.axis(locus.coordinate)] == locus.value:
            raise SingularSample(p, locus.coordinate, locus.value)


def metric_at(g: MetricSource, p) -> Tuple[np.ndarray, np.ndarray]:
    """Metric matrix and its partials dG[a, b, k] at one point."""
    p = np.asarray(p, dtype=float)
    _check_point(g, p)
    G, dG = g.jets(p[None, :])
    G, dG = G[0], dG[0]
    if not spd_mask(G):
        raise NotSPD(p, failing_minor(G))
    return G, dG


def christoffel(g: MetricSource, p) -> np.ndarray:
    G, dG = metric_at(g, p)
    return christoffel_symbols(np.linalg.inv(G), dG)


def covariant_derivative(g: MetricSource, X: VectorFieldExpr, Y: VectorFieldExpr, p) -> np.ndarray:
    """(nabla_X Y)^k = X^i d_i Y^k + Gamma^k_ij X^i Y^j."""
    gamma = christoffel(g, p)
    p = np.asarray(p, dtype=float)
    x = X.values(p)
    y, dy = Y.jets(p)
    return covariant_derivative_batch(gamma, x, y, dy)


def divergence(g: MetricSource, X: VectorFieldExpr, p) -> float:
    """div X = (1/sqrt det g) d_i (sqrt det g X^i)."""
    G, dG = metric_at(g, p)
    v, dv = X.jets(np.asarray(p, dtype=float))
    return float(divergence_batch(np.linalg.inv(G), dG, v, dv))
