"""
Coordinate charts and the grids sampled on them.
"""

from __future__ import annotations

import logging
from typing import List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from core.config import settings
from core.errors import ConfigError, SingularSample

logger = logging.getLogger(__name__)

Interval = Tuple[float, float]


class SingularLocus(BaseModel):
    coordinate: str
    value: float
    note: str = ""

    model_config = ConfigDict(frozen=True)


class Chart(BaseModel):
    name: str = "chart"
    coord_names: Tuple[str, str, str]
    domain: Tuple[Interval, Interval, Interval]
    periodic: Tuple[bool, bool, bool] = (False, False, False)
    singular_loci: Tuple[SingularLocus, ...] = ()

    model_config = ConfigDict(frozen=True)

    @field_validator("domain")
    @classmethod
    def check_ordered(cls, domain):
        for lo, hi in domain:
            if not lo < hi:
                raise ValueError(f"interval [{lo}, {hi}] must have lower < upper")
        return domain

    @model_validator(mode="after")
    def check_known_loci(self):
        for locus in self.singular_loci:
            if locus.coordinate not in self.coord_names:
                raise ValueError(f"singular locus on unknown coordinate {locus.coordinate!r}")
        if len(set(self.coord_names)) != 3:
            raise ValueError("coordinate names must be distinct")
        return self

    def axis(self, name: str) -> int:
        return self.coord_names.index(name)

    def loci_on(self, axis: int) -> List[SingularLocus]:
        return [l for l in self.singular_loci if l.coordinate == self.coord_names[axis]]

    def volume(self) -> float:
        return float(np.prod([hi - lo for lo, hi in self.domain]))

    def restricted(self, domain: Sequence[Interval], name: Optional[str] = None) -> "Chart":
        """Same coordinates on a sub-box; restricted axes stop being periodic."""
        periodic = tuple(
            p and tuple(new) == tuple(old) for p, new, old in zip(self.periodic, domain, self.domain)
        )
        return self.model_copy(
            update={"domain": tuple(tuple(d) for d in domain), "periodic": periodic, "name": name or self.name}
        )


class GridSpec(BaseModel):
    counts: Tuple[int, int, int] = Field(default_factory=lambda: tuple(settings.default_grid))

    @field_validator("counts")
    @classmethod
    def check_counts(cls, counts):
        if any(c < 2 for c in counts):
            raise ValueError("grid counts must be >= 2 per axis")
        return counts


def parse_grid(text: str) -> Tuple[int, int, int]:
    """Accept '64x16x16', '64,16,16' or a single '32' for all axes."""
    parts = [p for p in text.replace("x", ",").replace("X", ",").split(",") if p.strip()]
    try:
        values = [int(p) for p in parts]
    except ValueError as exc:
        raise ConfigError(f"invalid grid {text!r}") from exc
    if len(values) == 1:
        values = values * 3
    if len(values) != 3 or any(v < 2 for v in values):
        raise ConfigError(f"grid {text!r} needs three counts >= 2")
    return tuple(values)


def _axis_nodes(chart: Chart, axis: int, count: int, r_min: float) -> np.ndarray:
    lo, hi = chart.domain[axis]
    if chart.periodic[axis]:
        h = (hi - lo) / count
        nodes = lo + (np.arange(count) + 0.5) * h
    else:
        nodes = np.linspace(lo, hi, count)
    for locus in chart.loci_on(axis):
        near = np.abs(nodes - locus.value) < r_min
        if not np.any(near):
            continue
        if locus.value - r_min < lo:
            side = np.ones_like(nodes)
        elif locus.value + r_min > hi:
            side = -np.ones_like(nodes)
        else:
            side = np.where(nodes >= locus.value, 1.0, -1.0)
        nodes = np.where(near, locus.value + side * r_min, nodes)
    return nodes


def axis_nodes(chart: Chart, counts: Sequence[int], r_min: Optional[float] = None) -> List[np.ndarray]:
    r_min = settings.r_min if r_min is None else r_min
    return [_axis_nodes(chart, i, int(n), r_min) for i, n in enumerate(counts)]


def sample_grid(chart: Chart, counts: Sequence[int], r_min: Optional[float] = None) -> np.ndarray:
    """
    Points of a tensor grid, flattened in C order to shape (N, 3). Periodic
    axes use cell midpoints, the others include both endpoints. No point lies
    within r_min of a declared singular locus.
    """
    nodes = axis_nodes(chart, counts, r_min)
    mesh = np.meshgrid(*nodes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=-1)


def midpoint_grid(chart: Chart, counts: Sequence[int], r_min: Optional[float] = None) -> Tuple[np.ndarray, float]:
    """Cell midpoints on every axis plus the cell volume; used for quadrature."""
    r_min = settings.r_min if r_min is None else r_min
    nodes = []
    for axis, count in enumerate(counts):
        lo, hi = chart.domain[axis]
        h = (hi - lo) / count
        axis_points = lo + (np.arange(count) + 0.5) * h
        for locus in chart.loci_on(axis):
            hit = np.abs(axis_points - locus.value) < r_min
            if np.any(hit):
                point = [float(chart.domain[i][0]) for i in range(3)]
                point[axis] = float(axis_points[hit][0])
                raise SingularSample(point, locus.coordinate, locus.value)
        nodes.append(axis_points)
    mesh = np.meshgrid(*nodes, indexing="ij")
    cell = float(np.prod([(hi - lo) / c for (lo, hi), c in zip(chart.domain, counts)]))
    return np.stack([m.ravel() for m in mesh], axis=-1), cell


def random_points(chart: Chart, count: int, seed: int = 0, r_min: Optional[float] = None) -> np.ndarray:
    """Uniform points in the chart, kept r_min away from singular loci."""
    r_min = settings.r_min if r_min is None else r_min
    rng = np.random.default_rng(seed)
    lows = np.array([lo for lo, _ in chart.domain])
    highs = np.array([hi for _, hi in chart.domain])
    points = lows + rng.random((count, 3)) * (highs - lows)
    for axis in range(3):
        for locus in chart.loci_on(axis):
            near = np.abs(points[:, axis] - locus.value) < r_min
            points[near, axis] = np.where(points[near, axis] >= locus.value, locus.value + r_min, locus.value - r_min)
    return points
