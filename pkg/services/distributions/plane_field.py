"""
Vectorized evaluation of a plane field and its curvature functionals on a
batch of points.

Every quantity is computed from first-order jets of the metric and of the
defining 1-form; the unit normal n is differentiated exactly and the second
fundamental form is taken as B(X, Y) = -1/2 (g(nabla_X n, Y) + g(nabla_Y n, X)),
which agrees with 1/2 g(nabla_X Y + nabla_Y X, n) on sections of the plane
field and needs only pointwise frame values.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from core.errors import DegenerateDistribution, NotSPD, PlaneFieldError
from services.distributions.types import Distribution, KernelForm
from services.geometry import (
    EPSILON,
    MetricSource,
    christoffel_symbols,
    exterior_derivative,
    leading_minors,
    safe_inverse,
    spd_mask,
)
from utils.parallel import map_chunks

logger = logging.getLogger(__name__)

# the two coordinate directions left over once the pivot axis is removed
_OTHERS = np.array([[1, 2], [0, 2], [0, 1]])

VANISHING_FORM = 1e-14
DEPENDENT_FRAME = 1e-12
TANGENCY_TOL = 1e-9


@dataclass
class PlaneFieldSample:
    points: np.ndarray
    valid: np.ndarray
    frame: np.ndarray
    normal: np.ndarray
    B: np.ndarray
    gram: np.ndarray
    H: np.ndarray
    K: np.ndarray
    frobenius: np.ndarray
    contact: np.ndarray
    div_normal: np.ndarray
    alpha_norm: np.ndarray
    errors: Dict[int, PlaneFieldError] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.points)

    def issues(self) -> List[dict]:
        return [
            {"index": i, "point": [float(x) for x in self.points[i]], "error": err.to_dict()}
            for i, err in sorted(self.errors.items())
        ]

    def raise_for(self, index: int = 0) -> None:
        if index in self.errors:
            raise self.errors[index]

    @property
    def B_norm(self) -> np.ndarray:
        """Frobenius norm of B in a Gram-orthonormalized frame."""
        L = np.linalg.cholesky(np.where(self.valid[:, None, None], self.gram, np.eye(2)))
        Linv = np.linalg.inv(L)
        Bo = Linv @ self.B @ np.swapaxes(Linv, -1, -2)
        return np.where(self.valid, np.sqrt(np.sum(Bo**2, axis=(-1, -2))), np.nan)


def _empty(points: np.ndarray) -> PlaneFieldSample:
    n = len(points)
    nan = lambda *shape: np.full((n,) + shape, np.nan)
    return PlaneFieldSample(
        points=points,
        valid=np.zeros(n, dtype=bool),
        frame=nan(2, 3),
        normal=nan(3),
        B=nan(2, 2),
        gram=nan(2, 2),
        H=nan(),
        K=nan(),
        frobenius=nan(),
        contact=nan(),
        div_normal=nan(),
        alpha_norm=nan(),
    )


def concatenate(samples: Sequence[PlaneFieldSample]) -> PlaneFieldSample:
    errors: Dict[int, PlaneFieldError] = {}
    offset = 0
    for s in samples:
        errors.update({offset + i: e for i, e in s.errors.items()})
        offset += len(s)
    names = [f for f in PlaneFieldSample.__dataclass_fields__ if f != "errors"]
    merged = {name: np.concatenate([getattr(s, name) for s in samples]) for name in names}
    return PlaneFieldSample(**merged, errors=errors)


def kernel_frame(A: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Deterministic basis of ker(alpha): pivot k = argmax |alpha_k|, the other
    axes i < j give S = e_i - (alpha_i/alpha_k) e_k and T = e_j - (alpha_j/alpha_k) e_k.
    """
    n = len(A)
    rows = np.arange(n)
    k = np.argmax(np.abs(A), axis=-1)
    i, j = _OTHERS[k, 0], _OTHERS[k, 1]
    ak = A[rows, k]
    ak = np.where(ak == 0, 1.0, ak)
    S = np.zeros((n, 3))
    T = np.zeros((n, 3))
    S[rows, i] = 1.0
    S[rows, k] = -A[rows, i] / ak
    T[rows, j] = 1.0
    T[rows, k] = -A[rows, j] / ak
    return S, T


def form_jets(xi: Distribution, points: np.ndarray):
    """Co-oriented defining 1-form (values, partials) plus the default tangent frame."""
    if isinstance(xi, KernelForm):
        A, dA = xi.alpha.jets(points)
        S, T = kernel_frame(A)
    else:
        S, dS = xi.S.jets(points)
        T, dT = xi.T.jets(points)
        A = np.einsum("ijk,...i,...j->...k", EPSILON, S, T)
        dA = np.einsum("ijk,...il,...j->...kl", EPSILON, dS, T) + np.einsum("ijk,...i,...jl->...kl", EPSILON, S, dT)
    return xi.sign * A, xi.sign * dA, S, T


def frame_jets(xi: Distribution, points: np.ndarray):
    """Default tangent frame with partials: (S, dS, T, dT), dS[..., a, k] = d_k S^a."""
    if not isinstance(xi, KernelForm):
        S, dS = xi.S.jets(points)
        T, dT = xi.T.jets(points)
        return S, dS, T, dT
    A, dA = xi.alpha.jets(points)
    S, T = kernel_frame(A)
    rows = np.arange(len(A))
    k = np.argmax(np.abs(A), axis=-1)
    ak = np.where(A[rows, k] == 0, 1.0, A[rows, k])
    dak = dA[rows, k]
    dS = np.zeros(S.shape + (3,))
    dT = np.zeros(T.shape + (3,))
    for frame_d, axis in ((dS, _OTHERS[k, 0]), (dT, _OTHERS[k, 1])):
        ai = A[rows, axis]
        # d(-a_i / a_k) = -(d a_i a_k - a_i d a_k) / a_k^2
        frame_d[rows, k] = -(dA[rows, axis] * ak[:, None] - ai[:, None] * dak) / (ak**2)[:, None]
    return S, dS, T, dT


def normal_jets(Ginv: np.ndarray, dG: np.ndarray, A: np.ndarray, dA: np.ndarray, alive: np.ndarray):
    """
    Unit normal n = alpha^sharp / |alpha|, its partials dn[..., a, k] and |alpha|_g.
    Points outside ``alive`` get a unit denominator so the arithmetic stays finite.
    """
    V = np.einsum("...ab,...b->...a", Ginv, A)
    m2 = np.einsum("...a,...a->...", A, V)
    m = np.sqrt(np.where(alive & (m2 > 0), m2, 1.0))
    n = V / m[:, None]
    dGinv = -np.einsum("...ac,...cdk,...db->...abk", Ginv, dG, Ginv)
    dV = np.einsum("...abk,...b->...ak", dGinv, A) + np.einsum("...ab,...bk->...ak", Ginv, dA)
    dm = (np.einsum("...bk,...b->...k", dA, V) + np.einsum("...b,...bk->...k", A, dV)) / (2.0 * m[:, None])
    dn = dV / m[:, None, None] - V[:, :, None] * dm[:, None, :] / (m**2)[:, None, None]
    return n, dn, m


def _evaluate_block(
    g: MetricSource, xi: Distribution, points: np.ndarray, frame: Optional[np.ndarray] = None
) -> PlaneFieldSample:
    G, dG = g.jets(points)
    A, dA, S, T = form_jets(xi, points)
    if frame is not None:
        S, T = frame[:, 0, :], frame[:, 1, :]

    finite = np.all(np.isfinite(A), axis=-1) & np.all(np.isfinite(dA), axis=(-1, -2))
    finite &= np.all(np.isfinite(dG), axis=(-1, -2, -3))
    spd = spd_mask(G)
    Ginv = safe_inverse(G, spd)

    alive = finite & spd & (np.max(np.abs(np.where(finite[:, None], A, 0.0)), axis=-1) > VANISHING_FORM)
    n, dn, m = normal_jets(Ginv, dG, A, dA, alive)
    gamma = christoffel_symbols(Ginv, dG)
    Dn = dn + np.einsum("...akj,...j->...ak", gamma, n)

    L = np.einsum("...ba,...ak->...kb", G, Dn)
    B3 = -0.5 * (L + np.swapaxes(L, -1, -2))
    F = np.stack([S, T], axis=-2)
    B = np.einsum("...pi,...ij,...qj->...pq", F, B3, F)
    gram = np.einsum("...pi,...ij,...qj->...pq", F, G, F)
    det_gram = gram[:, 0, 0] * gram[:, 1, 1] - gram[:, 0, 1] * gram[:, 1, 0]
    scale = gram[:, 0, 0] * gram[:, 1, 1]
    independent = det_gram > DEPENDENT_FRAME * np.where(scale > 0, scale, 1.0)
    tangent = np.ones(len(points), dtype=bool)
    if frame is not None:
        a_norm = np.linalg.norm(A, axis=-1)
        for v in (S, T):
            tangent &= np.abs(np.einsum("...a,...a->...", A, v)) <= TANGENCY_TOL * a_norm * np.linalg.norm(v, axis=-1)

    valid = alive & independent & tangent
    det_safe = np.where(valid, det_gram, 1.0)
    H = (gram[:, 1, 1] * B[:, 0, 0] - gram[:, 0, 1] * (B[:, 0, 1] + B[:, 1, 0]) + gram[:, 0, 0] * B[:, 1, 1]) / det_safe
    K = (B[:, 0, 0] * B[:, 1, 1] - B[:, 0, 1] * B[:, 1, 0]) / det_safe

    omega = exterior_derivative(dA)
    d_alpha_st = np.einsum("...i,...ij,...j->...", S, omega, T)
    frobenius = -d_alpha_st / (m * np.sqrt(np.abs(det_safe)))
    contact = 0.5 * np.einsum("ijk,...i,...jk->...", EPSILON, A, omega)
    div_normal = np.einsum("...aa->...", Dn)

    errors: Dict[int, PlaneFieldError] = {}
    for idx in np.flatnonzero(~valid):
        p = points[idx]
        if finite[idx] and not spd[idx]:
            minors = leading_minors(G[idx])
            errors[int(idx)] = NotSPD(p, int(np.argmax(~(minors > 0))) + 1)
        elif not finite[idx]:
            errors[int(idx)] = DegenerateDistribution(p, "non-finite field values")
        elif not alive[idx]:
            errors[int(idx)] = DegenerateDistribution(p, "defining 1-form vanishes")
        elif not tangent[idx]:
            errors[int(idx)] = DegenerateDistribution(p, "frame is not tangent to the plane field")
        else:
            errors[int(idx)] = DegenerateDistribution(p, "frame vectors are linearly dependent")

    def keep(values: np.ndarray) -> np.ndarray:
        mask = valid.reshape(valid.shape + (1,) * (values.ndim - 1))
        return np.where(mask, values, np.nan)

    return PlaneFieldSample(
        points=points,
        valid=valid,
        frame=keep(F),
        normal=keep(n),
        B=keep(B),
        gram=keep(gram),
        H=keep(H),
        K=keep(K),
        frobenius=keep(frobenius),
        contact=np.where(finite, contact, np.nan),
        div_normal=keep(div_normal),
        alpha_norm=keep(m),
        errors=errors,
    )


def _evaluate_guarded(g, xi, points, frame) -> PlaneFieldSample:
    try:
        return _evaluate_block(g, xi, points, frame)
    except PlaneFieldError:
        # a field failed to evaluate somewhere in the block; isolate the bad points
        pass
    singles = []
    for i in range(len(points)):
        one = points[i : i + 1]
        try:
            singles.append(_evaluate_block(g, xi, one, None if frame is None else frame[i : i + 1]))
        except PlaneFieldError as exc:
            empty = _empty(one)
            empty.errors[0] = exc
            singles.append(empty)
    return concatenate(singles)


def evaluate(
    g: MetricSource,
    xi: Distribution,
    points,
    frame: Optional[np.ndarray] = None,
    jobs: Optional[int] = None,
) -> PlaneFieldSample:
    """
    Evaluate the plane field on points of shape (N, 3). ``frame`` optionally
    overrides the default tangent frame with per-point vectors of shape (N, 2, 3).
    Invalid points are flagged in ``valid`` and described in ``errors``; nothing
    is raised for individual points.
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if frame is not None:
        frame = np.asarray(frame, dtype=float).reshape(len(points), 2, 3)
    index = np.arange(len(points))

    def block(idx: np.ndarray) -> PlaneFieldSample:
        return _evaluate_guarded(g, xi, points[idx], None if frame is None else frame[idx])

    sample = concatenate(map_chunks(block, index, jobs))
    if sample.errors:
        logger.warning("%d of %d points invalid", len(sample.errors), len(sample))
    return sample
