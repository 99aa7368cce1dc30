from __future__ import annotations

import numpy as np

from services.geometry.fields import OneFormField

# Levi-Civita symbol, oriented by the chart's coordinate order
EPSILON = np.zeros((3, 3, 3))
for _i, _j, _k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
    EPSILON[_i, _j, _k] = 1.0
    EPSILON[_i, _k, _j] = -1.0


def exterior_derivative(dA: np.ndarray) -> np.ndarray:
    """(d alpha)_ij = d_i alpha_j - d_j alpha_i from partials dA[..., a, k] = d_k alpha_a."""
    return np.swapaxes(dA, -1, -2) - dA


def d_oneform(alpha: OneFormField, p) -> np.ndarray:
    _, dA = alpha.jets(np.asarray(p, dtype=float))
    return exterior_derivative(dA)


def wedge3(alpha, omega) -> np.ndarray | float:
    """
    Coefficient of dx1^dx2^dx3 in alpha ^ omega, normalized so that
    wedge3(dx1, dx2^dx3) = 1. Accepts single values or batches.
    """
    alpha = np.asarray(alpha, dtype=float)
    omega = np.asarray(omega, dtype=float)
    value = 0.5 * np.einsum("ijk,...i,...jk->...", EPSILON, alpha, omega)
    return float(value) if np.ndim(value) == 0 else value


def two_form(pairs) -> np.ndarray:
    """Antisymmetric matrix from {(i, j): coefficient} with i != j."""
    omega = np.zeros((3, 3))
    for (i, j), c in pairs.items():
        omega[i, j] += c
        omega[j, i] -= c
    return omega
