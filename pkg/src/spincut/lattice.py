"""Two-dimensional lattice helpers: reduction and certified point enumeration."""

from __future__ import annotations

import math

import numpy as np


def as_lattice(lattice) -> np.ndarray:
    """Validate a ``2 x 2`` basis (rows ``b1``, ``b2``) and return it as floats."""
    B = np.asarray(lattice, dtype=float)
    if B.shape != (2, 2):
        raise ValueError("lattice must be a 2x2 array with rows b1, b2")
    if not np.all(np.isfinite(B)):
        raise ValueError("lattice entries must be finite")
    det = B[0, 0] * B[1, 1] - B[0, 1] * B[1, 0]
    if abs(det) <= 1e-12 * max(1.0, float(np.abs(B).max()) ** 2):
        raise ValueError("degenerate lattice")
    return B


def area(lattice) -> float:
    B = as_lattice(lattice)
    return abs(float(B[0, 0] * B[1, 1] - B[0, 1] * B[1, 0]))


def dual_basis(lattice) -> np.ndarray:
    """Rows ``b_i*`` with ``<b_i, b_j*> = delta_ij``."""
    return np.linalg.inv(as_lattice(lattice)).T


def reduce(B: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Lagrange-Gauss reduction.

    Returns a reduced basis ``R`` (``|r1| <= |r2| <= |r2 - k r1|`` for all
    integers k) and the unimodular integer matrix ``U`` with ``R = U @ B``.
    """
    R = np.array(B, dtype=float)
    U = np.eye(2, dtype=np.int64)
    if R[0] @ R[0] > R[1] @ R[1]:
        R, U = R[::-1].copy(), U[::-1].copy()
    while True:
        mu = int(round(float(R[0] @ R[1]) / float(R[0] @ R[0])))
        R[1] -= mu * R[0]
        U[1] -= mu * U[0]
        if R[1] @ R[1] >= R[0] @ R[0]:
            return R, U
        R, U = R[::-1].copy(), U[::-1].copy()


def coset_points(lattice, radius: float, shift=(0.0, 0.0)) -> np.ndarray:
    """All coefficient pairs ``c in shift + Z^2`` with ``|c @ B| <= radius``.

    Enumeration runs in a reduced basis, where the coefficient along each
    reduced vector is ``<x, r_i*>`` and therefore bounded by
    ``radius * |r_i*|``.  Returned coefficients are in the original basis.
    """
    B = as_lattice(lattice)
    if not radius >= 0:
        raise ValueError("radius must be nonnegative")
    R, U = reduce(B)
    Uinv = np.rint(np.linalg.inv(U)).astype(np.int64)
    # x = c @ B = (c @ Uinv) @ R
    frac = np.asarray(shift, float) @ Uinv
    frac = frac - np.floor(frac)
    dual = np.linalg.inv(R).T
    axes = []
    for i in range(2):
        lim = radius * float(np.linalg.norm(dual[i])) + 1e-9
        lo, hi = math.ceil(-lim - frac[i]), math.floor(lim - frac[i])
        axes.append(np.arange(lo, hi + 1) + frac[i])
    A, C = np.meshgrid(*axes, indexing="ij")
    red = np.stack([A.ravel(), C.ravel()], axis=1)
    keep = np.linalg.norm(red @ R, axis=1) <= radius * (1 + 1e-12) + 1e-300
    return red[keep] @ U


def lattice_points(lattice, radius: float) -> np.ndarray:
    """Integer ``(m, n)`` with ``|m b1 + n b2| <= radius``."""
    return np.rint(coset_points(lattice, radius)).astype(np.int64)
