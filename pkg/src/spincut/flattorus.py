"""Exact Dirac spectra of flat 2-tori.

For ``T = R^2 / L`` with spin structure encoded by twist bits ``eps``,
the eigenspinors are plane waves ``exp(2 pi i <xi, x>)`` with ``xi`` in
the shifted dual lattice ``L* + (eps1/2) b1* + (eps2/2) b2*``; each such
``xi`` contributes the pair of eigenvalues ``+-2 pi |xi|``.  The twist bit
is 1 exactly when the structure is nontrivial along that generator, so
``q_i = 1 - eps_i``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import gf2forms as gf2
from . import lattice as lat
from .bounds import best_k, k_window, candidate_k, torus_bound
from .cutmetrics import delta_flat_torus, torus_q

TWO_PI = 2 * math.pi


@dataclass(frozen=True)
class FlatTorus:
    """Flat torus with lattice rows ``b1, b2`` and q-values ``q = 1 - eps``."""

    b1: tuple[float, float]
    b2: tuple[float, float]
    q: tuple[int, int]

    def __post_init__(self):
        object.__setattr__(self, "b1", tuple(float(x) for x in self.b1))
        object.__setattr__(self, "b2", tuple(float(x) for x in self.b2))
        object.__setattr__(self, "q", tuple(int(x) for x in self.q))
        if any(x not in (0, 1) for x in self.q) or len(self.q) != 2:
            raise ValueError("q must be a pair of bits")
        lat.as_lattice(self.basis)

    @classmethod
    def from_eps(cls, b1, b2, eps) -> "FlatTorus":
        e1, e2 = (int(x) for x in eps)
        if e1 not in (0, 1) or e2 not in (0, 1):
            raise ValueError("eps must be a pair of bits")
        return cls(b1, b2, (1 - e1, 1 - e2))

    @property
    def eps(self) -> tuple[int, int]:
        return (1 - self.q[0], 1 - self.q[1])

    @property
    def basis(self) -> np.ndarray:
        return np.array([self.b1, self.b2])

    @property
    def area(self) -> float:
        return lat.area(self.basis)

    @property
    def dual_basis(self) -> np.ndarray:
        return lat.dual_basis(self.basis)

    @property
    def form(self) -> gf2.QuadraticForm:
        return torus_q(self.q)

    @property
    def arf(self) -> int:
        return gf2.arf_fast(self.form)

    @property
    def is_trivial(self) -> bool:
        return self.arf == -1

    def scaled(self, t: float) -> "FlatTorus":
        return FlatTorus(tuple(t * np.asarray(self.b1)), tuple(t * np.asarray(self.b2)), self.q)

    def rebased(self, U) -> "FlatTorus":
        """Same torus and spin structure in the basis ``U @ (b1, b2)``.

        The q-values are transported through the quadratic form, so the
        spectrum is unchanged.
        """
        U = np.asarray(U, dtype=np.int64)
        if U.shape != (2, 2) or abs(round(np.linalg.det(U))) != 1:
            raise ValueError("U must be a unimodular integer matrix")
        B = U @ self.basis
        qf = self.form
        vals = [gf2.eval_q(qf, gf2.pack((int(r[0]) % 2, int(r[1]) % 2))) for r in U]
        return FlatTorus(tuple(B[0]), tuple(B[1]), tuple(vals))


@dataclass(frozen=True)
class SpectrumSlice:
    """All ``|lambda| <= cutoff`` sorted ascending, each listed with multiplicity."""

    values: np.ndarray
    cutoff: float
    frequencies: np.ndarray

    def __len__(self) -> int:
        return len(self.values)


def shift(t: FlatTorus) -> np.ndarray:
    """Shift of the dual lattice, in dual-basis coefficients."""
    return np.array(t.eps, dtype=float) / 2


def dirac_spectrum(t: FlatTorus, cutoff: float) -> SpectrumSlice:
    """Eigenvalue magnitudes up to ``cutoff``, complete and with multiplicities."""
    if not (cutoff > 0 and math.isfinite(cutoff)):
        raise ValueError("cutoff must be positive and finite")
    D = t.dual_basis
    coeffs = lat.coset_points(D, cutoff / TWO_PI, shift(t))
    xi = coeffs @ D
    mags = TWO_PI * np.linalg.norm(xi, axis=1)
    order = np.lexsort((coeffs[:, 1], coeffs[:, 0], mags))
    mags, xi = mags[order], xi[order]
    return SpectrumSlice(np.repeat(mags, 2), float(cutoff), xi)


def min_abs_eigenvalue(t: FlatTorus) -> float:
    """``2 pi`` times the distance from 0 to the shifted dual lattice."""
    D = t.dual_basis
    # the shift itself lies in the coset, so its norm certifies the radius
    radius = float(np.linalg.norm(shift(t) @ D))
    coeffs = lat.coset_points(D, radius * (1 + 1e-12), shift(t))
    return float(TWO_PI * np.linalg.norm(coeffs @ D, axis=1).min())


def convention_check(lattices=None) -> dict[str, bool]:
    """Trivial structure has harmonic spinors; the other three have a gap."""
    if lattices is None:
        lattices = [((1, 0), (0, 1)), ((1, 0), (0.5, math.sqrt(3) / 2)), ((2, 0), (0.3, 0.7))]
    harmonic, gap, arf = True, True, True
    for b1, b2 in lattices:
        for eps in ((0, 0), (1, 0), (0, 1), (1, 1)):
            t = FlatTorus.from_eps(b1, b2, eps)
            lam = min_abs_eigenvalue(t)
            if eps == (0, 0):
                harmonic &= lam == 0.0
                arf &= t.arf == -1
            else:
                gap &= lam > 0
                arf &= t.arf == 1
    return {"trivial_has_harmonic_spinors": harmonic, "nontrivial_have_gap": gap, "arf_matches": arf}


@dataclass(frozen=True)
class TorusVerification:
    eigenvalue: float
    delta: float
    area: float
    candidate_k: int
    best_k: int
    best_bound: float
    ks: np.ndarray
    margins: np.ndarray

    @property
    def min_margin(self) -> float:
        return float(self.margins.min())

    @property
    def passed(self) -> bool:
        return bool(np.all(self.margins >= -1e-9))

    def as_dict(self) -> dict:
        return {
            "eigenvalue": self.eigenvalue,
            "delta": self.delta,
            "area": self.area,
            "candidate_k": self.candidate_k,
            "best_k": self.best_k,
            "best_bound": self.best_bound,
            "margin_at_best_k": self.eigenvalue - self.best_bound,
            "min_margin": self.min_margin,
            "window": [int(self.ks[0]), int(self.ks[-1])],
            "passed": self.passed,
        }


def verify_torus_theorem(t: FlatTorus) -> TorusVerification:
    """Check ``min |lambda| >= torus_bound(area, delta, k)`` for every k in the window."""
    if t.is_trivial:
        raise ValueError("the trivial spin structure admits no spin-cut")
    A = t.area
    delta = delta_flat_torus(t.basis, t.q)
    lam = min_abs_eigenvalue(t)
    ks = k_window(A, delta)
    margins = lam - torus_bound(A, delta, ks)
    k, b = best_k(A, delta)
    return TorusVerification(lam, delta, A, max(candidate_k(A, delta), 1), k, b, ks, margins)
