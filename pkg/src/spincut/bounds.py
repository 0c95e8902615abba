"""Lower bounds for Dirac eigenvalues and the Willmore integral.

All bounds are in units of 1/length except the Willmore bound, which bounds
``sqrt(W)`` and is dimensionless.  Negative values are returned as-is and
flagged vacuous by :class:`BoundReport`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

MAX_K = 10**7
K_FACTOR = 4 * (1 + math.sqrt(2)) / math.pi


def _check(area: float, delta: float | None = None) -> None:
    if not (area > 0 and math.isfinite(area)):
        raise ValueError(f"area must be positive and finite, got {area}")
    if delta is not None and not (delta > 0):
        raise ValueError(f"delta must be positive, got {delta}")


def sphere_bound(area: float) -> float:
    """``sqrt(4 pi / area)``: sharp bound on the 2-sphere."""
    _check(area)
    return math.sqrt(4 * math.pi / area)


def torus_bound(area: float, delta: float, k) -> float | np.ndarray:
    """``-2/(k delta) + sqrt(pi/(k area) + 2/(k delta)^2)``; vectorized in ``k``."""
    _check(area, delta)
    k_arr = np.asarray(k)
    if np.any(k_arr < 1) or not np.issubdtype(k_arr.dtype, np.integer):
        raise ValueError("k must be a positive integer")
    kd = k_arr * delta
    val = -2.0 / kd + np.sqrt(math.pi / (k_arr * area) + 2.0 / kd**2)
    return float(val) if np.ndim(val) == 0 else val


def candidate_k(area: float, delta: float) -> int:
    """``floor(4 (1 + sqrt 2) area / (pi delta^2))``."""
    _check(area, delta)
    return int(math.floor(K_FACTOR * area / delta**2))


def k_window(area: float, delta: float, max_k: int = MAX_K) -> np.ndarray:
    """Integers ``1 .. 2*candidate_k + 2``, capped at ``max_k``."""
    hi = min(2 * candidate_k(area, delta) + 2, max_k)
    return np.arange(1, hi + 1, dtype=np.int64)


def best_k(area: float, delta: float, max_k: int = MAX_K) -> tuple[int, float]:
    """Maximize the torus bound over the k-window; returns ``(k, bound)``."""
    ks = k_window(area, delta, max_k)
    vals = torus_bound(area, delta, ks)
    i = int(np.argmax(vals))
    return int(ks[i]), float(vals[i])


def genus_bound(g: int, area: float, delta: float) -> float:
    """``2 sqrt(pi) / ((2g+1) sqrt(area)) - 1/delta`` for genus ``g >= 1``.

    The same right-hand side bounds the fundamental tone on complete
    surfaces of finite area.
    """
    if int(g) != g or g < 1:
        raise ValueError(f"genus must be an integer >= 1, got {g}")
    _check(area, delta)
    return 2 * math.sqrt(math.pi) / ((2 * g + 1) * math.sqrt(area)) - 1.0 / delta


fundamental_tone_bound = genus_bound


def willmore_bound_k(area: float, delta: float, k) -> float | np.ndarray:
    """``sqrt(pi/k + 2 area/(k delta)^2) - 2 sqrt(area)/(k delta)``."""
    _check(area, delta)
    k_arr = np.asarray(k)
    kd = k_arr * delta
    val = np.sqrt(math.pi / k_arr + 2 * area / kd**2) - 2 * math.sqrt(area) / kd
    return float(val) if np.ndim(val) == 0 else val


def willmore_best_k(area: float, delta: float, max_k: int = MAX_K) -> tuple[int, float]:
    """``(k, bound)`` maximizing the Willmore bound over the k-window."""
    ks = k_window(area, delta, max_k)
    vals = willmore_bound_k(area, delta, ks)
    i = int(np.argmax(vals))
    return int(ks[i]), float(vals[i])


def willmore_bound(area: float, delta: float, max_k: int = MAX_K) -> float:
    """Lower bound on ``sqrt(W)`` for an embedded torus, best over the k-window.

    Equals ``sqrt(area) * best_k(area, delta)[1]``.
    """
    return willmore_best_k(area, delta, max_k)[1]


CLASSICAL_SQRT_W = math.sqrt(4 * math.pi)


@dataclass(frozen=True)
class BoundReport:
    theorem: str
    genus: int
    area: float
    delta: float | None
    k: int | None
    bound_value: float

    @property
    def vacuous(self) -> bool:
        return self.bound_value <= 0

    def as_dict(self) -> dict:
        return {
            "theorem": self.theorem,
            "genus": self.genus,
            "area": self.area,
            "delta": self.delta,
            "k": self.k,
            "bound_value": self.bound_value,
            "vacuous": self.vacuous,
        }


def report(theorem: str, g: int, area: float, delta: float | None = None) -> BoundReport:
    if theorem == "sphere":
        return BoundReport(theorem, 0, area, None, None, sphere_bound(area))
    if theorem == "torus":
        k, val = best_k(area, delta)
        return BoundReport(theorem, 1, area, delta, k, val)
    if theorem in ("genus", "fundamental_tone"):
        return BoundReport(theorem, g, area, delta, None, genus_bound(g, area, delta))
    if theorem == "willmore":
        k, val = willmore_best_k(area, delta)
        return BoundReport(theorem, 1, area, delta, k, val)
    raise ValueError(f"unknown theorem tag {theorem!r}")
