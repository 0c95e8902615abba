"""Spin structures on meshes, encoded by their quadratic forms.

Convention: ``q(a) = 1`` iff the spin structure is trivial along a simple
closed curve representing ``a``; ``q(a) = 0`` means nontrivial.  A spin-cut
is a family of ``g`` disjoint simple cycles with independent classes on
which ``q`` vanishes.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from itertools import combinations, permutations
from typing import Iterator, Sequence

import numpy as np

from . import gf2forms as gf2
from .fixtures import torus_of_revolution_mesh
from .surface import (
    Cycle,
    CycleError,
    HomologyBasis,
    Mesh,
    as_basis,
    cycles_in_class,
    genus,
    refine_cycle,
    subdivide,
)

log = logging.getLogger(__name__)

ENUMERATE_MAX_DIM = 16

ARF_MINUS_ONE = "arf_minus_one"
BUDGET_EXHAUSTED = "budget_exhausted"


class SpinCutNotFound(Exception):
    """No spin-cut was produced; ``reason`` is a stable code."""

    def __init__(self, reason: str, message: str = ""):
        super().__init__(message or reason)
        self.reason = reason


@dataclass(frozen=True)
class SearchBudget:
    """Knobs of the spin-cut search.

    ``k`` rerouted variants are tried for the first cycle of each target
    set, rerouting by multiplying already-used edges' lengths by
    ``penalty``.  ``refine`` extra 1-to-4 subdivisions are attempted when
    no vertex-disjoint family is found.  ``subdivision`` is the Steiner
    level used when measuring cut-diameters.
    """

    k: int = 3
    penalty: float = 8.0
    max_cuts: int = 16
    max_target_sets: int = 8
    refine: int = 1
    subdivision: int = 0
    seed: int = 0


@dataclass(frozen=True, eq=False)
class SpinStructure:
    mesh: Mesh
    basis: HomologyBasis
    q: gf2.QuadraticForm

    def __post_init__(self):
        if self.q.space != self.basis.space:
            raise ValueError("quadratic form is not defined on the basis' intersection form")

    @classmethod
    def from_values(cls, m: Mesh, q_values: Sequence[int], basis=None) -> "SpinStructure":
        hb = as_basis(m, basis)
        if len(q_values) != hb.dim:
            raise ValueError(f"need {hb.dim} q-values, got {len(q_values)}")
        if any(int(x) not in (0, 1) for x in q_values):
            raise ValueError("q-values must be bits")
        return cls(m, hb, gf2.QuadraticForm.from_bits(hb.space, [int(x) for x in q_values]))

    @classmethod
    def from_mesh_block(cls, m: Mesh, block: dict | None = None) -> "SpinStructure":
        """Spin structure from a mesh file's ``spin`` block."""
        block = m.spin if block is None else block
        if block is None or "q_values" not in block:
            raise ValueError("mesh carries no spin block with q_values")
        basis = None
        if block.get("basis_cycles"):
            basis = [Cycle(tuple(c)) for c in block["basis_cycles"]]
        return cls.from_values(m, block["q_values"], basis)

    @property
    def genus(self) -> int:
        return self.q.genus

    def q_of(self, c: Cycle) -> int:
        return gf2.eval_q(self.q, self.basis.classify(c))

    def in_basis(self, cycles: Sequence[Cycle]) -> "SpinStructure":
        """The same spin structure with q-values moved to another basis."""
        hb = as_basis(self.mesh, list(cycles))
        values = [self.q_of(c) for c in hb.cycles]
        return SpinStructure(self.mesh, hb, gf2.QuadraticForm.from_bits(hb.space, values))

    def refined(self) -> "SpinStructure":
        """Transport to ``subdivide(mesh)``."""
        fine = subdivide(self.mesh)
        cycles = [refine_cycle(self.mesh, c) for c in self.basis.cycles]
        return SpinStructure.from_values(fine, self.q.bits(), cycles)


def is_nontrivial_along(s: SpinStructure, c: Cycle) -> bool:
    if not c.simple:
        raise CycleError("spin triviality is only defined along simple cycles")
    return s.q_of(c) == 0


def arf(s: SpinStructure) -> int:
    return gf2.arf_fast(s.q)


def enumerate_spin_structures(m: Mesh, basis=None) -> list[SpinStructure]:
    hb = as_basis(m, basis)
    if hb.dim > ENUMERATE_MAX_DIM:
        raise ValueError(f"refusing to enumerate 2^{hb.dim} spin structures")
    return [SpinStructure(m, hb, q) for q in gf2.all_forms(hb.space)]


@dataclass(frozen=True, eq=False)
class SpinCut:
    """``g`` disjoint simple cycles, independent over Z_2, all with q = 0."""

    spin: SpinStructure
    cycles: tuple[Cycle, ...]
    classes: tuple[int, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "cycles", tuple(self.cycles))
        if not self.classes:
            object.__setattr__(self, "classes", tuple(self.spin.basis.classify(c) for c in self.cycles))

    @property
    def mesh(self) -> Mesh:
        return self.spin.mesh

    def certificate(self) -> dict[str, bool]:
        s = self.spin
        g = genus(s.mesh)
        recomputed = tuple(s.basis.classify(c) for c in self.cycles)
        vsets = [set(c.vertices) for c in self.cycles]
        return {
            "count": len(self.cycles) == g,
            "simple": all(c.simple for c in self.cycles),
            "classes": recomputed == self.classes,
            "disjoint": all(not (a & b) for a, b in combinations(vsets, 2)),
            "independent": gf2.rank(list(recomputed)) == len(recomputed),
            "isotropic": all(s.basis.space.omega(a, b) == 0 for a, b in combinations(recomputed, 2)),
            "nontrivial": all(gf2.eval_q(s.q, a) == 0 for a in recomputed),
        }

    def is_valid(self) -> bool:
        return all(self.certificate().values())


def target_sets(q: gf2.QuadraticForm, limit: int) -> list[tuple[int, ...]]:
    """Candidate class families for a spin-cut, constructed one first.

    Further families (independent, isotropic, q-null ``g``-sets) are
    enumerated in lexicographic order when the space is small.
    """
    first = gf2.lagrangian_zero_basis(q)
    if first is None:
        return []
    out = [tuple(first)]
    if q.dim > 8 or limit <= 1:
        return out[:limit]
    seen = {frozenset(first)}
    zeros = [v for v in range(1, 1 << q.dim) if gf2.eval_q(q, v) == 0]

    def extend(chosen: list[int], start: int):
        if len(out) >= limit:
            return
        if len(chosen) == q.genus:
            key = frozenset(chosen)
            if key not in seen:
                seen.add(key)
                out.append(tuple(chosen))
            return
        for idx in range(start, len(zeros)):
            v = zeros[idx]
            if all(q.space.omega(v, w) == 0 for w in chosen) and gf2.rank(chosen + [v]) == len(chosen) + 1:
                extend(chosen + [v], idx + 1)

    extend([], 0)
    return out


def _simple_in_class(m: Mesh, cls: int, basis, weights=None, blocked=()) -> Cycle | None:
    try:
        found = cycles_in_class(m, cls, basis, weights=weights, blocked=blocked)
    except CycleError:
        return None
    for _, c in found:
        if c.simple:
            return c
    return None


def iter_spin_cuts(m: Mesh, s: SpinStructure, budget: SearchBudget = SearchBudget()) -> Iterator[SpinCut]:
    """Yield distinct verified spin-cuts within ``budget``.

    For every target family and every ordering of it, the first cycle is
    taken from ``k`` penalty-rerouted variants and the remaining ones are
    the shortest simple cycles avoiding all vertices already used.
    """
    if s.mesh is not m:
        raise ValueError("spin structure belongs to a different mesh")
    if gf2.arf_fast(s.q) == -1:
        return
    g = genus(m)
    if g == 0:
        yield SpinCut(s, ())
        return
    emitted = 0
    seen: set[frozenset] = set()
    for family in target_sets(s.q, budget.max_target_sets):
        for order in list(permutations(range(g)))[:6]:
            weights = m.lengths.copy()
            for _ in range(budget.k):
                first = _simple_in_class(m, family[order[0]], s.basis, weights=weights)
                if first is None:
                    break
                weights[first.edge_ids(m)] *= budget.penalty
                chosen = {order[0]: first}
                blocked = set(first.vertices)
                for idx in order[1:]:
                    c = _simple_in_class(m, family[idx], s.basis, blocked=sorted(blocked))
                    if c is None:
                        break
                    chosen[idx] = c
                    blocked |= set(c.vertices)
                if len(chosen) < g:
                    continue
                cycles = tuple(chosen[i] for i in range(g))
                key = frozenset(frozenset(c.vertices) for c in cycles)
                if key in seen:
                    continue
                seen.add(key)
                cut = SpinCut(s, cycles)
                if not cut.is_valid():
                    log.warning("discarding candidate failing its certificate: %s", cut.certificate())
                    continue
                yield cut
                emitted += 1
                if emitted >= budget.max_cuts:
                    return


def find_spin_cut(m: Mesh, s: SpinStructure, budget: SearchBudget = SearchBudget()) -> SpinCut:
    """First spin-cut found, refining the mesh up to ``budget.refine`` times.

    Raises :class:`SpinCutNotFound` with reason ``arf_minus_one`` (no
    spin-cut exists) or ``budget_exhausted`` (one exists but was not found).
    """
    if gf2.arf_fast(s.q) == -1:
        raise SpinCutNotFound(ARF_MINUS_ONE, "Arf invariant is -1: no spin-cut exists")
    mesh, spin = m, s
    for attempt in range(budget.refine + 1):
        for cut in iter_spin_cuts(mesh, spin, budget):
            return cut
        if attempt < budget.refine:
            spin = spin.refined()
            mesh = spin.mesh
    raise SpinCutNotFound(BUDGET_EXHAUSTED, "search budget exhausted before a spin-cut was found")


def torus_of_revolution(R: float, r: float, nu: int = 64, nv: int = 64) -> tuple[Mesh, SpinStructure]:
    """Embedded torus of revolution with its induced spin structure.

    The inner equator and a meridian both bound disks meeting the torus
    transversally, so the induced structure is nontrivial along both:
    ``q = (0, 0)`` on these generators.
    """
    if not (np.isfinite(R) and np.isfinite(r)) or not (r > 0 and R > r):
        raise ValueError(f"need R > r > 0, got R={R}, r={r}")
    if nu < 3 or nv < 3:
        raise ValueError("need nu, nv >= 3")
    m, basis = torus_of_revolution_mesh(R, r, nu, nv)
    return m, SpinStructure.from_values(m, (0, 0), basis)
