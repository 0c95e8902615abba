"""Symplectic spaces and quadratic forms over GF(2).

Vectors are packed into Python ints: bit ``i`` is the coefficient of the
``i``-th ambient basis vector.  A :class:`SymplecticSpace` stores the Gram
matrix of the pairing row by row as bit masks, so ``omega(a, b)`` is a
couple of ANDs and a popcount.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

ARF_NAIVE_MAX_DIM = 24


class FormError(ValueError):
    """Invalid symplectic space, quadratic form or vector."""


def parity(x: int) -> int:
    return x.bit_count() & 1


def pack(bits: Iterable[int]) -> int:
    """Pack coefficients (read mod 2) into an int; the first entry is bit 0."""
    v = 0
    for i, b in enumerate(bits):
        if int(b) & 1:
            v |= 1 << i
    return v


def unpack(v: int, dim: int) -> tuple[int, ...]:
    return tuple((v >> i) & 1 for i in range(dim))


def rank(vectors: Sequence[int]) -> int:
    """GF(2) rank of a list of packed vectors."""
    pivots: dict[int, int] = {}
    r = 0
    for v in vectors:
        while v:
            top = v.bit_length() - 1
            if top in pivots:
                v ^= pivots[top]
            else:
                pivots[top] = v
                r += 1
                break
    return r


def solve(rows: Sequence[int], rhs: Sequence[int], ncols: int) -> int | None:
    """Solve ``parity(rows[i] & x) == rhs[i]`` for all ``i``.

    Free variables are set to zero, so the answer is deterministic.
    Returns ``None`` if the system is inconsistent.
    """
    aug = [(r, b & 1) for r, b in zip(rows, rhs)]
    pivot_rows: list[tuple[int, int, int]] = []  # (col, row, rhs)
    for col in range(ncols):
        bit = 1 << col
        idx = next((i for i, (r, _) in enumerate(aug) if r & bit), None)
        if idx is None:
            continue
        pr, pb = aug.pop(idx)
        aug = [(r ^ pr, b ^ pb) if r & bit else (r, b) for r, b in aug]
        pivot_rows = [(c, r ^ pr, b ^ pb) if r & bit else (c, r, b) for c, r, b in pivot_rows]
        pivot_rows.append((col, pr, pb))
    if any(b for r, b in aug):
        return None
    x = 0
    for col, _, b in pivot_rows:
        if b:
            x |= 1 << col
    return x


def invert(matrix_rows: Sequence[int], n: int) -> list[int]:
    """Inverse of an ``n x n`` GF(2) matrix given as packed rows."""
    rows = [(r, 1 << i) for i, r in enumerate(matrix_rows)]
    for col in range(n):
        bit = 1 << col
        piv = next((i for i in range(col, n) if rows[i][0] & bit), None)
        if piv is None:
            raise FormError("matrix is singular over GF(2)")
        rows[col], rows[piv] = rows[piv], rows[col]
        pr, pi = rows[col]
        for i in range(n):
            if i != col and rows[i][0] & bit:
                rows[i] = (rows[i][0] ^ pr, rows[i][1] ^ pi)
    return [inv for _, inv in rows]


def mat_vec(matrix_rows: Sequence[int], v: int) -> int:
    out = 0
    for i, r in enumerate(matrix_rows):
        if parity(r & v):
            out |= 1 << i
    return out


@dataclass(frozen=True)
class SymplecticSpace:
    """``(Z_2)^dim`` with a nondegenerate alternating pairing."""

    dim: int
    gram: tuple[int, ...]

    def __post_init__(self):
        if self.dim < 0 or self.dim % 2:
            raise FormError(f"dimension must be even, got {self.dim}")
        if len(self.gram) != self.dim:
            raise FormError("gram matrix has wrong number of rows")
        for i, row in enumerate(self.gram):
            if row >> self.dim:
                raise FormError(f"gram row {i} has bits beyond dimension")
            if (row >> i) & 1:
                raise FormError(f"omega(b{i}, b{i}) != 0")
            for j in range(self.dim):
                if ((row >> j) & 1) != ((self.gram[j] >> i) & 1):
                    raise FormError(f"gram matrix not symmetric at ({i}, {j})")
        if rank(self.gram) != self.dim:
            raise FormError("pairing is degenerate")

    @classmethod
    def standard(cls, g: int) -> "SymplecticSpace":
        """Basis ordered ``e1, f1, ..., eg, fg`` with ``omega(e_i, f_i) = 1``."""
        gram = []
        for i in range(2 * g):
            gram.append(1 << (i ^ 1))
        return cls(2 * g, tuple(gram))

    @classmethod
    def from_matrix(cls, matrix) -> "SymplecticSpace":
        m = np.asarray(matrix, dtype=np.int64) % 2
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise FormError("gram matrix must be square")
        return cls(m.shape[0], tuple(pack(row) for row in m))

    @property
    def genus(self) -> int:
        return self.dim // 2

    def matrix(self) -> np.ndarray:
        return np.array([unpack(r, self.dim) for r in self.gram], dtype=np.uint8).reshape(self.dim, self.dim)

    def check(self, v: int) -> int:
        if v < 0 or v >> self.dim:
            raise FormError(f"vector {v:#b} does not lie in a space of dimension {self.dim}")
        return v

    def omega(self, a: int, b: int) -> int:
        self.check(a)
        self.check(b)
        return parity(mat_vec(self.gram, a) & b)

    def direct_sum(self, other: "SymplecticSpace") -> "SymplecticSpace":
        gram = self.gram + tuple(r << self.dim for r in other.gram)
        return SymplecticSpace(self.dim + other.dim, gram)

    def symplectic_basis(self) -> list[tuple[int, int]]:
        """Hyperbolic pairs ``(e_i, f_i)`` in ambient coordinates.

        Greedy extraction: take the first remaining vector, pair it with the
        first partner it pairs to 1 with, then project both out of the rest.
        """
        remaining = [1 << i for i in range(self.dim)]
        pairs = []
        while remaining:
            a = remaining.pop(0)
            j = next((j for j, b in enumerate(remaining) if self.omega(a, b)), None)
            if j is None:
                raise FormError("pairing is degenerate")
            b = remaining.pop(j)
            projected = []
            for v in remaining:
                v ^= self.omega(v, b) * a ^ self.omega(v, a) * b
                projected.append(v)
            remaining = projected
            pairs.append((a, b))
        return pairs


@dataclass(frozen=True)
class QuadraticForm:
    """A ``Z_2``-valued quadratic refinement of ``space.omega``.

    ``values`` packs ``q(b_i)`` on the ambient basis; every other value is
    forced by ``q(a + b) = q(a) + q(b) + omega(a, b)``.
    """

    space: SymplecticSpace
    values: int

    def __post_init__(self):
        if self.values < 0 or self.values >> self.space.dim:
            raise FormError("basis values exceed the dimension")

    @classmethod
    def from_bits(cls, space: SymplecticSpace, bits: Sequence[int]) -> "QuadraticForm":
        if len(bits) != space.dim:
            raise FormError(f"expected {space.dim} basis values, got {len(bits)}")
        return cls(space, pack(bits))

    @classmethod
    def standard(cls, bits: Sequence[int]) -> "QuadraticForm":
        """Form on the standard space with values listed as ``e1, f1, e2, f2, ...``."""
        return cls.from_bits(SymplecticSpace.standard(len(bits) // 2), bits)

    @property
    def dim(self) -> int:
        return self.space.dim

    @property
    def genus(self) -> int:
        return self.space.genus

    def bits(self) -> tuple[int, ...]:
        return unpack(self.values, self.dim)

    def __call__(self, v: int) -> int:
        return eval_q(self, v)

    def add_linear(self, functional: int) -> "QuadraticForm":
        """``q + l`` where ``l(b_i)`` is bit ``i`` of ``functional``."""
        return QuadraticForm(self.space, self.values ^ self.space.check(functional))

    def in_basis(self, vectors: Sequence[int]) -> "QuadraticForm":
        """The same form expressed on a new basis given in ambient coordinates."""
        if rank(vectors) != self.dim or len(vectors) != self.dim:
            raise FormError("new basis is not a basis")
        gram = tuple(pack(self.space.omega(a, b) for b in vectors) for a in vectors)
        return QuadraticForm(SymplecticSpace(self.dim, gram), pack(eval_q(self, v) for v in vectors))


def eval_q(q: QuadraticForm, v: int) -> int:
    """Evaluate ``q`` at a packed vector by polarization from the basis values."""
    q.space.check(v)
    total = parity(v & q.values)
    rest = v
    while rest:
        i = rest.bit_length() - 1
        rest ^= 1 << i
        total ^= parity(q.space.gram[i] & rest)
    return total


def _all_values(q: QuadraticForm) -> np.ndarray:
    """``q`` on every vector of the space, indexed by the packed vector."""
    vals = np.zeros(1, dtype=np.uint8)
    idx = np.zeros(1, dtype=np.int64)
    for k in range(q.dim):
        low = q.space.gram[k] & ((1 << k) - 1)
        # omega(v, b_k) for the 2^k vectors spanned by the first k basis vectors
        w = idx & low
        par = np.zeros_like(w)
        while np.any(w):
            par ^= w & 1
            w >>= 1
        upper = vals ^ ((q.values >> k) & 1) ^ par.astype(np.uint8)
        vals = np.concatenate([vals, upper])
        idx = np.concatenate([idx, idx | (1 << k)])
    return vals


def arf_naive(q: QuadraticForm) -> int:
    """Arf invariant as the normalized character sum over the whole space."""
    if q.dim > ARF_NAIVE_MAX_DIM:
        raise FormError(f"arf_naive refuses dimension {q.dim} > {ARF_NAIVE_MAX_DIM}")
    vals = _all_values(q)
    total = int(vals.size) - 2 * int(np.count_nonzero(vals))
    scale = 1 << q.genus
    if total not in (scale, -scale):
        raise AssertionError(f"character sum {total} is not +-{scale}")
    return total // scale


def arf_fast(q: QuadraticForm) -> int:
    """Arf invariant from a symplectic basis: ``(-1)^#{i : q(e_i)=q(f_i)=1}``."""
    count = 0
    for e, f in q.space.symplectic_basis():
        count += eval_q(q, e) & eval_q(q, f)
    return -1 if count % 2 else 1


arf = arf_fast


def direct_sum(q1: QuadraticForm, q2: QuadraticForm) -> QuadraticForm:
    return QuadraticForm(q1.space.direct_sum(q2.space), q1.values | (q2.values << q1.dim))


def lagrangian_zero_basis(q: QuadraticForm) -> list[int] | None:
    """``g`` independent, pairwise orthogonal vectors on which ``q`` vanishes.

    Returns ``None`` exactly when the Arf invariant is -1.
    """
    planes = []
    odd = []
    for i, (e, f) in enumerate(q.space.symplectic_basis()):
        zeros = [v for v in (e, f, e ^ f) if eval_q(q, v) == 0]
        if not zeros:
            odd.append(i)
            planes.append((e, f))
        else:
            planes.append((zeros[0], zeros[1]))
    if len(odd) % 2:
        return None
    out = [e for e, _ in planes]
    for a, b in zip(odd[0::2], odd[1::2]):
        ea, fa = planes[a]
        eb, fb = planes[b]
        out[a] = ea ^ fb
        out[b] = eb ^ fa
    return out


def check_isotropic_zero(q: QuadraticForm, vectors: Sequence[int]) -> None:
    """Raise unless ``vectors`` are independent, pairwise orthogonal and q-null."""
    for i, v in enumerate(vectors):
        if eval_q(q, v):
            raise FormError(f"q(v{i}) = 1")
    for i, j in combinations(range(len(vectors)), 2):
        if q.space.omega(vectors[i], vectors[j]):
            raise FormError(f"omega(v{i}, v{j}) = 1")
    if rank(vectors) != len(vectors):
        raise FormError("vectors are linearly dependent")


def complete_to_symplectic(q: QuadraticForm, es: Sequence[int]) -> list[int]:
    """Extend a q-null isotropic ``e_1..e_g`` to ``e_1, f_1, ..., e_g, f_g``.

    The result is a symplectic basis on which ``q`` vanishes identically.
    """
    g = q.genus
    if len(es) != g:
        raise FormError(f"need {g} vectors, got {len(es)}")
    check_isotropic_zero(q, es)
    rows = [mat_vec(q.space.gram, e) for e in es]
    fs: list[int] = []
    for i in range(g):
        f = solve(rows, [int(j == i) for j in range(g)], q.dim)
        if f is None:
            raise FormError(f"no dual vector for e{i}")
        for j, fj in enumerate(fs):
            if q.space.omega(f, fj):
                f ^= es[j]
        fs.append(f)
    out = []
    for e, f in zip(es, fs):
        if eval_q(q, f):
            f ^= e
        out.extend((e, f))
    return out


def is_symplectic_zero_basis(q: QuadraticForm, basis: Sequence[int]) -> bool:
    """True iff ``basis`` (ordered e1, f1, ...) is symplectic with q = 0 on it."""
    if len(basis) != q.dim or rank(basis) != q.dim:
        return False
    for i, a in enumerate(basis):
        if eval_q(q, a):
            return False
        for j, b in enumerate(basis):
            expected = int(i // 2 == j // 2 and i != j)
            if q.space.omega(a, b) != expected:
                return False
    return True


def all_forms(space: SymplecticSpace):
    """Every quadratic refinement of ``space`` (there are ``2^dim``)."""
    for values in range(1 << space.dim):
        yield QuadraticForm(space, values)


def random_space(g: int, rng: np.random.Generator) -> SymplecticSpace:
    """Standard pairing written in a random ambient basis."""
    std = SymplecticSpace.standard(g)
    while True:
        change = [int(x) for x in rng.integers(0, 1 << (2 * g), size=2 * g)]
        if rank(change) == 2 * g:
            break
    gram = tuple(pack(std.omega(a, b) for b in change) for a in change)
    return SymplecticSpace(2 * g, gram)


def random_form(g: int, rng: np.random.Generator) -> QuadraticForm:
    space = random_space(g, rng)
    return QuadraticForm(space, int(rng.integers(0, 1 << (2 * g))))
