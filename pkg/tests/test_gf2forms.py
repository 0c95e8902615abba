import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spincut import gf2forms as gf2


def q_by_matrix(q, v):
    """Oracle: q(v) = sum v_i q_i + sum_{i<j} v_i v_j omega_ij over the integers, mod 2."""
    x = np.array(gf2.unpack(v, q.dim), dtype=np.int64)
    qi = np.array(q.bits(), dtype=np.int64)
    G = q.space.matrix().astype(np.int64)
    return int((x @ qi + x @ np.triu(G, 1) @ x) % 2)


def forms_of_genus(g):
    return list(gf2.all_forms(gf2.SymplecticSpace.standard(g)))


@st.composite
def random_forms(draw, max_genus=5):
    g = draw(st.integers(1, max_genus))
    seed = draw(st.integers(0, 2**32 - 1))
    return gf2.random_form(g, np.random.default_rng(seed))


# --- bit vectors and linear algebra -------------------------------------


@given(st.lists(st.integers(0, 1), min_size=1, max_size=40))
def test_pack_unpack_roundtrip(bits):
    assert list(gf2.unpack(gf2.pack(bits), len(bits))) == bits


def test_pack_reduces_mod_two():
    assert gf2.pack([3, 2, 1]) == 0b101


@given(st.integers(1, 10), st.integers(0, 2**32 - 1))
def test_rank_matches_numpy_elimination(n, seed):
    rng = np.random.default_rng(seed)
    rows = [int(x) for x in rng.integers(0, 1 << n, size=n)]
    M = np.array([gf2.unpack(r, n) for r in rows], dtype=np.uint8)
    # independent elimination on a dense uint8 matrix
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, n) if M[i, c]), None)
        if piv is None:
            continue
        M[[r, piv]] = M[[piv, r]]
        for i in range(n):
            if i != r and M[i, c]:
                M[i] ^= M[r]
        r += 1
    assert gf2.rank(rows) == r


@given(st.integers(1, 10), st.integers(0, 2**32 - 1))
def test_invert_and_solve(n, seed):
    rng = np.random.default_rng(seed)
    while True:
        rows = [int(x) for x in rng.integers(0, 1 << n, size=n)]
        if gf2.rank(rows) == n:
            break
    inv = gf2.invert(rows, n)
    for j in range(n):
        col = gf2.mat_vec(rows, inv_col(inv, j, n))
        assert col == 1 << j
    rhs = [int(x) for x in rng.integers(0, 2, size=n)]
    x = gf2.solve(rows, rhs, n)
    assert gf2.mat_vec(rows, x) == gf2.pack(rhs)


def inv_col(inv_rows, j, n):
    return gf2.pack([(inv_rows[i] >> j) & 1 for i in range(n)])


def test_solve_inconsistent_returns_none():
    assert gf2.solve([0b11, 0b11], [0, 1], 2) is None


# --- spaces ----------------------------------------------------------------


def test_standard_space_pairs():
    s = gf2.SymplecticSpace.standard(2)
    assert s.omega(0b0001, 0b0010) == 1
    assert s.omega(0b0001, 0b0100) == 0
    assert s.genus == 2


@pytest.mark.parametrize(
    "matrix",
    [
        [[1, 1], [1, 0]],  # nonzero diagonal
        [[0, 1], [0, 0]],  # not symmetric
        [[0, 0], [0, 0]],  # degenerate
        [[0]],  # odd dimension
    ],
)
def test_space_validation(matrix):
    with pytest.raises(gf2.FormError):
        gf2.SymplecticSpace.from_matrix(matrix)


@given(st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_symplectic_basis_is_symplectic(g, seed):
    s = gf2.random_space(g, np.random.default_rng(seed))
    pairs = s.symplectic_basis()
    flat = [v for p in pairs for v in p]
    assert gf2.rank(flat) == 2 * g
    for i, a in enumerate(flat):
        for j, b in enumerate(flat):
            assert s.omega(a, b) == int(i // 2 == j // 2 and i != j)


# --- quadratic forms -----------------------------------------------------


@given(random_forms(), st.data())
def test_eval_matches_matrix_oracle(q, data):
    v = data.draw(st.integers(0, (1 << q.dim) - 1))
    assert gf2.eval_q(q, v) == q_by_matrix(q, v)


@given(random_forms(), st.data())
def test_refinement_identity(q, data):
    a = data.draw(st.integers(0, (1 << q.dim) - 1))
    b = data.draw(st.integers(0, (1 << q.dim) - 1))
    assert q(a ^ b) == q(a) ^ q(b) ^ q.space.omega(a, b)


def test_eval_rejects_out_of_range():
    q = gf2.QuadraticForm.standard([0, 0])
    with pytest.raises(gf2.FormError):
        q(0b100)


# --- Arf invariant -------------------------------------------------------


def test_genus_one_arf_multiset():
    arfs = sorted(gf2.arf_fast(q) for q in forms_of_genus(1))
    assert arfs == [-1, 1, 1, 1]
    (odd,) = [q for q in forms_of_genus(1) if gf2.arf_fast(q) == -1]
    assert odd.bits() == (1, 1)


@pytest.mark.parametrize("g", [1, 2, 3, 4])
def test_count_of_even_forms(g):
    # 2^(g-1) (2^g + 1) refinements have Arf +1
    forms = forms_of_genus(g)
    plus = sum(gf2.arf_fast(q) == 1 for q in forms)
    assert plus == 2 ** (g - 1) * (2**g + 1)
    assert all(gf2.arf_fast(q) == gf2.arf_naive(q) for q in forms)


@settings(max_examples=200)
@given(random_forms(max_genus=6))
def test_fast_equals_naive(q):
    assert gf2.arf_fast(q) == gf2.arf_naive(q)


@given(random_forms(max_genus=4), st.integers(0, 2**32 - 1))
def test_arf_basis_independent(q, seed):
    rng = np.random.default_rng(seed)
    while True:
        vecs = [int(x) for x in rng.integers(0, 1 << q.dim, size=q.dim)]
        if gf2.rank(vecs) == q.dim:
            break
    assert gf2.arf_fast(q.in_basis(vecs)) == gf2.arf_fast(q)


@given(random_forms(max_genus=4), st.data())
def test_linear_shift_changes_arf_by_q_of_dual(q, data):
    c = data.draw(st.integers(0, (1 << q.dim) - 1))
    functional = gf2.pack([q.space.omega(c, 1 << i) for i in range(q.dim)])
    shifted = q.add_linear(functional)
    assert gf2.arf_fast(shifted) == gf2.arf_fast(q) * (-1) ** q(c)


@given(random_forms(max_genus=3), random_forms(max_genus=3))
def test_arf_multiplicative(q1, q2):
    assert gf2.arf_fast(gf2.direct_sum(q1, q2)) == gf2.arf_fast(q1) * gf2.arf_fast(q2)


def test_naive_guard():
    q = gf2.QuadraticForm.standard([0] * (gf2.ARF_NAIVE_MAX_DIM + 2))
    with pytest.raises(gf2.FormError):
        gf2.arf_naive(q)
    assert gf2.arf_fast(q) == 1


# --- Lagrangians of zeros --------------------------------------------------


def brute_force_lagrangian_exists(q):
    zeros = [v for v in range(1, 1 << q.dim) if q(v) == 0]
    for combo in itertools.combinations(zeros, q.genus):
        if gf2.rank(list(combo)) < q.genus:
            continue
        if all(q.space.omega(a, b) == 0 for a, b in itertools.combinations(combo, 2)):
            return True
    return False


@pytest.mark.parametrize("g", [1, 2])
def test_lagrangian_existence_matches_brute_force(g):
    for q in forms_of_genus(g):
        found = gf2.lagrangian_zero_basis(q)
        assert (found is not None) == brute_force_lagrangian_exists(q) == (gf2.arf_fast(q) == 1)


@settings(max_examples=200)
@given(random_forms(max_genus=6))
def test_lagrangian_and_completion(q):
    es = gf2.lagrangian_zero_basis(q)
    if gf2.arf_fast(q) == -1:
        assert es is None
        return
    gf2.check_isotropic_zero(q, es)
    basis = gf2.complete_to_symplectic(q, es)
    assert gf2.is_symplectic_zero_basis(q, basis)
    assert basis[0::2] == es


def test_check_isotropic_zero_errors():
    q = gf2.QuadraticForm.standard([0, 0, 0, 0])
    with pytest.raises(gf2.FormError, match="omega"):
        gf2.check_isotropic_zero(q, [0b0001, 0b0010])
    with pytest.raises(gf2.FormError, match="dependent"):
        gf2.check_isotropic_zero(q, [0b0001, 0b0001])
    with pytest.raises(gf2.FormError, match="q\\(v0\\)"):
        gf2.check_isotropic_zero(q, [0b0011])


def test_completion_rejects_wrong_count():
    q = gf2.QuadraticForm.standard([0, 0, 0, 0])
    with pytest.raises(gf2.FormError):
        gf2.complete_to_symplectic(q, [0b0001])
