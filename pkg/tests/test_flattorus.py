import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spincut import flattorus as ft
from spincut.cutmetrics import delta_flat_torus

SQUARE = ((1, 0), (0, 1))
NONTRIVIAL = ((1, 0), (0, 1), (1, 1))
PAULI = (np.array([[0, 1], [1, 0]], complex), np.array([[0, -1j], [1j, 0]]))


def random_lattice(rng, max_cond=20.0):
    while True:
        B = rng.normal(size=(2, 2))
        if np.linalg.cond(B) <= max_cond:
            return B


def brute_force_magnitudes(t, cutoff, reach=40):
    """Oracle: 2 pi |xi| over a large coefficient box, with the 2x2 symbol's eigenvalues."""
    D = t.dual_basis
    s = np.array(t.eps) / 2
    out = []
    for m in range(-reach, reach + 1):
        for n in range(-reach, reach + 1):
            xi = (m + s[0]) * D[0] + (n + s[1]) * D[1]
            if 2 * math.pi * np.linalg.norm(xi) > cutoff:
                continue
            symbol = -2 * math.pi * (PAULI[0] * xi[0] + PAULI[1] * xi[1])
            out.extend(np.abs(np.linalg.eigvalsh(symbol)))
    return np.sort(out)


def test_convention_check():
    assert all(ft.convention_check().values())


@pytest.mark.parametrize(
    "b1,b2,eps,expected",
    [
        ((1, 0), (0, 1), (0, 0), 0.0),
        ((1, 0), (0, 1), (1, 0), math.pi),
        ((1, 0), (0, 1), (1, 1), 2 * math.pi * math.sqrt(0.5)),
        ((2, 0), (0, 1), (1, 0), math.pi / 2),
    ],
)
def test_min_abs_eigenvalue_examples(b1, b2, eps, expected):
    t = ft.FlatTorus.from_eps(b1, b2, eps)
    assert ft.min_abs_eigenvalue(t) == pytest.approx(expected, abs=1e-12)
    assert ft.dirac_spectrum(t, 20).values[0] == pytest.approx(expected, abs=1e-12)


def test_q_and_eps_conventions():
    t = ft.FlatTorus.from_eps(*SQUARE, (0, 0))
    assert t.q == (1, 1) and t.is_trivial and t.arf == -1
    for eps in NONTRIVIAL:
        assert ft.FlatTorus.from_eps(*SQUARE, eps).arf == 1


def test_validation():
    with pytest.raises(ValueError):
        ft.FlatTorus((1, 0), (2, 0), (0, 1))
    with pytest.raises(ValueError):
        ft.FlatTorus((1, 0), (0, 1), (0, 2))
    with pytest.raises(ValueError):
        ft.FlatTorus.from_eps((1, 0), (0, 1), (2, 0))
    with pytest.raises(ValueError):
        ft.dirac_spectrum(ft.FlatTorus((1, 0), (0, 1), (0, 1)), -1)


def test_spectrum_multiplicities_and_order():
    sl = ft.dirac_spectrum(ft.FlatTorus.from_eps(*SQUARE, (1, 0)), 12)
    assert np.all(np.diff(sl.values) >= 0)
    assert np.all(sl.values <= 12)
    # the lowest level: xi = (+-1/2, 0), two chiralities each
    assert np.count_nonzero(np.isclose(sl.values, math.pi)) == 4
    assert len(sl) == 2 * len(sl.frequencies)


def test_spectrum_complete_against_symbol_oracle():
    rng = np.random.default_rng(7)
    for _ in range(10):
        B = random_lattice(rng, 5)
        for eps in ((0, 0),) + NONTRIVIAL:
            t = ft.FlatTorus.from_eps(B[0], B[1], eps)
            cutoff = 25.0
            got = ft.dirac_spectrum(t, cutoff).values
            want = brute_force_magnitudes(t, cutoff)
            assert len(got) == len(want)
            assert np.allclose(got, want, atol=1e-10)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.1, 10), st.sampled_from(NONTRIVIAL))
def test_scaling(seed, s, eps):
    B = random_lattice(np.random.default_rng(seed))
    t = ft.FlatTorus.from_eps(B[0], B[1], eps)
    ts = t.scaled(s)
    assert ft.min_abs_eigenvalue(ts) == pytest.approx(ft.min_abs_eigenvalue(t) / s, rel=1e-9)
    a = ft.dirac_spectrum(t, 30).values
    b = ft.dirac_spectrum(ts, 30 / s).values
    assert len(a) == len(b) and np.allclose(b, a / s, rtol=1e-9)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from(((0, 0),) + NONTRIVIAL))
def test_rebasing_invariance(seed, eps):
    rng = np.random.default_rng(seed)
    B = random_lattice(rng)
    U = np.eye(2, dtype=np.int64)
    for _ in range(4):
        E = np.array([[1, int(rng.integers(-2, 3))], [0, 1]]) if rng.random() < 0.5 else np.array([[1, 0], [int(rng.integers(-2, 3)), 1]])
        U = E @ U
    t = ft.FlatTorus.from_eps(B[0], B[1], eps)
    r = t.rebased(U)
    assert r.arf == t.arf
    a = ft.dirac_spectrum(t, 30).values
    b = ft.dirac_spectrum(r, 30).values
    assert len(a) == len(b)
    assert np.max(np.abs(a - b), initial=0) <= 1e-12 * max(1.0, a.max(initial=1.0))


def test_rebased_rejects_non_unimodular():
    t = ft.FlatTorus.from_eps(*SQUARE, (1, 0))
    with pytest.raises(ValueError):
        t.rebased([[2, 0], [0, 1]])


def test_verify_unit_square():
    v = ft.verify_torus_theorem(ft.FlatTorus.from_eps(*SQUARE, (1, 0)))
    assert v.passed
    assert v.eigenvalue == pytest.approx(math.pi)
    assert v.best_k == v.candidate_k == 3
    assert v.best_bound == pytest.approx(0.46001, abs=1e-5)
    assert v.eigenvalue - v.best_bound == pytest.approx(2.68, abs=0.01)
    d = v.as_dict()
    assert d["passed"] and d["window"] == [1, 8]


def test_verify_random_lattices():
    rng = np.random.default_rng(1)
    for _ in range(50):
        B = random_lattice(rng)
        for eps in NONTRIVIAL:
            t = ft.FlatTorus.from_eps(B[0], B[1], eps)
            v = ft.verify_torus_theorem(t)
            assert v.passed, v.as_dict()
            assert v.delta == pytest.approx(delta_flat_torus(B, t.q))


def test_verify_rejects_trivial():
    with pytest.raises(ValueError):
        ft.verify_torus_theorem(ft.FlatTorus.from_eps(*SQUARE, (0, 0)))
