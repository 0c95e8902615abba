import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import sparse
from scipy.sparse import csgraph

from spincut import gf2forms as gf2
from spincut import surface as sf
from spincut.fixtures import genus2_surface, grid_torus, icosahedron, icosphere, lattice_torus


@pytest.fixture(scope="module")
def torus8():
    return grid_torus(8)


@pytest.fixture(scope="module")
def genus2():
    return genus2_surface(8)


def random_closed_walk(m, rng, steps=30):
    """A random edge walk closed up by a shortest path back to its start."""
    nbrs = [m.rotation(v) for v in range(m.n_vertices)]
    v0 = int(rng.integers(m.n_vertices))
    walk = [v0]
    for _ in range(steps):
        walk.append(int(rng.choice(nbrs[walk[-1]])))
    _, pred = csgraph.dijkstra(m.edge_graph(), indices=walk[-1], return_predecessors=True)
    back = []
    node = v0
    while node != walk[-1]:
        back.append(node)
        node = int(pred[node])
    closing = back[::-1][:-1] if back else []
    vs = walk + closing
    if len(vs) > 1 and vs[-1] == vs[0]:
        vs = vs[:-1]
    return sf.Cycle(tuple(vs)) if len(vs) >= 2 else None


# --- validation and I/O ---------------------------------------------------


def test_grid_torus_basic(torus8):
    m, basis = torus8
    assert m.n_vertices == 64 and m.n_faces == 128 and m.n_edges == 192
    assert sf.genus(m) == 1
    assert sf.area(m) == pytest.approx(1.0, abs=1e-12)
    assert [c.length(m) for c in basis] == pytest.approx([1.0, 1.0])


def test_icosphere_counts():
    m = icosphere(4)
    assert m.n_vertices == 10 * 4**4 + 2
    assert sf.genus(m) == 0
    assert m.area() == pytest.approx(4 * math.pi, rel=2e-3)


def test_genus2_fixture(genus2):
    m, basis = genus2
    assert sf.genus(m) == 2
    hb = sf.as_basis(m, basis)
    assert hb.space.gram == gf2.SymplecticSpace.standard(2).gram


def test_rejects_non_manifold_edge():
    faces = [(0, 1, 2), (0, 2, 1), (0, 1, 3)]
    with pytest.raises(sf.NonManifoldError):
        sf.Mesh(faces, positions=np.eye(4, 3) + 0.1 * np.arange(12).reshape(4, 3))


def test_rejects_boundary():
    with pytest.raises(sf.NonManifoldError):
        sf.Mesh([(0, 1, 2)], positions=[[0, 0, 0], [1, 0, 0], [0, 1, 0]])


def test_rejects_inconsistent_orientation():
    ico = icosahedron()
    faces = np.array(ico.faces)
    faces[0] = faces[0][::-1]
    with pytest.raises(sf.NonOrientableError):
        sf.Mesh(faces, positions=ico.positions)


def test_rejects_triangle_inequality():
    m, _ = grid_torus(4)
    lengths = {(int(i), int(j)): float(x) for (i, j), x in zip(m.edges, m.lengths)}
    i, j = (int(x) for x in m.edges[0])
    lengths[(i, j)] = 10.0
    with pytest.raises(sf.TriangleInequalityError):
        sf.Mesh(m.faces, edge_lengths=lengths)


def test_rejects_disconnected():
    a = icosahedron()
    faces = np.concatenate([a.faces, a.faces + a.n_vertices])
    pos = np.concatenate([a.positions, a.positions + 5])
    with pytest.raises(sf.DisconnectedError):
        sf.Mesh(faces, positions=pos)


@pytest.mark.parametrize(
    "doc",
    [
        "not json",
        "[1, 2]",
        json.dumps({"version": 99, "faces": [[0, 1, 2]]}),
        json.dumps({"version": 1}),
        json.dumps({"version": 1, "faces": [[0, 1, 2]]}),
        json.dumps({"version": 1, "faces": [[0, 1, 5]], "positions": [[0, 0, 0]] * 3}),
    ],
)
def test_load_rejects_bad_documents(doc):
    with pytest.raises(sf.MeshError):
        sf.load_mesh(doc)


def test_dump_load_roundtrip(torus8):
    m, basis = torus8
    text = sf.dump_mesh(m, spin={"q_values": [0, 1], "basis_cycles": [list(c.vertices) for c in basis]})
    back = sf.load_mesh(text.encode())
    assert np.array_equal(back.faces, m.faces)
    assert np.allclose(back.lengths, m.lengths)
    assert back.spin["q_values"] == [0, 1]
    assert sf.dump_mesh(back) == text


def test_off_format():
    ico = icosahedron()
    lines = ["OFF", f"{ico.n_vertices} {ico.n_faces} 0"]
    lines += [" ".join(map(str, p)) for p in ico.positions]
    lines += ["3 " + " ".join(map(str, f)) for f in ico.faces]
    m = sf.load_mesh("\n".join(lines))
    assert sf.genus(m) == 0 and m.n_faces == 20


# --- homology -------------------------------------------------------------


@pytest.mark.parametrize("fixture", ["torus8", "genus2"])
def test_tree_cotree_loops_form_basis(fixture, request):
    m, _ = request.getfixturevalue(fixture)
    tc = m.tree_cotree
    g = sf.genus(m)
    assert len(tc.loops) == 2 * g
    assert all(c.simple for c in tc.loops)
    hb = sf.as_basis(m, tc.loops)
    assert hb.space.dim == 2 * g  # nondegenerate pairing


def test_grid_generators_intersect_once(torus8):
    m, (a, b) = torus8
    assert sf.intersection_number_mod2(m, a, b) == 1
    assert sf.intersection_number_mod2(m, b, a) == 1
    assert sf.intersection_number_mod2(m, a, a) == 0
    shifted = sf.Cycle(tuple(v + 8 for v in a.vertices))
    assert sf.intersection_number_mod2(m, a, shifted) == 0


def test_face_boundaries_are_null(genus2):
    m, basis = genus2
    for f in range(0, m.n_faces, 7):
        c = sf.face_cycle(m, f)
        assert sf.homology_class(m, c, basis) == 0
        assert m.tree_cotree.coords(c) == 0


@pytest.mark.parametrize("fixture", ["torus8", "genus2"])
def test_pairing_route_matches_cotree_route(fixture, request):
    m, basis = request.getfixturevalue(fixture)
    hb = sf.as_basis(m, basis)
    rng = np.random.default_rng(7)
    for _ in range(40):
        c = random_closed_walk(m, rng)
        if c is None:
            continue
        assert hb.classify(c) == hb.classify_via_cotree(c)


def test_basis_cycles_classify_to_unit_vectors(genus2):
    m, basis = genus2
    hb = sf.as_basis(m, basis)
    assert [hb.classify(c) for c in basis] == [1, 2, 4, 8]


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_classes_invariant_under_relabeling(seed):
    m, basis = grid_torus(5)
    rng = np.random.default_rng(seed)
    perm = rng.permutation(m.n_vertices)
    m2 = m.relabeled(perm)
    basis2 = [sf.Cycle(tuple(int(perm[v]) for v in c.vertices)) for c in basis]
    assert sf.genus(m2) == 1
    c = random_closed_walk(m, rng)
    c2 = sf.Cycle(tuple(int(perm[v]) for v in c.vertices))
    assert sf.homology_class(m, c, basis) == sf.homology_class(m2, c2, basis2)
    for cls in (1, 2, 3):
        d1 = sf.shortest_cycle_in_class(m, cls, basis).length(m)
        d2 = sf.shortest_cycle_in_class(m2, cls, basis2).length(m2)
        assert d1 == pytest.approx(d2)


# --- shortest cycles --------------------------------------------------------


def cover_class_lengths(b1, b2, n1, n2):
    """Oracle: shortest closed walk per Z_2 class via distances in the universal cover."""
    s1, s2 = np.asarray(b1, float) / n1, np.asarray(b2, float) / n2
    R1, R2 = 2 * n1 + 1, 2 * n2 + 1
    idx = lambda i, j: (i + n1) * R2 + (j + n2)  # noqa: E731
    rows, cols, w = [], [], []
    for i in range(-n1, n1 + 1):
        for j in range(-n2, n2 + 1):
            for di, dj, step in ((1, 0, s1), (0, 1, s2), (1, 1, s1 + s2)):
                if -n1 <= i + di <= n1 and -n2 <= j + dj <= n2:
                    rows.append(idx(i, j))
                    cols.append(idx(i + di, j + dj))
                    w.append(float(np.linalg.norm(step)))
    G = sparse.coo_matrix((w, (rows, cols)), shape=(R1 * R2, R1 * R2))
    d = csgraph.dijkstra(G, directed=False, indices=idx(0, 0))
    out = {}
    for cls in (1, 2, 3):
        best = math.inf
        for a in (-1, 0, 1):
            for b in (-1, 0, 1):
                if (a % 2, b % 2) == (cls & 1, cls >> 1):
                    best = min(best, d[idx(a * n1, b * n2)])
        out[cls] = best
    return out


@pytest.mark.parametrize(
    "b1,b2,n1,n2",
    [((1, 0), (0, 1), 8, 8), ((2, 0), (0, 1), 8, 4), ((1, 0), (0.4, 1.1), 6, 7)],
)
def test_shortest_cycles_match_cover_oracle(b1, b2, n1, n2):
    m, basis = lattice_torus(b1, b2, n1, n2)
    expected = cover_class_lengths(b1, b2, n1, n2)
    for cls in (1, 2, 3):
        c = sf.shortest_cycle_in_class(m, cls, basis)
        assert sf.homology_class(m, c, basis) == cls
        assert c.length(m) == pytest.approx(expected[cls], rel=1e-12)


def test_unit_grid_class_lengths(torus8):
    m, basis = torus8
    assert sf.shortest_cycle_in_class(m, 1, basis).length(m) == pytest.approx(1.0)
    # the (1,1) class runs along the grid diagonals
    assert sf.shortest_cycle_in_class(m, 3, basis).length(m) == pytest.approx(math.sqrt(2))


def test_zero_class_rejected(torus8):
    m, basis = torus8
    with pytest.raises(sf.CycleError):
        sf.cycles_in_class(m, 0, basis)


def test_blocked_vertices_respected(torus8):
    m, basis = torus8
    row = set(basis[0].vertices)
    c = sf.shortest_cycle_in_class(m, 1, basis, blocked=sorted(row))
    assert not row & set(c.vertices)
    assert sf.homology_class(m, c, basis) == 1


# --- cutting and refinement ---------------------------------------------------


def test_cut_torus_along_meridian(torus8):
    m, basis = torus8
    cut = sf.cut_along(m, [basis[0]])
    assert cut.euler_characteristic() == 0
    assert cut.is_connected()
    assert len(cut.boundary_components) == 2
    assert len(cut.traced_boundary_loops()) == 2
    assert sf.genus(cut.closed_up()) == 0
    assert set(cut.projection[list(cut.boundary_components[1])]) == set(basis[0].vertices)


def test_cut_genus2(genus2):
    m, basis = genus2
    cut = sf.cut_along(m, [basis[0], basis[2]])
    assert cut.euler_characteristic() == -2
    assert len(cut.traced_boundary_loops()) == 4
    assert sf.genus(cut.closed_up()) == 0


def test_cut_errors(torus8, genus2):
    m, basis = torus8
    with pytest.raises(sf.CutError, match="needs 1"):
        sf.cut_along(m, basis)
    walk = sf.Cycle(basis[0].vertices + basis[0].vertices)
    with pytest.raises(sf.CutError, match="simple"):
        sf.cut_along(m, [walk])
    m2, b2 = genus2
    with pytest.raises(sf.CutError, match="share"):
        sf.cut_along(m2, [b2[0], b2[1]])


def test_cut_rejects_dependent_cycles():
    m, basis = genus2_surface(8)
    row0 = basis[0]
    # the next grid row (away from the glued hole) is homologous to a1
    parallel = sf.Cycle(tuple(v + 8 for v in row0.vertices))
    assert sf.homology_class(m, parallel, basis) == sf.homology_class(m, row0, basis)
    with pytest.raises(sf.CutError, match="dependent"):
        sf.cut_along(m, [row0, parallel])


def test_subdivide_preserves_geometry(torus8):
    m, basis = torus8
    fine = sf.subdivide(m)
    assert sf.genus(fine) == 1
    assert fine.area() == pytest.approx(m.area())
    assert fine.n_faces == 4 * m.n_faces
    c = sf.refine_cycle(m, basis[0])
    assert c.length(fine) == pytest.approx(basis[0].length(m))


def test_metric_graph_levels_monotone(genus2):
    m, basis = genus2
    cut = sf.cut_along(m, [basis[0], basis[2]])
    prev = None
    for level in range(3):
        g = sf.MetricGraph(cut, level)
        d = g.distances_from(g.loop_nodes(cut.boundary_components[0]))
        vals = d[: cut.n_vertices]
        if prev is not None:
            assert np.all(vals <= prev + 1e-12)
        prev = vals


def test_metric_graph_level0_is_edge_graph(torus8):
    m, _ = torus8
    g = sf.MetricGraph(m, 0)
    assert g.n_nodes == m.n_vertices
    d1 = csgraph.dijkstra(g.graph, indices=0)
    d2 = csgraph.dijkstra(m.edge_graph(), indices=0)
    assert np.allclose(d1, d2)
