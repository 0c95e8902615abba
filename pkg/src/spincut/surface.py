"""Closed oriented triangle meshes with an edge-length metric.

Topology lives here: genus, a tree-cotree homology basis, mod-2
intersection numbers, shortest cycles in a prescribed homology class and
cutting a surface open along disjoint simple cycles.

Intersection numbers are exact.  To pair a walk ``c1`` with a cycle ``c2``
we push ``c2`` off to its left into the dual graph; the pushed-off dual
loop crosses exactly the edges that leave a vertex of ``c2`` strictly
between its outgoing and incoming edges (counterclockwise).  Counting the
edges of ``c1`` in that set mod 2 gives ``c1 . c2``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Sequence

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph

from . import gf2forms as gf2

FORMAT_VERSION = 1


class MeshError(ValueError):
    """Input does not describe a valid closed oriented triangulated surface."""


class MeshParseError(MeshError):
    pass


class NonManifoldError(MeshError):
    pass


class NonOrientableError(MeshError):
    pass


class TriangleInequalityError(MeshError):
    pass


class DisconnectedError(MeshError):
    pass


class CycleError(MeshError):
    """A cycle is malformed or unsuitable for the requested operation."""


class CutError(MeshError):
    pass


def _edge_table(faces: np.ndarray):
    half = faces[:, [0, 1, 1, 2, 2, 0]].reshape(-1, 2)
    key = np.sort(half, axis=1)
    edges, inverse = np.unique(key, axis=0, return_inverse=True)
    return edges, inverse.reshape(-1, 3), half


def _heron(a, b, c):
    s = 0.5 * (a + b + c)
    return np.sqrt(np.maximum(s * (s - a) * (s - b) * (s - c), 0.0))


class _Complex:
    """Faces, edges and edge lengths shared by closed and cut-open meshes."""

    faces: np.ndarray
    n_vertices: int
    edges: np.ndarray
    face_edges: np.ndarray
    lengths: np.ndarray
    positions: np.ndarray | None

    @property
    def n_faces(self) -> int:
        return len(self.faces)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def euler_characteristic(self) -> int:
        return self.n_vertices - self.n_edges + self.n_faces

    def face_lengths(self) -> np.ndarray:
        """Lengths of the sides (v0v1, v1v2, v2v0) of every face."""
        return self.lengths[self.face_edges]

    def face_areas(self) -> np.ndarray:
        fl = self.face_lengths()
        return _heron(fl[:, 0], fl[:, 1], fl[:, 2])

    def area(self) -> float:
        return float(self.face_areas().sum())

    def edge_graph(self, weights: np.ndarray | None = None) -> sparse.csr_matrix:
        w = self.lengths if weights is None else weights
        n = self.n_vertices
        i, j = self.edges[:, 0], self.edges[:, 1]
        return sparse.coo_matrix(
            (np.concatenate([w, w]), (np.concatenate([i, j]), np.concatenate([j, i]))), shape=(n, n)
        ).tocsr()

    def is_connected(self) -> bool:
        if self.n_vertices == 0:
            return False
        ncomp, _ = csgraph.connected_components(self.edge_graph(np.ones(self.n_edges)), directed=False)
        return ncomp == 1


class Mesh(_Complex):
    """A validated closed, connected, oriented triangle mesh.

    Parameters
    ----------
    faces : array_like, shape (F, 3)
        Counterclockwise vertex triples, 0-based.
    positions : array_like, shape (V, 3), optional
        Embedding.  Edge lengths are derived from it when given.
    edge_lengths : mapping or array_like, optional
        ``{(i, j): length}`` or rows ``[i, j, length]``; required without
        positions.
    """

    def __init__(self, faces, positions=None, edge_lengths=None, spin: dict | None = None):
        try:
            faces = np.asarray(faces, dtype=np.int64)
        except (TypeError, ValueError) as exc:
            raise MeshParseError(f"faces are not an integer array: {exc}") from None
        if faces.ndim != 2 or faces.shape[1] != 3 or len(faces) == 0:
            raise MeshParseError("faces must be a non-empty (F, 3) array")
        if positions is not None:
            positions = np.asarray(positions, dtype=float)
            if positions.ndim != 2 or positions.shape[1] != 3:
                raise MeshParseError("positions must be a (V, 3) array")
            if not np.all(np.isfinite(positions)):
                raise MeshParseError("positions contain non-finite values")
            n = len(positions)
        else:
            n = int(faces.max()) + 1
        if faces.min() < 0 or faces.max() >= n:
            raise MeshParseError("face index out of range")
        if np.any((faces[:, 0] == faces[:, 1]) | (faces[:, 1] == faces[:, 2]) | (faces[:, 0] == faces[:, 2])):
            raise MeshParseError("face with repeated vertex")
        self.faces = faces
        self.faces.setflags(write=False)
        self.n_vertices = n
        self.positions = positions
        self.spin = spin
        self.edges, self.face_edges, half = _edge_table(faces)
        self._check_manifold(half)
        self.lengths = self._resolve_lengths(edge_lengths)
        fl = self.face_lengths()
        a, b, c = fl[:, 0], fl[:, 1], fl[:, 2]
        bad = np.flatnonzero((a >= b + c) | (b >= a + c) | (c >= a + b))
        if len(bad):
            raise TriangleInequalityError(f"face {int(bad[0])} violates the strict triangle inequality")
        if not self.is_connected():
            raise DisconnectedError("mesh is not connected")
        self.edge_index = {(int(i), int(j)): e for e, (i, j) in enumerate(self.edges)}

    def _check_manifold(self, half: np.ndarray) -> None:
        F = len(self.faces)
        counts = np.bincount(self.face_edges.ravel(), minlength=len(self.edges))
        if np.any(counts > 2):
            e = self.edges[int(np.argmax(counts > 2))]
            raise NonManifoldError(f"edge {tuple(int(x) for x in e)} lies in more than two faces")
        if np.any(counts < 2):
            e = self.edges[int(np.argmax(counts < 2))]
            raise NonManifoldError(f"edge {tuple(int(x) for x in e)} lies in only one face (surface has boundary)")
        self.halfedge_face: dict[tuple[int, int], int] = {}
        self.next_ccw: dict[tuple[int, int], int] = {}
        for f in range(F):
            a, b, c = (int(x) for x in self.faces[f])
            for u, v, w in ((a, b, c), (b, c, a), (c, a, b)):
                if (u, v) in self.halfedge_face:
                    raise NonOrientableError(f"edge ({u}, {v}) is traversed twice in the same direction")
                self.halfedge_face[(u, v)] = f
                self.next_ccw[(u, v)] = w
        if len(np.unique(self.faces)) != self.n_vertices:
            raise DisconnectedError("isolated vertex")
        star = np.bincount(self.faces.ravel(), minlength=self.n_vertices)
        self._first_neighbor = {}
        for (u, v) in self.halfedge_face:
            self._first_neighbor.setdefault(u, v)
        for v in range(self.n_vertices):
            ring = self.rotation(v)
            if len(ring) != star[v]:
                raise NonManifoldError(f"vertex {v} has a disconnected link")

    def _resolve_lengths(self, edge_lengths) -> np.ndarray:
        if edge_lengths is None:
            if self.positions is None:
                raise MeshParseError("need positions or edge_lengths")
            d = self.positions[self.edges[:, 0]] - self.positions[self.edges[:, 1]]
            lengths = np.linalg.norm(d, axis=1)
        else:
            if isinstance(edge_lengths, dict):
                items = edge_lengths.items()
            else:
                items = (((int(r[0]), int(r[1])), float(r[2])) for r in edge_lengths)
            table = {}
            for (i, j), ell in items:
                table[(min(i, j), max(i, j))] = float(ell)
            lengths = np.empty(len(self.edges))
            for e, (i, j) in enumerate(self.edges):
                key = (int(i), int(j))
                if key not in table:
                    raise MeshParseError(f"missing length for edge {key}")
                lengths[e] = table[key]
        if not np.all(np.isfinite(lengths)) or np.any(lengths <= 0):
            raise MeshParseError("edge lengths must be positive and finite")
        return lengths

    def rotation(self, v: int) -> list[int]:
        """Neighbors of ``v`` in counterclockwise order."""
        start = self._first_neighbor[v]
        ring = [start]
        u = self.next_ccw[(v, start)]
        while u != start:
            ring.append(u)
            u = self.next_ccw[(v, u)]
            if len(ring) > len(self.faces):
                break
        return ring

    def edge_id(self, a: int, b: int) -> int:
        try:
            return self.edge_index[(a, b) if a < b else (b, a)]
        except KeyError:
            raise CycleError(f"vertices {a} and {b} are not adjacent") from None

    def genus(self) -> int:
        return genus(self)

    @cached_property
    def tree_cotree(self) -> "TreeCotree":
        return TreeCotree(self)

    def relabeled(self, perm: Sequence[int]) -> "Mesh":
        """Same surface with vertex ``v`` renamed ``perm[v]``."""
        perm = np.asarray(perm)
        pos = None
        if self.positions is not None:
            pos = np.empty_like(self.positions)
            pos[perm] = self.positions
        lengths = {(int(perm[i]), int(perm[j])): ell for (i, j), ell in zip(self.edges, self.lengths)}
        return Mesh(perm[self.faces], positions=pos, edge_lengths=None if pos is not None else lengths)


def genus(m: Mesh) -> int:
    chi = m.euler_characteristic()
    if chi > 2 or chi % 2:
        raise MeshError(f"Euler characteristic {chi} is not that of a closed orientable surface")
    return (2 - chi) // 2


def area(m: Mesh) -> float:
    return m.area()


@dataclass(frozen=True)
class Cycle:
    """Closed edge walk given by its vertices; the last vertex joins the first."""

    vertices: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(int(v) for v in self.vertices))
        if len(self.vertices) < 2:
            raise CycleError("a cycle needs at least two vertices")

    def __len__(self):
        return len(self.vertices)

    @property
    def simple(self) -> bool:
        return len(set(self.vertices)) == len(self.vertices) and len(self.vertices) >= 3

    def steps(self):
        vs = self.vertices
        return zip(vs, vs[1:] + vs[:1])

    def edge_ids(self, m: Mesh) -> list[int]:
        return [m.edge_id(a, b) for a, b in self.steps()]

    def length(self, m: Mesh) -> float:
        return float(m.lengths[self.edge_ids(m)].sum())

    def reversed(self) -> "Cycle":
        return Cycle(self.vertices[::-1])


def face_cycle(m: Mesh, f: int) -> Cycle:
    return Cycle(tuple(int(x) for x in m.faces[f]))


def _odd_edges(m: Mesh, c: Cycle) -> set[int]:
    """Edges traversed an odd number of times: the mod-2 chain of ``c``."""
    out: set[int] = set()
    for e in c.edge_ids(m):
        out ^= {e}
    return out


def pushoff_edges(m: Mesh, c: Cycle) -> set[int]:
    """Edges crossed (odd number of times) by ``c`` pushed to its left."""
    vs = c.vertices
    L = len(vs)
    crossed: set[int] = set()
    for i in range(L):
        v, p, n = vs[i], vs[i - 1], vs[(i + 1) % L]
        m.edge_id(v, n)
        u = m.next_ccw[(v, n)]
        while u != p:
            crossed ^= {m.edge_id(v, u)}
            u = m.next_ccw[(v, u)]
    return crossed


def intersection_number_mod2(m: Mesh, c1: Cycle, c2: Cycle) -> int:
    crossed = pushoff_edges(m, c2)
    return sum(1 for e in c1.edge_ids(m) if e in crossed) & 1


class TreeCotree:
    """Tree-cotree decomposition with greedy (short) basis loops.

    The primal tree is a shortest-path tree from vertex ``root``; the dual
    cotree is a maximum spanning tree of the dual graph weighted by the
    length of the loop each edge would close.  Each leftover edge yields a
    basis loop, and its dual loop (leftover edge plus cotree path) is a
    cocycle dual to it.  ``sigma[e]`` records which cocycles contain ``e``.
    """

    def __init__(self, m: Mesh, root: int = 0):
        self.mesh = m
        n = m.n_vertices
        dist, pred = csgraph.dijkstra(m.edge_graph(), indices=root, return_predecessors=True)
        self.parent = pred
        self.depth = self._depths(pred, root)
        in_tree = np.zeros(m.n_edges, dtype=bool)
        for v in range(n):
            if v != root:
                in_tree[m.edge_id(v, int(pred[v]))] = True
        # faces adjacent to each edge
        ef = np.full((m.n_edges, 2), -1, dtype=np.int64)
        for f in range(m.n_faces):
            for e in m.face_edges[f]:
                ef[e, 0 if ef[e, 0] < 0 else 1] = f
        self.edge_faces = ef
        loop_len = dist[m.edges[:, 0]] + dist[m.edges[:, 1]] + m.lengths
        order = sorted(np.flatnonzero(~in_tree), key=lambda e: (-loop_len[e], e))
        uf = list(range(m.n_faces))

        def find(x):
            while uf[x] != x:
                uf[x] = uf[uf[x]]
                x = uf[x]
            return x

        in_cotree = np.zeros(m.n_edges, dtype=bool)
        for e in order:
            a, b = find(ef[e, 0]), find(ef[e, 1])
            if a != b:
                uf[a] = b
                in_cotree[e] = True
        leftover = [int(e) for e in np.flatnonzero(~in_tree & ~in_cotree)]
        leftover.sort(key=lambda e: (loop_len[e], e))
        self.generators = leftover
        self.in_tree = in_tree
        self.in_cotree = in_cotree
        self._build_cotree(in_cotree)
        self.sigma = np.zeros(m.n_edges, dtype=np.int64)
        self.cocycles: list[list[int]] = []
        for i, e in enumerate(leftover):
            edges = [e] + self._cotree_path(int(ef[e, 0]), int(ef[e, 1]))
            self.cocycles.append(edges)
            for x in edges:
                self.sigma[x] ^= 1 << i
        self.loops = [self._tree_loop(e) for e in leftover]

    @staticmethod
    def _depths(pred, root):
        depth = np.full(len(pred), -1, dtype=np.int64)
        depth[root] = 0
        for v in range(len(pred)):
            chain = []
            u = v
            while depth[u] < 0:
                chain.append(u)
                u = pred[u]
            d = depth[u]
            for x in reversed(chain):
                d += 1
                depth[x] = d
        return depth

    def _build_cotree(self, in_cotree):
        m = self.mesh
        adj: list[list[tuple[int, int]]] = [[] for _ in range(m.n_faces)]
        for e in np.flatnonzero(in_cotree):
            a, b = self.edge_faces[e]
            adj[a].append((int(b), int(e)))
            adj[b].append((int(a), int(e)))
        self.fparent = np.full(m.n_faces, -1, dtype=np.int64)
        self.fparent_edge = np.full(m.n_faces, -1, dtype=np.int64)
        self.fdepth = np.full(m.n_faces, -1, dtype=np.int64)
        self.fdepth[0] = 0
        stack = [0]
        while stack:
            f = stack.pop()
            for h, e in adj[f]:
                if self.fdepth[h] < 0:
                    self.fdepth[h] = self.fdepth[f] + 1
                    self.fparent[h] = f
                    self.fparent_edge[h] = e
                    stack.append(h)

    def _cotree_path(self, a: int, b: int) -> list[int]:
        out = []
        while a != b:
            if self.fdepth[a] >= self.fdepth[b]:
                out.append(int(self.fparent_edge[a]))
                a = int(self.fparent[a])
            else:
                out.append(int(self.fparent_edge[b]))
                b = int(self.fparent[b])
        return out

    def _tree_loop(self, e: int) -> Cycle:
        u, v = (int(x) for x in self.mesh.edges[e])
        up, down = [u], [v]
        while u != v:
            if self.depth[u] >= self.depth[v]:
                u = int(self.parent[u])
                up.append(u)
            else:
                v = int(self.parent[v])
                down.append(v)
        return Cycle(tuple(up + down[-2::-1]))

    def coords(self, c: Cycle) -> int:
        """Class of ``c`` in the basis ``self.loops`` (packed)."""
        out = 0
        for e in c.edge_ids(self.mesh):
            out ^= int(self.sigma[e])
        return out


def homology_basis(m: Mesh) -> list[Cycle]:
    """``2g`` simple cycles whose classes form a basis of ``H_1(M, Z_2)``."""
    return list(m.tree_cotree.loops)


class HomologyBasis:
    """A basis of ``H_1(M, Z_2)`` given by cycles, with cached linear algebra."""

    def __init__(self, m: Mesh, cycles: Sequence[Cycle]):
        self.mesh = m
        self.cycles = tuple(cycles)
        tc = m.tree_cotree
        if len(self.cycles) != len(tc.loops):
            raise CycleError(f"a homology basis needs {len(tc.loops)} cycles, got {len(self.cycles)}")
        for c in self.cycles:
            c.edge_ids(m)
        self._pushoffs = [pushoff_edges(m, c) for c in self.cycles]
        n = len(self.cycles)
        gram = []
        for i in range(n):
            gram.append(gf2.pack(self._pair(self.cycles[j], i) for j in range(n)))
        try:
            self.space = gf2.SymplecticSpace(n, tuple(gram))
        except gf2.FormError as exc:
            raise CycleError(f"cycles do not form a homology basis: {exc}") from None
        self._gram_inv = gf2.invert(self.space.gram, n)
        # columns: tree-cotree coordinates of each basis cycle
        cols = [tc.coords(c) for c in self.cycles]
        self._to_tc_rows = [gf2.pack((cols[j] >> i) & 1 for j in range(n)) for i in range(n)]
        self._from_tc_rows = gf2.invert(self._to_tc_rows, n)

    def _pair(self, c: Cycle, i: int) -> int:
        crossed = self._pushoffs[i]
        return sum(1 for e in c.edge_ids(self.mesh) if e in crossed) & 1

    @property
    def dim(self) -> int:
        return len(self.cycles)

    def classify(self, c: Cycle) -> int:
        """Coordinates of ``[c]``: solve ``J a = (c . b_i)_i``."""
        p = gf2.pack(self._pair(c, i) for i in range(self.dim))
        return gf2.mat_vec(self._gram_inv, p)

    def classify_via_cotree(self, c: Cycle) -> int:
        return gf2.mat_vec(self._from_tc_rows, self.mesh.tree_cotree.coords(c))

    def to_cotree(self, a: int) -> int:
        return gf2.mat_vec(self._to_tc_rows, a)


def as_basis(m: Mesh, basis) -> HomologyBasis:
    if isinstance(basis, HomologyBasis):
        return basis
    if basis is None:
        basis = homology_basis(m)
    cache = m.__dict__.setdefault("_basis_cache", {})
    key = tuple(basis)
    if key not in cache:
        cache[key] = HomologyBasis(m, key)
    return cache[key]


def homology_class(m: Mesh, c: Cycle, basis=None) -> int:
    return as_basis(m, basis).classify(c)


def _lift_graph(m: Mesh, weights: np.ndarray, allowed: np.ndarray, K: int) -> sparse.csr_matrix:
    keep = allowed[m.edges[:, 0]] & allowed[m.edges[:, 1]]
    ed = m.edges[keep]
    w = weights[keep]
    sig = m.tree_cotree.sigma[keep]
    s = np.arange(K)
    u = (ed[:, 0:1] * K + s).ravel()
    v = (ed[:, 1:2] * K + (s[None, :] ^ sig[:, None])).ravel()
    ww = np.repeat(w, K)
    N = m.n_vertices * K
    return sparse.coo_matrix((np.concatenate([ww, ww]), (np.concatenate([u, v]), np.concatenate([v, u]))), shape=(N, N)).tocsr()


def cycles_in_class(
    m: Mesh,
    target: int,
    basis=None,
    *,
    weights: np.ndarray | None = None,
    blocked: Sequence[int] = (),
    chunk: int = 64,
    slack: float = 1.25,
) -> list[tuple[float, Cycle]]:
    """Shortest closed walk in class ``target`` through each candidate start.

    Walks are found by Dijkstra on the cover whose states are (vertex,
    partial class).  Every such walk meets a basis loop that pairs oddly
    with ``target``, so only that loop's vertices are tried as starts.
    Returned sorted by (length under ``weights``, vertices); duplicates
    (same edge multiset) removed.  ``weights`` defaults to the metric.
    Walks longer than ``slack`` times the shortest one may be omitted.
    """
    hb = as_basis(m, basis)
    if target == 0:
        raise CycleError("target class is zero")
    hb.space.check(target)
    tc = m.tree_cotree
    t = hb.to_cotree(target)
    K = 1 << hb.dim
    tc_space = as_basis(m, tc.loops).space
    allowed = np.ones(m.n_vertices, dtype=bool)
    allowed[list(blocked)] = False
    meets = [i for i in range(hb.dim) if tc_space.omega(t, 1 << i)]
    loops = sorted(meets, key=lambda i: (tc.loops[i].length(m), i))
    starts = [v for v in tc.loops[loops[0]].vertices if allowed[v]]
    w = m.lengths if weights is None else np.asarray(weights, dtype=float)
    G = _lift_graph(m, w, allowed, K)
    found: dict[frozenset, tuple[float, Cycle]] = {}
    # A closed walk through s in class t splits at its midpoint (v, x) into
    # lifted paths (s, 0) -> (v, x) and (s, 0) -> (v, x ^ t) (translate the
    # second half by the deck transformation x -> x ^ t), so each search
    # only needs to reach half the walk length.  One start runs first; its
    # walk then caps the radius of the remaining searches.
    partner = np.arange(K) ^ t
    wmax = float(w.max()) if len(w) else 0.0
    batches = [starts[:1]] + [starts[k:k + chunk] for k in range(1, len(starts), chunk)]
    limit = np.inf
    for batch in batches:
        if not batch:
            continue
        dist, pred = csgraph.dijkstra(G, indices=[s * K for s in batch], return_predecessors=True, limit=limit)
        for row, s in enumerate(batch):
            D = dist[row].reshape(m.n_vertices, K)
            total = D + D[:, partner]
            idx = int(np.argmin(total))
            if not np.isfinite(total.flat[idx]):
                continue
            v, x = divmod(idx, K)
            p1 = _lifted_path(pred[row], s * K, v * K + x, K)
            p2 = _lifted_path(pred[row], s * K, v * K + (x ^ t), K)
            c = Cycle(tuple(p1 + p2[::-1][1:-1]))
            key = frozenset(_multiset(c.edge_ids(m)))
            if key not in found:
                found[key] = (float(w[c.edge_ids(m)].sum()), c)
            limit = min(limit, slack * float(total.flat[idx]) / 2 + wmax)
    return sorted(found.values(), key=lambda x: (round(x[0], 12), x[1].vertices))


def _lifted_path(pred: np.ndarray, src: int, dst: int, K: int) -> list[int]:
    """Base vertices along the predecessor path ``src -> dst``."""
    out = [dst // K]
    node = dst
    while node != src:
        node = int(pred[node])
        out.append(node // K)
    return out[::-1]


def _multiset(ids):
    out: dict[int, int] = {}
    for e in ids:
        out[e] = out.get(e, 0) + 1
    return out.items()


def shortest_cycle_in_class(m: Mesh, target: int, basis=None, *, require_simple: bool = False, **kw) -> Cycle:
    """Minimum-length edge cycle whose mod-2 class is ``target``."""
    for _, c in cycles_in_class(m, target, basis, **kw):
        if c.simple or not require_simple:
            return c
    raise CycleError("no cycle in the requested class")


@dataclass
class CutOpenMesh(_Complex):
    """A mesh cut open along disjoint simple cycles.

    ``projection[v]`` is the vertex of the closed mesh that ``v`` covers;
    ``boundary_components`` lists each boundary loop's vertices, two per
    cut cycle (left copy then right copy).
    """

    faces: np.ndarray
    n_vertices: int
    projection: np.ndarray
    boundary_components: list[tuple[int, ...]]
    source: Mesh
    positions: np.ndarray | None = None
    edges: np.ndarray = field(init=False)
    face_edges: np.ndarray = field(init=False)
    lengths: np.ndarray = field(init=False)

    def __post_init__(self):
        self.edges, self.face_edges, _ = _edge_table(self.faces)
        pe = self.projection[self.edges]
        self.lengths = np.array([self.source.lengths[self.source.edge_id(int(a), int(b))] for a, b in pe])

    def boundary_edges(self) -> np.ndarray:
        counts = np.bincount(self.face_edges.ravel(), minlength=self.n_edges)
        return np.flatnonzero(counts == 1)

    def traced_boundary_loops(self) -> list[list[int]]:
        """Boundary loops recomputed from the face list alone."""
        half = self.faces[:, [0, 1, 1, 2, 2, 0]].reshape(-1, 2)
        pairs = {(int(a), int(b)) for a, b in half}
        nxt = {a: b for a, b in pairs if (b, a) not in pairs}
        loops, seen = [], set()
        for a in sorted(nxt):
            if a in seen:
                continue
            loop = [a]
            seen.add(a)
            b = nxt[a]
            while b != a:
                loop.append(b)
                seen.add(b)
                b = nxt[b]
            loops.append(loop)
        return loops

    def closed_up(self) -> Mesh:
        """Cone every boundary loop to a new vertex; the result is closed."""
        faces = [tuple(int(x) for x in f) for f in self.faces]
        lengths = {(int(a), int(b)): float(l) for (a, b), l in zip(self.edges, self.lengths)}
        n = self.n_vertices
        for loop in self.traced_boundary_loops():
            apex = n
            n += 1
            # boundary half-edges a->b have no twin; the cap uses b->a
            for a, b in zip(loop, loop[1:] + loop[:1]):
                faces.append((b, a, apex))
            for a in loop:
                lengths[(a, apex)] = 2.0 * float(self.lengths.max()) * len(loop)
        return Mesh(faces, edge_lengths=lengths)

    def interior_vertices(self) -> np.ndarray:
        on_boundary = np.zeros(self.n_vertices, dtype=bool)
        for loop in self.boundary_components:
            on_boundary[list(loop)] = True
        return np.flatnonzero(~on_boundary)


def cut_along(m: Mesh, cycles: Sequence[Cycle], basis=None) -> CutOpenMesh:
    """Cut ``m`` along ``g`` disjoint simple cycles with independent classes."""
    g = genus(m)
    if len(cycles) != g:
        raise CutError(f"a cut of a genus-{g} surface needs {g} cycles, got {len(cycles)}")
    for i, c in enumerate(cycles):
        if not c.simple:
            raise CutError(f"cycle {i} is not simple")
        c.edge_ids(m)
    for i, j in combinations(range(len(cycles)), 2):
        if set(cycles[i].vertices) & set(cycles[j].vertices):
            raise CutError(f"cycles {i} and {j} share a vertex")
    tc = m.tree_cotree
    classes = [tc.coords(c) for c in cycles]
    if gf2.rank(classes) != len(cycles):
        raise CutError("cycle classes are linearly dependent in H_1(M, Z_2)")
    faces = np.array(m.faces, dtype=np.int64)
    projection = list(range(m.n_vertices))
    boundary = []
    n = m.n_vertices
    for c in cycles:
        vs = c.vertices
        L = len(vs)
        copies = []
        for i in range(L):
            v, p, nx = vs[i], vs[i - 1], vs[(i + 1) % L]
            u = p
            while u != nx:
                f = m.halfedge_face[(v, u)]
                faces[f][faces[f] == v] = n
                u = m.next_ccw[(v, u)]
            projection.append(v)
            copies.append(n)
            n += 1
        boundary.append(tuple(vs))
        boundary.append(tuple(copies))
    pos = None if m.positions is None else m.positions[projection]
    return CutOpenMesh(faces, n, np.array(projection), boundary, m, pos)


def subdivide(m: Mesh, levels: int = 1, project_to_sphere: float | None = None) -> Mesh:
    """1-to-4 midpoint subdivision; intrinsic lengths are kept exact."""
    for _ in range(levels):
        V = m.n_vertices
        a, b, c = m.faces[:, 0], m.faces[:, 1], m.faces[:, 2]
        mab, mbc, mca = (V + m.face_edges[:, k] for k in range(3))
        faces = np.concatenate(
            [np.stack(t, axis=1) for t in ((a, mab, mca), (b, mbc, mab), (c, mca, mbc), (mab, mbc, mca))]
        )
        if m.positions is not None:
            mid = 0.5 * (m.positions[m.edges[:, 0]] + m.positions[m.edges[:, 1]])
            pos = np.concatenate([m.positions, mid])
            if project_to_sphere is not None:
                pos = project_to_sphere * pos / np.linalg.norm(pos, axis=1, keepdims=True)
            m = Mesh(faces, positions=pos)
        else:
            lengths = {}
            for e, (i, j) in enumerate(m.edges):
                half = 0.5 * m.lengths[e]
                lengths[(int(i), V + e)] = half
                lengths[(int(j), V + e)] = half
            fl = m.face_lengths()
            for f in range(m.n_faces):
                eab, ebc, eca = (int(x) for x in m.face_edges[f])
                lab, lbc, lca = fl[f]
                lengths[(V + eab, V + ebc)] = 0.5 * lca
                lengths[(V + ebc, V + eca)] = 0.5 * lab
                lengths[(V + eca, V + eab)] = 0.5 * lbc
            m = Mesh(faces, edge_lengths=lengths)
    return m


def refine_cycle(m: Mesh, c: Cycle) -> Cycle:
    """The image of ``c`` on ``subdivide(m)`` (midpoints inserted)."""
    out = []
    for a, b in c.steps():
        out.extend((a, m.n_vertices + m.edge_id(a, b)))
    return Cycle(tuple(out))


class MetricGraph:
    """Edge graph enriched with Steiner points for approximate geodesics.

    At level ``L`` every edge carries ``2^L - 1`` equally spaced interior
    points and all boundary points of a face are joined by straight
    segments measured in that face's planar layout.  Level 0 is the plain
    edge graph; distances never increase with the level.
    """

    def __init__(self, cx: _Complex, level: int = 0):
        if level < 0:
            raise ValueError("subdivision level must be >= 0")
        s = 1 << level
        self.level = level
        self.cx = cx
        V, E = cx.n_vertices, cx.n_edges
        self.n_nodes = V + E * (s - 1)
        fl = cx.face_lengths()
        l01, l12, l20 = fl[:, 0], fl[:, 1], fl[:, 2]
        P0 = np.zeros((cx.n_faces, 2))
        P1 = np.stack([l01, np.zeros_like(l01)], axis=1)
        x = (l01**2 + l20**2 - l12**2) / (2 * l01)
        P2 = np.stack([x, np.sqrt(np.maximum(l20**2 - x**2, 0.0))], axis=1)
        corners = [P0, P1, P2]
        t = np.arange(s) / s
        pts, ids = [], []
        for k in range(3):
            a, b = corners[k], corners[(k + 1) % 3]
            pts.append(a[:, None, :] + t[None, :, None] * (b - a)[:, None, :])
            va = cx.faces[:, k]
            e = cx.face_edges[:, k]
            node = np.empty((cx.n_faces, s), dtype=np.int64)
            node[:, 0] = va
            if s > 1:
                forward = (cx.edges[e, 0] == va)[:, None]
                j = np.arange(1, s)[None, :]
                interior = V + e[:, None] * (s - 1) + np.where(forward, j - 1, s - 1 - j)
                node[:, 1:] = interior
            ids.append(node)
        pts = np.concatenate(pts, axis=1)
        ids = np.concatenate(ids, axis=1)
        iu, ju = np.triu_indices(3 * s, k=1)
        d = np.linalg.norm(pts[:, iu, :] - pts[:, ju, :], axis=2).ravel()
        a = ids[:, iu].ravel()
        b = ids[:, ju].ravel()
        lo, hi = np.minimum(a, b), np.maximum(a, b)
        order = np.lexsort((d, hi, lo))
        lo, hi, d = lo[order], hi[order], d[order]
        first = np.ones(len(lo), dtype=bool)
        first[1:] = (lo[1:] != lo[:-1]) | (hi[1:] != hi[:-1])
        lo, hi, d = lo[first], hi[first], d[first]
        N = self.n_nodes
        self.graph = sparse.coo_matrix(
            (np.concatenate([d, d]), (np.concatenate([lo, hi]), np.concatenate([hi, lo]))), shape=(N, N)
        ).tocsr()

    @cached_property
    def _edge_index(self) -> dict[tuple[int, int], int]:
        return {(int(a), int(b)): i for i, (a, b) in enumerate(self.cx.edges)}

    def edge_nodes(self, e: int) -> list[int]:
        s = 1 << self.level
        V = self.cx.n_vertices
        return [V + e * (s - 1) + j for j in range(s - 1)]

    def loop_nodes(self, loop: Sequence[int]) -> list[int]:
        """Graph nodes lying on a closed vertex loop of the complex."""
        edge_index = self._edge_index
        nodes = list(loop)
        for a, b in zip(loop, list(loop[1:]) + list(loop[:1])):
            nodes.extend(self.edge_nodes(edge_index[(min(a, b), max(a, b))]))
        return nodes

    def distances_from(self, sources: Sequence[int]) -> np.ndarray:
        return csgraph.dijkstra(self.graph, indices=list(sources), min_only=True)


def load_mesh(data: bytes | str) -> Mesh:
    """Parse a mesh document (JSON, see README) or a plain OFF file."""
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise MeshParseError(f"not UTF-8 text: {exc}") from None
    text = data.lstrip()
    if text.startswith("OFF"):
        return _load_off(text)
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MeshParseError(f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise MeshParseError("document must be a JSON object")
    version = doc.get("version")
    if version != FORMAT_VERSION:
        raise MeshParseError(f"unsupported format version {version!r}")
    if "faces" not in doc:
        raise MeshParseError("missing 'faces'")
    spin = doc.get("spin")
    if spin is not None and not isinstance(spin, dict):
        raise MeshParseError("'spin' must be an object")
    lengths = doc.get("edge_lengths")
    if lengths is not None:
        try:
            lengths = [(int(i), int(j), float(x)) for i, j, x in lengths]
        except (TypeError, ValueError):
            raise MeshParseError("edge_lengths rows must be [i, j, length]") from None
    return Mesh(doc["faces"], positions=doc.get("positions"), edge_lengths=lengths, spin=spin)


def _load_off(text: str) -> Mesh:
    tokens = [ln.split("#")[0].split() for ln in text.splitlines()]
    tokens = [t for t in tokens if t]
    head = tokens[0]
    try:
        if head == ["OFF"]:
            counts = tokens[1]
            body = tokens[2:]
        else:
            counts = head[1:]
            body = tokens[1:]
        nv, nf = int(counts[0]), int(counts[1])
        pos = [[float(x) for x in row[:3]] for row in body[:nv]]
        faces = []
        for row in body[nv:nv + nf]:
            if int(row[0]) != 3:
                raise MeshParseError("only triangular OFF faces are supported")
            faces.append([int(x) for x in row[1:4]])
    except (IndexError, ValueError):
        raise MeshParseError("malformed OFF file") from None
    if len(pos) != nv or len(faces) != nf:
        raise MeshParseError("OFF file is truncated")
    return Mesh(faces, positions=pos)


def dump_mesh(m: Mesh, spin: dict | None = None) -> str:
    """Serialize to the JSON mesh document format."""
    doc: dict = {"version": FORMAT_VERSION, "faces": m.faces.tolist()}
    if m.positions is not None:
        doc["positions"] = m.positions.tolist()
    else:
        doc["edge_lengths"] = [[int(i), int(j), float(x)] for (i, j), x in zip(m.edges, m.lengths)]
    spin = spin if spin is not None else m.spin
    if spin is not None:
        doc["spin"] = spin
    return json.dumps(doc, sort_keys=True)
