"""Test and demo surfaces.

Flat tori carry intrinsic edge lengths only (they do not embed
isometrically in R^3).  Each builder also returns the natural homology
generators, which fixtures store as the ``spin.basis_cycles`` block.
"""

from __future__ import annotations

import numpy as np
from scipy.spatial import ConvexHull

from .surface import Cycle, Mesh, subdivide


def lattice_torus(b1, b2, n1: int, n2: int) -> tuple[Mesh, list[Cycle]]:
    """Flat torus R^2 / (Z b1 + Z b2) triangulated by an ``n1 x n2`` grid.

    Grid steps are ``b1/n1`` and ``b2/n2``; each cell is split along the
    ``b1/n1 + b2/n2`` diagonal.  Generators run along ``b1`` then ``b2``.
    """
    if n1 < 3 or n2 < 3:
        raise ValueError("need at least 3 cells in each direction")
    b1, b2 = np.asarray(b1, float), np.asarray(b2, float)
    s1, s2 = b1 / n1, b2 / n2
    if abs(s1[0] * s2[1] - s1[1] * s2[0]) < 1e-300:
        raise ValueError("degenerate lattice")

    def vid(i, j):
        return (i % n1) + n1 * (j % n2)

    faces = []
    lengths = {}
    l1, l2, ld = np.linalg.norm(s1), np.linalg.norm(s2), np.linalg.norm(s1 + s2)
    orient = np.sign(s1[0] * s2[1] - s1[1] * s2[0])
    for j in range(n2):
        for i in range(n1):
            a, b, c, d = vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)
            tri = [(a, b, c), (a, c, d)]
            if orient < 0:
                tri = [t[::-1] for t in tri]
            faces.extend(tri)
            lengths[(a, b)] = l1
            lengths[(a, d)] = l2
            lengths[(a, c)] = ld
    basis = [Cycle(tuple(vid(i, 0) for i in range(n1))), Cycle(tuple(vid(0, j) for j in range(n2)))]
    return Mesh(faces, edge_lengths=lengths), basis


def grid_torus(n: int, width: float = 1.0, height: float = 1.0) -> tuple[Mesh, list[Cycle]]:
    """Axis-aligned ``width x height`` flat torus with ``n`` cells per unit length."""
    return lattice_torus((width, 0.0), (0.0, height), int(round(n * width)), int(round(n * height)))


def genus2_surface(n: int = 8) -> tuple[Mesh, list[Cycle]]:
    """Two unit grid tori, each with a 2x2-cell hole, glued along the holes.

    Returns the mesh and the generators ``a1, a2, b1, b2`` (row and column
    of each torus, chosen away from the hole).
    """
    if n < 6:
        raise ValueError("need n >= 6")
    h0 = n // 2 - 1
    base, basis = grid_torus(n)
    inside = set()
    for j in (h0, h0 + 1):
        for i in (h0, h0 + 1):
            inside.add(2 * (i + n * j))
            inside.add(2 * (i + n * j) + 1)
    keep = [f for f in range(base.n_faces) if f not in inside]
    center = (h0 + 1) + n * (h0 + 1)

    def vid(i, j):
        return i % n + n * (j % n)

    ring = set()
    for t in range(3):
        for x, y in ((h0 + t, h0), (h0 + t, h0 + 2), (h0, h0 + t), (h0 + 2, h0 + t)):
            ring.add((x, y))
    # copy B: vertex v -> offset; hole ring vertices glued to A's mirror image
    mirror = {vid(x, y): vid(2 * h0 + 2 - x, y) for x, y in ring}
    old_n = n * n
    mapping_b = {}
    for v in range(old_n):
        mapping_b[v] = mirror.get(v, old_n + v)
    faces = [tuple(int(x) for x in base.faces[f]) for f in keep]
    faces += [tuple(mapping_b[int(x)] for x in base.faces[f]) for f in keep]
    h = 1.0 / n
    lengths = {}
    for (i, j), ell in zip(base.edges, base.lengths):
        for mp in (lambda v: v, mapping_b.__getitem__):
            a, b = mp(int(i)), mp(int(j))
            lengths[(min(a, b), max(a, b))] = float(ell)
    del h
    used = sorted({v for f in faces for v in f})
    assert center not in used and old_n + center not in used
    relabel = {v: k for k, v in enumerate(used)}
    faces = [tuple(relabel[v] for v in f) for f in faces]
    lengths = {(relabel[a], relabel[b]): ell for (a, b), ell in lengths.items() if a in relabel and b in relabel}
    mesh = Mesh(faces, edge_lengths=lengths)

    def cyc(vs):
        return Cycle(tuple(relabel[v] for v in vs))

    row = [vid(i, 0) for i in range(n)]
    col = [vid(0, j) for j in range(n)]
    basis = [cyc(row), cyc(col), cyc([mapping_b[v] for v in row]), cyc([mapping_b[v] for v in col])]
    return mesh, basis


def icosahedron(radius: float = 1.0) -> Mesh:
    p = (1 + 5**0.5) / 2
    pts = []
    for a in (-1, 1):
        for b in (-p, p):
            pts += [(0, a, b), (a, b, 0), (b, 0, a)]
    pts = np.array(pts, dtype=float)
    pts *= radius / np.linalg.norm(pts[0])
    return Mesh(_outward_hull(pts), positions=pts)


def _outward_hull(pts: np.ndarray) -> np.ndarray:
    hull = ConvexHull(pts)
    faces = hull.simplices.copy()
    center = pts.mean(axis=0)
    for k, (a, b, c) in enumerate(faces):
        n = np.cross(pts[b] - pts[a], pts[c] - pts[a])
        if np.dot(n, pts[a] - center) < 0:
            faces[k] = (a, c, b)
    return faces


def icosphere(level: int = 4, radius: float = 1.0) -> Mesh:
    """Subdivided icosahedron projected onto the sphere (``10 * 4^L + 2`` vertices)."""
    return subdivide(icosahedron(radius), level, project_to_sphere=radius)


def torus_of_revolution_mesh(R: float, r: float, nu: int, nv: int) -> tuple[Mesh, list[Cycle]]:
    """Embedded torus ((R + r cos v) cos u, (R + r cos v) sin u, r sin v).

    Generators: the circle ``v = pi`` (inner equator, for even ``nv``) and
    the meridian ``u = 0``.
    """
    if not (r > 0 and R > r):
        raise ValueError("need R > r > 0")
    if nu < 3 or nv < 3:
        raise ValueError("need nu, nv >= 3")
    u = 2 * np.pi * np.arange(nu) / nu
    v = 2 * np.pi * np.arange(nv) / nv
    U, V = np.meshgrid(u, v, indexing="ij")
    pos = np.stack([(R + r * np.cos(V)) * np.cos(U), (R + r * np.cos(V)) * np.sin(U), r * np.sin(V)], axis=-1)
    pos = pos.reshape(-1, 3)

    def vid(i, j):
        return (i % nu) * nv + (j % nv)

    faces = []
    for i in range(nu):
        for j in range(nv):
            a, b, c, d = vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)
            faces += [(a, b, c), (a, c, d)]
    jm = nv // 2
    basis = [Cycle(tuple(vid(i, jm) for i in range(nu))), Cycle(tuple(vid(0, j) for j in range(nv)))]
    return Mesh(faces, positions=pos), basis


def spin_block(basis: list[Cycle], q_values) -> dict:
    return {"basis_cycles": [list(c.vertices) for c in basis], "q_values": [int(x) for x in q_values]}
