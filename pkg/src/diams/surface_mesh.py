"""Bilinear patches per quadrangle, tessellation and OBJ export.

Each quad of an asymptotic net carries the hyperbolic-paraboloid patch
obtained by bilinear interpolation of its four corners.  For nets built
from a difference-form co-normal field, adjacent patches share tangent
planes along their common edges, so the tessellated surface looks C^1.
"""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import _kernels
from .errors import IoFailure, ParameterOutOfRange, SharedEdgeMismatch


@dataclass(frozen=True)
class BilinearPatch:
    """Four corner points in (c00, c10, c01, c11) order, i.e. the net
    vertices at (u,v), (u+1,v), (u,v+1), (u+1,v+1)."""

    corners: np.ndarray

    def __post_init__(self):
        c = np.ascontiguousarray(self.corners, dtype=np.float64)
        if c.shape != (4, 3):
            raise ParameterOutOfRange("corners must be a (4, 3) array")
        object.__setattr__(self, "corners", c)

    def point(self, s, t):
        return bilinear_point(self, s, t)

    def tangents(self, s, t):
        """Parameter derivatives (dF/ds, dF/dt) at (s, t)."""
        c00, c10, c01, c11 = self.corners
        ds = (c10 - c00) * (1.0 - t) + (c11 - c01) * t
        dt = (c01 - c00) * (1.0 - s) + (c11 - c10) * s
        return ds, dt


def patch_for_quad(f, quad):
    u, v = quad
    f.domain.require_quad(u, v)
    return BilinearPatch(np.stack([
        f.position(u, v), f.position(u + 1, v),
        f.position(u, v + 1), f.position(u + 1, v + 1)]))


def bilinear_point(patch, s, t):
    """(1-s)(1-t) c00 + s(1-t) c10 + (1-s)t c01 + st c11."""
    if not (0.0 <= s <= 1.0 and 0.0 <= t <= 1.0):
        raise ParameterOutOfRange(f"(s, t) = ({s}, {t}) outside the unit square")
    c00, c10, c01, c11 = patch.corners
    return (c00 * ((1.0 - s) * (1.0 - t)) + c10 * (s * (1.0 - t))
            + c01 * ((1.0 - s) * t) + c11 * (s * t))


_EDGES = {
    "s0": ((0, 2), lambda r: (0.0, r)),   # corners c00 -> c01, parameter t
    "s1": ((1, 3), lambda r: (1.0, r)),
    "t0": ((0, 1), lambda r: (r, 0.0)),   # corners c00 -> c10, parameter s
    "t1": ((2, 3), lambda r: (r, 1.0)),
}


def compatibility_residual(p1, p2, shared_edge, samples=9):
    """Largest angle between the two patches' tangent planes along a
    shared edge.

    shared_edge is a pair of edge tags from {s0, s1, t0, t1}, the first
    naming the edge of p1 and the second the matching edge of p2; the
    named edges must carry identical corner points in the same order.
    Normal directions are compared as unsigned lines because the net may
    fold across a singular edge.
    """
    if samples < 2:
        raise ParameterOutOfRange("need at least 2 edge samples")
    tag1, tag2 = shared_edge
    try:
        (i1, j1), par1 = _EDGES[tag1]
        (i2, j2), par2 = _EDGES[tag2]
    except KeyError as e:
        raise ParameterOutOfRange(f"unknown edge tag {e}") from None
    if not (np.array_equal(p1.corners[i1], p2.corners[i2])
            and np.array_equal(p1.corners[j1], p2.corners[j2])):
        raise SharedEdgeMismatch(
            f"edge {tag1} of the first patch does not equal edge {tag2} "
            "of the second")
    worst = 0.0
    for r in np.linspace(0.0, 1.0, samples):
        n1 = np.cross(*p1.tangents(*par1(r)))
        n2 = np.cross(*p2.tangents(*par2(r)))
        cr = float(np.linalg.norm(np.cross(n1, n2)))
        dt = abs(float(np.dot(n1, n2)))
        angle = float(np.arctan2(cr, dt))
        worst = max(worst, min(angle, np.pi - angle))
    return worst


class MeshPolyline(NamedTuple):
    indices: tuple
    closed: bool


@dataclass(frozen=True)
class TriangleMesh:
    vertices: np.ndarray        # (N, 3)
    triangles: np.ndarray       # (M, 3) int, indices into vertices
    quad_tags: tuple            # per-triangle (u, v) quad key
    polylines: tuple            # MeshPolyline records


def tessellate(f, subdiv, singular=()):
    """Sample every quad's bilinear patch on a (subdiv+1)^2 grid and
    triangulate.

    Sub-quads are split along their (s+t) anti-diagonal; boundary samples
    of adjacent patches evaluate from the same corner data with the same
    weights, so shared edges match bit-for-bit.  Singular polylines are
    carried through as index chains over the mesh vertices.
    """
    if subdiv < 1:
        raise ParameterOutOfRange(f"subdiv must be >= 1, got {subdiv}")
    dom = f.domain
    grid = _kernels.bilinear_sample(f.positions, subdiv)
    nq_u, nq_v = grid.shape[0], grid.shape[1]
    block = (subdiv + 1) ** 2
    vertices = grid.reshape(-1, 3)
    scale = max(1e-300, float(np.abs(vertices).max()))
    area_floor = 1e-14 * scale * scale

    triangles = []
    tags = []
    for qi in range(nq_u):
        for qj in range(nq_v):
            base = (qi * nq_v + qj) * block
            tag = (qi + dom.u_min, qj + dom.v_min)
            for si in range(subdiv):
                for ti in range(subdiv):
                    v00 = base + si * (subdiv + 1) + ti
                    v10 = v00 + (subdiv + 1)
                    v01 = v00 + 1
                    v11 = v10 + 1
                    for tri in ((v00, v10, v01), (v10, v11, v01)):
                        p0, p1, p2 = vertices[list(tri)]
                        area = 0.5 * np.linalg.norm(np.cross(p1 - p0, p2 - p0))
                        if area <= area_floor:
                            continue
                        triangles.append(tri)
                        tags.append(tag)

    def vertex_index(u, v):
        for qu, qv, si, ti in ((u, v, 0, 0), (u - 1, v, subdiv, 0),
                               (u, v - 1, 0, subdiv),
                               (u - 1, v - 1, subdiv, subdiv)):
            if dom.contains_quad(qu, qv):
                base = ((qu - dom.u_min) * nq_v + (qv - dom.v_min)) * block
                return base + si * (subdiv + 1) + ti
        raise ParameterOutOfRange(f"vertex ({u}, {v}) outside the mesh domain")

    polylines = []
    for chain in singular:
        verts = chain.vertices[:-1] if chain.closed else chain.vertices
        polylines.append(MeshPolyline(
            tuple(vertex_index(u, v) for (u, v) in verts), chain.closed))

    return TriangleMesh(vertices=vertices,
                        triangles=np.array(triangles, dtype=np.int64).reshape(-1, 3),
                        quad_tags=tuple(tags),
                        polylines=tuple(polylines))


def _fmt(x):
    return "%.17g" % x


def export_obj(mesh, path):
    """Write the mesh as Wavefront OBJ text.

    Vertices first, then one "g quad_u_v" group per quad with its faces,
    then one "l" record per singular chain (closed chains repeat their
    first index).  Output is byte-deterministic for a fixed mesh.
    """
    lines = []
    for p in mesh.vertices:
        lines.append(f"v {_fmt(p[0])} {_fmt(p[1])} {_fmt(p[2])}")
    current_tag = object()
    for tri, tag in zip(mesh.triangles, mesh.quad_tags):
        if tag != current_tag:
            lines.append(f"g quad_{tag[0]}_{tag[1]}")
            current_tag = tag
        lines.append(f"f {tri[0] + 1} {tri[1] + 1} {tri[2] + 1}")
    for pl in mesh.polylines:
        idx = list(pl.indices) + ([pl.indices[0]] if pl.closed else [])
        lines.append("l " + " ".join(str(i + 1) for i in idx))
    text = "\n".join(lines) + "\n"
    try:
        with open(path, "w", encoding="ascii") as fh:
            fh.write(text)
    except OSError as e:
        raise IoFailure(f"cannot write {path}: {e}") from e
