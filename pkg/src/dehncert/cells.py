"""Cell decomposition of an overlay: the complement of the members.

Each triangle, with its member chords, is an exact planar straight-line graph
(attachment points and triangle corners in convex position, chord crossings at
rational coordinates). Faces are traced per triangle and glued across interior
edges, yielding the components of the surface minus the members. Used to
verify that arc systems fill (cut the surface into a disc) and as an oracle
for face-based bigon searches.
"""

from __future__ import annotations

from fractions import Fraction
from functools import cmp_to_key
from typing import Dict, List, Tuple

from .overlay import Crossing, Overlay
from .paths import entry_side, exit_side

Pt = Tuple[Fraction, Fraction]


def _sub(a: Pt, b: Pt) -> Pt:
    return (a[0] - b[0], a[1] - b[1])


def _ccw_cmp(a: Pt, b: Pt) -> int:
    """Compare direction vectors counterclockwise starting just above +x."""
    def half(v: Pt) -> int:
        x, y = v
        return 0 if (y > 0 or (y == 0 and x > 0)) else 1

    ha, hb = half(a), half(b)
    if ha != hb:
        return -1 if ha < hb else +1
    cr = a[0] * b[1] - a[1] * b[0]
    if cr > 0:
        return -1
    if cr < 0:
        return +1
    return 0


def _attach_key(o: Overlay, mi: int, vi: int, end: int):
    """Vertex key of a chord endpoint (end 0 = entry, 1 = exit)."""
    m = o.members[mi]
    if end == 0:
        k = m.visit_entry_step(vi)
        if k is None:
            return ("g", mi, 0, +1)
        return ("s", mi, k, entry_side(o.surface, m.steps[k])[1])
    k = m.visit_exit_step(vi)
    if k is None:
        return ("g", mi, m.n_visits - 1, -1)
    return ("s", mi, k, exit_side(o.surface, m.steps[k])[1])


class TriangleCells:
    """Planar subdivision of one triangle by its member chords."""

    def __init__(self, o: Overlay, tri: int) -> None:
        self.tri = tri
        surface = o.surface

        # Boundary polygon: corner s, then side-s attachments along the side's
        # own direction, for s = 0, 1, 2.
        self.boundary_keys: List[object] = []
        self.corner_index: Dict[int, int] = {}
        self.side_count: Dict[int, int] = {}
        for s in range(3):
            self.corner_index[s] = len(self.boundary_keys)
            self.boundary_keys.append(("c", s))
            side = (tri, s)
            keys: List[object] = []
            if surface.is_boundary(side):
                marks = [m for m in getattr(o, "mark_germs", {}) if m.side == side]
                for mark in sorted(marks, key=lambda m: m.pos):
                    for ray in o.mark_germs[mark]:
                        keys.append(("g", ray[0], ray[1], ray[2]))
            else:
                e = surface.edge_index(side)
                order = o.edge_order.get(e, [])
                n = len(order)
                if surface.edge_sides(e)[0] == side:
                    ranked = list(order)
                else:
                    ranked = list(reversed(order))
                for mi, k in ranked:
                    keys.append(("s", mi, k, s))
            self.side_count[s] = len(keys)
            self.boundary_keys.extend(keys)

        M = len(self.boundary_keys)
        self.pos: Dict[object, Pt] = {}
        for i, key in enumerate(self.boundary_keys):
            self.pos[key] = (Fraction(i), Fraction(i * i))

        edges: List[Tuple[object, object]] = []
        for i in range(M):
            edges.append((self.boundary_keys[i], self.boundary_keys[(i + 1) % M]))

        # Chord segments between consecutive crossings.
        chord_pts: Dict[Tuple[int, int], List[Tuple[Fraction, object]]] = {}
        for (mi, vi), (t, _, _) in o.chords.items():
            if t == tri:
                chord_pts[(mi, vi)] = []
        for c in o.crossings:
            if c.tri != tri:
                continue
            key = ("x", c.index)
            chord_pts[c.a].append((c._params[0], key))
            chord_pts[c.b].append((c._params[1], key))
            pa = self.pos[_attach_key(o, c.a[0], c.a[1], 0)]
            pb = self.pos[_attach_key(o, c.a[0], c.a[1], 1)]
            s0 = c._params[0]
            self.pos[key] = (pa[0] + (pb[0] - pa[0]) * s0, pa[1] + (pb[1] - pa[1]) * s0)
        for (mi, vi), pts in chord_pts.items():
            seq = ([_attach_key(o, mi, vi, 0)]
                   + [k for _, k in sorted(pts, key=lambda x: x[0])]
                   + [_attach_key(o, mi, vi, 1)])
            for a, b in zip(seq, seq[1:]):
                edges.append((a, b))

        # Half-edge structure, faces by clockwise-next walking.
        out_edges: Dict[object, List[object]] = {}
        for a, b in edges:
            out_edges.setdefault(a, []).append(b)
            out_edges.setdefault(b, []).append(a)
        for v, nbrs in out_edges.items():
            pv = self.pos[v]
            nbrs.sort(key=cmp_to_key(
                lambda p, q: _ccw_cmp(_sub(self.pos[p], pv), _sub(self.pos[q], pv))))

        nxt: Dict[Tuple[object, object], Tuple[object, object]] = {}
        for v, nbrs in out_edges.items():
            k = len(nbrs)
            index_of = {u: i for i, u in enumerate(nbrs)}
            for u in nbrs:
                i = index_of[u]
                w = nbrs[(i - 1) % k]
                nxt[(u, v)] = (v, w)
        faces: List[List[Tuple[object, object]]] = []
        face_of: Dict[Tuple[object, object], int] = {}
        for he in list(nxt):
            if he in face_of:
                continue
            cur = he
            orbit = []
            while cur not in face_of:
                face_of[cur] = len(faces)
                orbit.append(cur)
                cur = nxt[cur]
            faces.append(orbit)
        self.faces = faces
        self.face_of = face_of
        k0, k1 = self.boundary_keys[0], self.boundary_keys[1]
        self.outer = face_of[(k1, k0)]

    def interval_face(self, s: int, k: int) -> int:
        """Face adjacent to interval k of side s (0 = before first attachment).

        Intervals count along the side's own direction.
        """
        i = self.corner_index[s] + k
        a = self.boundary_keys[i]
        b = self.boundary_keys[(i + 1) % len(self.boundary_keys)]
        return self.face_of[(a, b)]


def complement_components(o: Overlay) -> int:
    """Number of components of the surface minus all overlay members."""
    surface = o.surface
    tris = [TriangleCells(o, t) for t in range(surface.n_triangles)]

    parent: Dict[Tuple[int, int], Tuple[int, int]] = {}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x, y):
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[rx] = ry

    for t, tc in enumerate(tris):
        for f in range(len(tc.faces)):
            if f != tc.outer:
                parent[(t, f)] = (t, f)

    for e, (sa, sb) in enumerate(surface.edges):
        n = len(o.edge_order.get(e, []))
        ta, ia = sa
        tb, ib = sb
        for k in range(n + 1):
            # Interval k along the reference (first side) direction matches
            # interval n - k along the second side's own direction.
            fa = (ta, tris[ta].interval_face(ia, k))
            fb = (tb, tris[tb].interval_face(ib, n - k))
            union(fa, fb)

    return len({find(x) for x in parent})
