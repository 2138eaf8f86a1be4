"""Region primitives: bigons, triangular regions, rectangular regions.

All searches work symbolically with lifts to the universal cover. Since every
vertex of the triangulation is on the boundary, the dual graph of the cover is
a tree; a closed boundary walk made of member segments bounds an embedded disc
iff its crossing word reduces to the trivial word and its corner turns are
consistently handed. Lifted strands of distinct members cross at most once, so
segments between corners never re-cross and corner data pins the region.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .overlay import Crossing, Overlay, OverlayError
from .paths import Step, inverse_step, reduce_word

# A location on a member: a crossing, or an arc endpoint.
#   ("x", Crossing)            interior intersection point
#   ("end", which)             arc endpoint: 0 = start mark, 1 = end mark
Loc = Tuple


class RegionError(ValueError):
    pass


def word_is_trivial(word: Sequence[Step]) -> bool:
    return not reduce_word(word)


def _loc_position(o: Overlay, mi: int, loc: Loc):
    """(visit, param) of a location along member mi; endpoints at +-inf."""
    m = o.members[mi]
    if loc[0] == "x":
        c: Crossing = loc[1]
        return (c.visit_of(mi), c.param_of(mi))
    if m.kind != "arc":
        raise RegionError("closed members have no endpoints")
    if loc[1] == 0:
        return (0, -1)
    return (m.n_visits - 1, 2)


def segment_word(o: Overlay, mi: int, a: Loc, b: Loc, wind: int = 0) -> Optional[List[Step]]:
    """Crossing word of member mi travelled from location a to location b.

    Arcs: wind must be 0; direction is whatever order the locations sit in.
    Closed members: wind selects the route: 0, 1, 2... = forward with extra
    full turns, -1, -2, ... = backward with extra turns.
    """
    m = o.members[mi]
    if m.kind == "arc":
        if wind != 0:
            return None
        (va, pa) = _loc_position(o, mi, a)
        (vb, pb) = _loc_position(o, mi, b)
        if (va, pa) == (vb, pb):
            return []
        if (va, pa) < (vb, pb):
            return list(m.steps[va:vb])
        return [inverse_step(st) for st in reversed(m.steps[vb:va])]
    L = len(m.steps)
    (va, pa) = _loc_position(o, mi, a)
    (vb, pb) = _loc_position(o, mi, b)
    if wind >= 0:
        n0 = (vb - va) % L
        if n0 == 0 and not pb > pa:
            n0 = L
        if (va, pa) == (vb, pb):
            n0 = 0
        n = n0 + wind * L
        return [m.steps[(va + i) % L] for i in range(n)]
    n0 = (va - vb) % L
    if n0 == 0 and not pb < pa:
        n0 = L
    if (va, pa) == (vb, pb):
        n0 = 0
    n = n0 + (-wind - 1) * L
    return [inverse_step(m.steps[(va - 1 - i) % L]) for i in range(n)]


def segment_direction(o: Overlay, mi: int, a: Loc, b: Loc, wind: int = 0) -> int:
    """Direction (+1 forward / -1 backward) of travel from a to b along mi."""
    m = o.members[mi]
    if m.kind == "closed":
        return +1 if wind >= 0 else -1
    return +1 if _loc_position(o, mi, a) < _loc_position(o, mi, b) else -1


def _loc_visit_dir(o: Overlay, mi: int, loc: Loc, direction: int) -> Tuple[int, int, int]:
    """(member, visit, dir) triple naming the chord germ at loc heading `direction`."""
    v, _ = _loc_position(o, mi, loc)
    return (mi, v, direction)


# ----------------------------------------------------------------------
# Generic polygonal region finder


@dataclass
class Region:
    """Embedded polygonal region bounded by member segments.

    corners[i] sits between side i-1 and side i; side i runs along
    members[i] from corners[i] to corners[i+1] with winding winds[i].
    orientation +1 means the boundary as listed is a counterclockwise
    traversal (region on the left).
    """

    members: Tuple[int, ...]
    corners: Tuple[Loc, ...]
    winds: Tuple[int, ...]
    orientation: int
    depth_used: int = 0

    def side_dirs(self, o: Overlay) -> List[int]:
        n = len(self.members)
        return [
            segment_direction(o, self.members[i], self.corners[i],
                              self.corners[(i + 1) % n], self.winds[i])
            for i in range(n)
        ]


def polygon_region(o: Overlay, members: Sequence[int], corners: Sequence[Loc],
                   winds: Sequence[int]) -> Optional[Region]:
    """Validate a candidate polygonal region; returns it with orientation.

    The boundary walk is side i = members[i] from corners[i] to corners[i+1].
    Conditions: the total crossing word is null-homotopic and all corner turns
    share one handedness.
    """
    n = len(members)
    word: List[Step] = []
    dirs: List[int] = []
    for i in range(n):
        seg = segment_word(o, members[i], corners[i], corners[(i + 1) % n], winds[i])
        if seg is None:
            return None
        # Zero-length sides would degenerate the polygon.
        if not seg and _loc_position(o, members[i], corners[i]) == _loc_position(
                o, members[i], corners[(i + 1) % n]):
            return None
        word.extend(seg)
        dirs.append(segment_direction(o, members[i], corners[i], corners[(i + 1) % n], winds[i]))
    if not word_is_trivial(word):
        return None
    turn = 0
    for i in range(n):
        arrive = _loc_visit_dir(o, members[i - 1], corners[i], dirs[i - 1])
        depart = _loc_visit_dir(o, members[i], corners[i], dirs[i])
        t = o.turn_sign(corners[i], arrive, depart)
        if turn == 0:
            turn = t
        elif t != turn:
            return None
    return Region(tuple(members), tuple(corners), tuple(winds), turn)


# ----------------------------------------------------------------------
# Triangular regions


@dataclass
class TriangularRegion:
    """Immersed triangle of the triple (alpha, gamma, gamma_image).

    v: corner on gamma x image, a: corner on alpha x gamma, p: corner on
    alpha x image. classification: "upward" or "downward". The key (a, p)
    groups regions into the equivalence classes used by coarsening.
    """

    v: Loc
    a: Crossing
    p: Crossing
    classification: str
    wind: int
    region: Region

    @property
    def essential(self) -> bool:
        return True  # minimal overlays only produce essential regions


def find_triangular_regions(o: Overlay, alpha_i: int, g_i: int, img_i: int,
                            depth: int = 2, vertices: Optional[Iterable[Loc]] = None,
                            ) -> List[TriangularRegion]:
    """All triangular regions of (alpha, g, img) in the minimal overlay.

    `depth` bounds how many extra full turns of a closed alpha the side along
    alpha may take. `vertices` restricts the corner v (defaults to every
    crossing of g with img plus shared endpoints).
    """
    g = o.members[g_i]
    img = o.members[img_i]
    out: List[TriangularRegion] = []
    if vertices is None:
        vs: List[Loc] = [("x", c) for c in o.crossings_of_pair(g_i, img_i)]
        if g.kind == "arc" and img.kind == "arc":
            if g.start == img.start:
                vs.append(("end", 0))
            if g.end == img.end:
                vs.append(("end", 1))
    else:
        vs = list(vertices)
    a_list = o.crossings_of_pair(alpha_i, g_i)
    p_list = o.crossings_of_pair(alpha_i, img_i)
    winds = list(range(-depth, depth + 1))
    for v in vs:
        for a in a_list:
            for p in p_list:
                for w in winds:
                    # Boundary walk: v ->(g)-> a ->(alpha)-> p ->(img)-> v.
                    reg = polygon_region(
                        o, (g_i, alpha_i, img_i),
                        (v, ("x", a), ("x", p)), (0, w, 0))
                    if reg is None:
                        continue
                    cls = "upward" if reg.orientation == +1 else "downward"
                    out.append(TriangularRegion(v, a, p, cls, w, reg))
    return out


def vertex_classification(regions: Sequence[TriangularRegion]) -> Dict[Loc, str]:
    """upward/downward/mixed per corner v; minimal overlays must have no mixed."""
    seen: Dict[Loc, str] = {}
    for r in regions:
        key = _loc_key(r.v)
        if key not in seen:
            seen[key] = r.classification
        elif seen[key] != r.classification:
            seen[key] = "mixed"
    return seen


def _loc_key(loc: Loc):
    if loc[0] == "x":
        return ("x", loc[1].index)
    return loc


# ----------------------------------------------------------------------
# Rectangular regions


def find_rect_regions(o: Overlay, members: Sequence[int], depth: int = 2,
                      corner0: Optional[Loc] = None) -> List[Region]:
    """Embedded quadrilaterals with side i on members[i].

    Corners are crossings of cyclically consecutive members (or shared arc
    endpoints). `depth` bounds windings along closed members. When `corner0`
    is given only quads with that first corner are returned. Results are
    deterministic: ordered by corner keys.
    """
    m0, m1, m2, m3 = members

    def corner_candidates(mi: int, mj: int) -> List[Loc]:
        cands: List[Loc] = [("x", c) for c in o.crossings_of_pair(mi, mj)]
        a, b = o.members[mi], o.members[mj]
        if a.kind == "arc" and b.kind == "arc":
            for which, (ma, mb) in enumerate(((a.start, b.start), (a.end, b.end))):
                if ma == mb:
                    cands.append(("end", which))
        return cands

    def windings(mi: int) -> List[int]:
        if o.members[mi].kind == "arc":
            return [0]
        return list(range(-depth, depth + 1))

    out: List[Region] = []
    c0s = [corner0] if corner0 is not None else corner_candidates(m3, m0)
    for c0 in c0s:
        for c1 in corner_candidates(m0, m1):
            for c2 in corner_candidates(m1, m2):
                for c3 in corner_candidates(m2, m3):
                    for w0 in windings(m0):
                        for w1 in windings(m1):
                            for w2 in windings(m2):
                                for w3 in windings(m3):
                                    reg = polygon_region(
                                        o, members, (c0, c1, c2, c3),
                                        (w0, w1, w2, w3))
                                    if reg is not None:
                                        reg.depth_used = max(
                                            abs(w) for w in (w0, w1, w2, w3))
                                        out.append(reg)
    out.sort(key=lambda r: tuple(_loc_key(c) for c in r.corners))
    return out


# ----------------------------------------------------------------------
# Universal cover window (explicit, for inspection and tests)


@dataclass
class CoverWindow:
    """Ball of given radius in the dual tree of the universal cover."""

    base: int
    depth: int
    nodes: List[Tuple[Step, ...]] = field(default_factory=list)
    triangle: Dict[Tuple[Step, ...], int] = field(default_factory=dict)
    lifted_segments: List[List[Tuple[Tuple[Step, ...], int, int]]] = field(default_factory=list)


def universal_cover_window(o: Overlay, base: int, depth: int) -> CoverWindow:
    """Lift the overlay to all triangles within dual distance `depth` of base.

    Nodes of the window are named by the reduced crossing word leading to them
    from the base triangle. Lifted member segments are maximal chains of
    visits compatible across window edges; a lift of a closed member never
    closes up (the window is simply connected).
    """
    from .paths import step_faces
    from .surfaces import Surface

    surface = o.surface
    win = CoverWindow(base, depth)
    frontier = [((), base)]
    win.nodes.append(())
    win.triangle[()] = base
    for _ in range(depth):
        nxt = []
        for path, tri in frontier:
            for s in range(3):
                side = (tri, s)
                if surface.is_boundary(side):
                    continue
                e = surface.edge_index(side)
                sign = +1 if surface.edge_sides(e)[1] != side else -1
                st: Step = (e, sign)
                if path and path[-1] == inverse_step(st):
                    continue
                new_path = path + (st,)
                _, dst = step_faces(surface, st)
                win.nodes.append(new_path)
                win.triangle[new_path] = dst
                nxt.append((new_path, dst))
        frontier = nxt

    node_set = set(win.nodes)
    # Lift member visits: a lifted visit is (node, mi, vi); consecutive visits
    # link when the node extended by the crossing step stays in the window.
    links: Dict[Tuple, Tuple] = {}
    has_pred: set = set()
    lifted: List[Tuple] = []
    for mi, m in enumerate(o.members):
        for node in win.nodes:
            tri = win.triangle[node]
            for vi in range(m.n_visits):
                if m.visit_triangle(vi) != tri:
                    continue
                lifted.append((node, mi, vi))
                k = m.visit_exit_step(vi)
                if k is None:
                    continue
                ext = _extend(node, m.steps[k])
                if ext not in node_set:
                    continue
                nvi = vi + 1 if m.kind == "arc" else (vi + 1) % len(m.steps)
                links[(node, mi, vi)] = (ext, mi, nvi)
                has_pred.add((ext, mi, nvi))
    segments: List[List[Tuple]] = []
    for item in lifted:
        if item in has_pred:
            continue
        chain = [item]
        while chain[-1] in links:
            chain.append(links[chain[-1]])
        segments.append(chain)
    win.lifted_segments = segments
    return win


def _extend(path: Tuple[Step, ...], st: Step) -> Tuple[Step, ...]:
    if path and path[-1] == inverse_step(st):
        return path[:-1]
    return path + (st,)
