"""Canonical minimal-position overlays.

Members (reduced traced paths) are placed simultaneously in pairwise minimal
position. Positions of crossings along every interior edge are *derived*, not
stored: two strands crossing the same edge are ordered by where their
itineraries diverge (the combinatorial shadow of placing every member
geodesically). Two lifts of reduced members to the universal cover cross at
most once under this order, so no pair of members bounds a bigon and pairwise
crossing counts are geometric intersection numbers.

Inside each triangle a strand is a chord between two boundary points; the
boundary points are realized at exact integer coordinates in convex position,
which makes crossing tests, crossing signs and the order of crossings along a
chord exact integer geometry.
"""

from __future__ import annotations

from fractions import Fraction
from functools import cmp_to_key
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .paths import Mark, PathError, TracedPath, entry_side, exit_side
from .surfaces import Side, Surface

Ray = Tuple[int, int, int]  # (member index, visit index, direction +1/-1)

# Global orientation convention for crossing signs; fixed by the requirement
# that the interior intersections of gamma with its image under one positive
# twist are positive (see tests). +1 keeps cross(chord_a, chord_b) > 0 => +1.
SIGN_CONVENTION = +1


class OverlayError(ValueError):
    """Member set cannot be placed (non-embedded member, bad surface, ...)."""


class Crossing:
    """Transverse intersection of two member strands inside one triangle."""

    __slots__ = ("index", "tri", "a", "b", "sign", "_params")

    def __init__(self, index: int, tri: int, a: Tuple[int, int], b: Tuple[int, int],
                 sign: int, params: Tuple[Fraction, Fraction]) -> None:
        self.index = index
        self.tri = tri
        self.a = a  # (member, visit)
        self.b = b
        self.sign = sign  # sign of frame (dir a, dir b)
        self._params = params  # position along a's chord, along b's chord

    def members(self) -> Tuple[int, int]:
        return self.a[0], self.b[0]

    def end_for(self, mi: int) -> Tuple[int, int]:
        if self.a[0] == mi:
            return self.a
        if self.b[0] == mi:
            return self.b
        raise KeyError(mi)

    def visit_of(self, mi: int) -> int:
        return self.end_for(mi)[1]

    def param_of(self, mi: int) -> Fraction:
        if self.a[0] == mi:
            return self._params[0]
        if self.b[0] == mi:
            return self._params[1]
        raise KeyError(mi)

    def sign_for(self, mi_first: int) -> int:
        """Crossing sign with `mi_first`'s strand taken first in the frame."""
        return self.sign if self.a[0] == mi_first else -self.sign

    def other(self, mi: int) -> int:
        a, b = self.members()
        return b if mi == a else a

    def __repr__(self) -> str:
        return f"Crossing#{self.index}(T{self.tri} {self.a}x{self.b} sign {self.sign})"


class Overlay:
    """Simultaneous minimal position placement of a set of members."""

    def __init__(self, surface: Surface, members: Sequence[TracedPath],
                 check_embedded: bool = True) -> None:
        for m in members:
            if m.surface is not surface:
                raise OverlayError("member on a different surface")
        self.surface = surface
        self.members: Tuple[TracedPath, ...] = tuple(members)
        self._cmp_memo: Dict[Tuple[Ray, Ray], int] = {}
        self._build()
        if check_embedded:
            for i, m in enumerate(self.members):
                if self.self_crossings(i):
                    raise OverlayError(f"member {m.name or i} is not embedded")
                if m.kind == "closed" and _is_proper_power(m.steps):
                    raise OverlayError(f"member {m.name or i} is a proper power")

    # ------------------------------------------------------------------
    # Rays and the divergence comparator

    def _ray_portal(self, ray: Ray):
        mi, vi, d = ray
        m = self.members[mi]
        k = m.visit_entry_step(vi) if d == +1 else m.visit_exit_step(vi)
        if k is None:
            mark = m.start if d == +1 else m.end
            return ("mark", mark)
        st = m.steps[k]
        side = entry_side(self.surface, st) if d == +1 else exit_side(self.surface, st)
        return ("side", side)

    def _ray_event(self, ray: Ray):
        """Outgoing event of the ray from its current triangle.

        Returns ('end', mark) or ('exit', side, next_ray).
        """
        mi, vi, d = ray
        m = self.members[mi]
        if d == +1:
            k = m.visit_exit_step(vi)
            if k is None:
                return ("end", m.end)
            st = m.steps[k]
            side = exit_side(self.surface, st)
            nvi = vi + 1 if m.kind == "arc" else (vi + 1) % len(m.steps)
            return ("exit", side, (mi, nvi, +1))
        k = m.visit_entry_step(vi)
        if k is None:
            return ("end", m.start)
        st = m.steps[k]
        side = entry_side(self.surface, st)
        nvi = vi - 1 if m.kind == "arc" else (vi - 1) % len(m.steps)
        return ("exit", side, (mi, nvi, -1))

    def _event_segment(self, portal, tri: int, event) -> Tuple[int, object]:
        """Rank of an event around the triangle, increasing to the left."""
        if portal[0] == "side":
            s = portal[1][1]
            if event[0] == "exit":
                x = event[1][1]
                return ((x - s) % 3 - 1, None)
            mark: Mark = event[1]
            seg = (mark.side[1] - s) % 3 - 1
            if seg < 0:
                raise OverlayError("arc ends on the side it entered")
            return (seg, mark.pos)
        mark0: Mark = portal[1]
        b = mark0.side[1]
        if event[0] == "exit":
            x = event[1][1]
            return ((x - b) % 3, None)
        mark = event[1]
        if mark.side[1] == b and mark.side[0] == tri:
            if mark.pos == mark0.pos:
                raise OverlayError("degenerate arc returning to its own endpoint")
            return ((0, mark.pos) if mark.pos > mark0.pos else (3, mark.pos))
        return ((mark.side[1] - b) % 3, mark.pos)

    def _cmp_enter(self, ra: Ray, rb: Ray, depth: int) -> int:
        """-1 when ra runs to the left of rb, as seen entering their shared portal."""
        if ra == rb:
            return 0
        key = (ra, rb)
        if key in self._cmp_memo:
            return self._cmp_memo[key]
        result = self._cmp_enter_raw(ra, rb, depth)
        self._cmp_memo[key] = result
        self._cmp_memo[(rb, ra)] = -result
        return result

    def _cmp_enter_raw(self, ra: Ray, rb: Ray, depth: int) -> int:
        if depth <= 0:
            return 0  # parallel beyond any divergence bound
        c, nu, nv = self._step_once(ra, rb)
        if c is None:
            return 0
        if c:
            return c
        return self._cmp_enter(nu, nv, depth - 1)

    def _step_once(self, ru: Ray, rv: Ray):
        """One lockstep triangle advance of two co-travelling rays.

        Returns (cmp, next_ru, next_rv): cmp -1/+1 when they diverge here
        (-1 = ru exits to the left), cmp 0 and advanced rays when they stay
        together, cmp None when both terminate at the same mark.
        """
        pa = self._ray_portal(ru)
        pb = self._ray_portal(rv)
        if pa != pb:
            raise OverlayError(f"rays {ru},{rv} do not share a portal")
        tri = self.members[ru[0]].visit_triangle(ru[1])
        ea = self._ray_event(ru)
        eb = self._ray_event(rv)
        sa = self._event_segment(pa, tri, ea)
        sb = self._event_segment(pb, tri, eb)
        if sa[0] != sb[0]:
            return (-1 if sa[0] > sb[0] else +1), None, None
        if ea[0] == "end" and eb[0] == "end":
            if ea[1] == eb[1]:
                return None, None, None
            return (-1 if sa[1] > sb[1] else +1), None, None
        if ea[0] == "end" or eb[0] == "end":
            raise OverlayError("mark and crossing on one side")
        return 0, ea[2], eb[2]

    def _cmp_bidirectional(self, rBu: Ray, rBv: Ray, rAu: Ray, rAv: Ray,
                           budget: int) -> int:
        """Order along the edge's reference direction by nearest divergence.

        Both sides of the edge are walked in lockstep (reference-face-1 side
        first at equal distance); the first divergence decides. Left as seen
        entering the far face means a later reference position, left entering
        the near face an earlier one. This is the comparison of boundary
        coordinates of geodesic-like strands, hence transitive and crossing
        each pair of lifts at most once.
        """
        b_alive = a_alive = True
        while budget > 0 and (b_alive or a_alive):
            if b_alive:
                c, nu, nv = self._step_once(rBu, rBv)
                if c is None:
                    b_alive = False
                elif c:
                    return -c
                else:
                    rBu, rBv = nu, nv
            if a_alive:
                c, nu, nv = self._step_once(rAu, rAv)
                if c is None:
                    a_alive = False
                elif c:
                    return c
                else:
                    rAu, rAv = nu, nv
            budget -= 1
        return 0

    def _divergence_budget(self) -> int:
        return 2 * sum(max(1, len(m.steps)) for m in self.members) + 8

    # ------------------------------------------------------------------
    # Placement

    def _build(self) -> None:
        surface = self.surface
        budget = self._divergence_budget()

        # Strands crossing each interior edge.
        per_edge: Dict[int, List[Tuple[int, int]]] = {}
        for mi, m in enumerate(self.members):
            for k, st in enumerate(m.steps):
                per_edge.setdefault(st[0], []).append((mi, k))

        def rays_of(strand: Tuple[int, int]) -> Tuple[Ray, Ray]:
            """(ray toward the edge's second face, ray toward the first face)."""
            mi, k = strand
            m = self.members[mi]
            nvis = m.n_visits
            after = k + 1 if m.kind == "arc" else (k + 1) % len(m.steps)
            if m.steps[k][1] == +1:
                return (mi, after, +1), (mi, k, -1)
            return (mi, k, -1), (mi, after, +1)

        def cmp_pos(u: Tuple[int, int], v: Tuple[int, int]) -> int:
            if u == v:
                return 0
            ub, ua = rays_of(u)
            vb, va = rays_of(v)
            r = self._cmp_bidirectional(ub, vb, ua, va, budget)
            if r:
                return r
            # Fully parallel strands: place the smaller member to the left of
            # its own traversal direction, consistently across all edges.
            if u[0] == v[0]:
                return -1 if u[1] < v[1] else +1  # proper power; rejected later
            small = u if u[0] < v[0] else v
            sigma = self.members[small[0]].steps[small[1]][1]
            if sigma == +1:
                return +1 if u is small else -1
            return -1 if u is small else +1

        self.edge_order: Dict[int, List[Tuple[int, int]]] = {}
        self.edge_rank: Dict[Tuple[int, int, int], int] = {}
        for e, strands in per_edge.items():
            strands.sort(key=cmp_to_key(cmp_pos))
            self.edge_order[e] = strands
            for r, (mi, k) in enumerate(strands):
                self.edge_rank[(e, mi, k)] = r

        # Germ order at marks.
        germs: Dict[Mark, List[Tuple[Ray, int]]] = {}
        for mi, m in enumerate(self.members):
            if m.kind != "arc":
                continue
            germs.setdefault(m.start, []).append(((mi, 0, +1), mi))
            germs.setdefault(m.end, []).append(((mi, m.n_visits - 1, -1), mi))
        def germ_cmp(a: Tuple[Ray, int], b: Tuple[Ray, int]) -> int:
            if a[0] == b[0]:
                return 0
            r = self._cmp_enter(a[0], b[0], budget)
            if r:
                return r
            # Parallel duplicate arcs: same chirality rule as cmp_pos; a start
            # germ looks along the traversal, an end germ against it.
            ga, gb = a[0], b[0]
            if ga[0] == gb[0]:
                raise OverlayError("arc with both endpoints at one marked point")
            small = ga if ga[0] < gb[0] else gb
            first_if_start = -1 if small is ga else +1
            return first_if_start if small[2] == +1 else -first_if_start

        self.germ_rank: Dict[Ray, int] = {}
        self.mark_germs: Dict[Mark, List[Ray]] = {}
        for mark, lst in germs.items():
            lst.sort(key=cmp_to_key(germ_cmp))
            self.mark_germs[mark] = [ray for ray, _ in lst]
            for r, (ray, _) in enumerate(lst):
                self.germ_rank[ray] = r

        # Per-triangle attachment ranks and chords.
        self._tri_rank: Dict[Tuple, int] = {}  # attachment key -> rank within triangle
        self._tri_points: Dict[int, int] = {}  # triangle -> number of attachments
        tri_attach: Dict[int, List[Tuple]] = {t: [] for t in range(surface.n_triangles)}

        marks_by_side: Dict[Side, List[Mark]] = {}
        for mark in germs:
            marks_by_side.setdefault(mark.side, []).append(mark)

        for t in range(surface.n_triangles):
            pts: List[Tuple[Tuple, Tuple]] = []  # (sortkey, attachment key)
            for s in range(3):
                side = (t, s)
                if surface.is_boundary(side):
                    for mark in sorted(marks_by_side.get(side, []), key=lambda m: m.pos):
                        for ray in self.mark_germs[mark]:
                            pts.append(((s, mark.pos, self.germ_rank[ray]),
                                        ("g", ray[0], ray[1], ray[2])))
                else:
                    e = surface.edge_index(side)
                    order = self.edge_order.get(e, [])
                    n = len(order)
                    first = surface.edge_sides(e)[0] == side
                    for r, (mi, k) in enumerate(order):
                        coord = r if first else n - 1 - r
                        pts.append(((s, coord, 0), ("s", mi, k, s)))
            pts.sort()
            for rank, (_, key) in enumerate(pts):
                self._tri_rank[(t,) + key] = rank
            self._tri_points[t] = len(pts)

        # Chords per triangle: (member, visit) -> (rank_in, rank_out).
        self.chords: Dict[Tuple[int, int], Tuple[int, int, int]] = {}
        tri_children: Dict[int, List[Tuple[int, int]]] = {}
        for mi, m in enumerate(self.members):
            for vi in range(m.n_visits):
                t = m.visit_triangle(vi)
                k_in = m.visit_entry_step(vi)
                k_out = m.visit_exit_step(vi)
                if k_in is None:
                    key_in = ("g", mi, 0, +1)
                else:
                    st = m.steps[k_in]
                    key_in = ("s", mi, k_in, entry_side(surface, st)[1])
                if k_out is None:
                    key_out = ("g", mi, m.n_visits - 1, -1)
                else:
                    st = m.steps[k_out]
                    key_out = ("s", mi, k_out, exit_side(surface, st)[1])
                rin = self._tri_rank[(t,) + key_in]
                rout = self._tri_rank[(t,) + key_out]
                self.chords[(mi, vi)] = (t, rin, rout)
                tri_children.setdefault(t, []).append((mi, vi))

        # Crossings: exact chord geometry on points in convex position.
        self.crossings: List[Crossing] = []
        self._by_pair: Dict[Tuple[int, int], List[Crossing]] = {}
        self._by_member: Dict[int, List[Crossing]] = {mi: [] for mi in range(len(self.members))}
        for t, children in sorted(tri_children.items()):
            for i in range(len(children)):
                for j in range(i + 1, len(children)):
                    a = children[i]
                    b = children[j]
                    rec = self._chord_crossing(t, a, b)
                    if rec is not None:
                        self.crossings.append(rec)
        self.crossings.sort(key=lambda c: (c.a, c._params[0]))
        for idx, c in enumerate(self.crossings):
            c.index = idx
            pair = tuple(sorted(c.members()))
            self._by_pair.setdefault(pair, []).append(c)
            self._by_member[c.a[0]].append(c)
            if c.b[0] != c.a[0]:
                self._by_member[c.b[0]].append(c)

        for mi in self._by_member:
            self._by_member[mi].sort(
                key=lambda c, mi=mi: (c.visit_of(mi), c.param_of(mi)))

    def _pt(self, rank: int) -> Tuple[int, int]:
        return (rank, rank * rank)  # convex position, exact integer geometry

    def _chord_crossing(self, t: int, a: Tuple[int, int], b: Tuple[int, int]) -> Optional[Crossing]:
        _, ain, aout = self.chords[a]
        _, bin_, bout = self.chords[b]
        if len({ain, aout, bin_, bout}) < 4:
            return None  # chords sharing an attachment never cross there
        if not _interleaved(ain, aout, bin_, bout):
            return None
        p1, p2 = self._pt(ain), self._pt(aout)
        q1, q2 = self._pt(bin_), self._pt(bout)
        da = (p2[0] - p1[0], p2[1] - p1[1])
        db = (q2[0] - q1[0], q2[1] - q1[1])
        denom = da[0] * db[1] - da[1] * db[0]
        assert denom != 0
        sign = SIGN_CONVENTION * (1 if denom > 0 else -1)
        # Intersection parameters along each chord.
        w = (q1[0] - p1[0], q1[1] - p1[1])
        ta = Fraction(w[0] * db[1] - w[1] * db[0], denom)
        tb = Fraction(w[0] * da[1] - w[1] * da[0], denom)
        assert 0 < ta < 1 and 0 < tb < 1
        return Crossing(-1, t, a, b, sign, (ta, tb))

    # ------------------------------------------------------------------
    # Queries

    def crossings_of_pair(self, mi: int, mj: int) -> List[Crossing]:
        """Crossings between two members, ordered along member mi."""
        if mi == mj:
            return [c for c in self._by_member[mi] if c.a[0] == c.b[0] == mi]
        pair = tuple(sorted((mi, mj)))
        lst = self._by_pair.get(pair, [])
        return sorted(lst, key=lambda c: (c.visit_of(mi), c.param_of(mi)))

    def count(self, mi: int, mj: int) -> int:
        if mi == mj:
            return self.self_crossings(mi)
        return len(self._by_pair.get(tuple(sorted((mi, mj))), []))

    def self_crossings(self, mi: int) -> int:
        return sum(1 for c in self.crossings if c.a[0] == c.b[0] == mi)

    def crossings_along(self, mi: int) -> List[Crossing]:
        return list(self._by_member[mi])

    def chord_vector(self, mi: int, vi: int, direction: int) -> Tuple[int, int]:
        """Direction of the member's chord in visit vi (forward or backward)."""
        _, rin, rout = self.chords[(mi, vi)]
        p1, p2 = self._pt(rin), self._pt(rout)
        v = (p2[0] - p1[0], p2[1] - p1[1])
        return v if direction == +1 else (-v[0], -v[1])

    def turn_sign(self, cross_pt, arrive: Tuple[int, int, int], depart: Tuple[int, int, int]) -> int:
        """+1 for a left turn at a crossing/shared mark, -1 for a right turn.

        arrive/depart = (member, visit, direction); arrive points INTO the
        corner, depart points OUT of it.
        """
        va = self.chord_vector(arrive[0], arrive[1], arrive[2])
        vd = self.chord_vector(depart[0], depart[1], depart[2])
        d = va[0] * vd[1] - va[1] * vd[0]
        if d == 0:
            raise OverlayError("degenerate turn")
        return 1 if d > 0 else -1


def _interleaved(a1: int, a2: int, b1: int, b2: int) -> bool:
    """Do chords {a1,a2} and {b1,b2} interleave in the cyclic rank order?"""
    lo, hi = min(a1, a2), max(a1, a2)
    return (lo < b1 < hi) != (lo < b2 < hi)


def _is_proper_power(word: Sequence) -> bool:
    n = len(word)
    for p in range(1, n):
        if n % p == 0 and all(word[i] == word[i % p] for i in range(n)):
            return True
    return False


# ----------------------------------------------------------------------
# Convenience functions (the spec-level operations)


def reduce_to_minimal(surface: Surface, members: Sequence[TracedPath]) -> Overlay:
    """Minimal-position overlay of the members (idempotent canonical form)."""
    return Overlay(surface, members)


def geometric_intersection(a: TracedPath, b: TracedPath) -> int:
    """Geometric intersection number of two embedded members."""
    if a.surface is not b.surface:
        raise OverlayError("members on different surfaces")
    if a is b or a.same_class(b, oriented=False):
        return 0
    o = Overlay(a.surface, [a, b])
    return o.count(0, 1)


def self_intersection(a: TracedPath) -> int:
    o = Overlay(a.surface, [a], check_embedded=False)
    return o.self_crossings(0)


def is_embedded(a: TracedPath) -> bool:
    if a.kind == "closed" and _is_proper_power(a.steps):
        return False
    return self_intersection(a) == 0


def intersection_sequence(o: Overlay, gi: int, hi: int) -> List[Tuple[int, int]]:
    """Crossings of member gi with hi ordered along gi: (crossing index, sign).

    Signs are for the frame (direction of gi, direction of hi).
    """
    return [(c.index, c.sign_for(gi)) for c in o.crossings_of_pair(gi, hi)]


def find_bigon(o: Overlay, mi: int, mj: int) -> Optional[Tuple[int, int]]:
    """Search for an innermost bigon between two members (test oracle).

    Canonical placements must contain none; returns a pair of crossing indices
    if a bigon exists (adjacent along both members, opposite signs and
    null-homotopic joined loop).
    """
    from .regions import segment_word, word_is_trivial  # local import, no cycle

    cr = o.crossings_of_pair(mi, mj)
    if len(cr) < 2:
        return None
    along_j = sorted(cr, key=lambda c: (c.visit_of(mj), c.param_of(mj)))
    pos_j = {c.index: p for p, c in enumerate(along_j)}
    nj = len(along_j)
    for p in range(len(cr)):
        x = cr[p]
        y = cr[(p + 1) % len(cr)] if o.members[mi].kind == "closed" else None
        if p + 1 < len(cr):
            y = cr[p + 1]
        if y is None or y is x:
            continue
        dj = abs(pos_j[x.index] - pos_j[y.index])
        adjacent_j = dj == 1 or (o.members[mj].kind == "closed" and dj == nj - 1)
        if not adjacent_j:
            continue
        if x.sign_for(mi) == y.sign_for(mi):
            continue
        for wind_i in ([0] if o.members[mi].kind == "arc" else [0, 1, -1]):
            for wind_j in ([0] if o.members[mj].kind == "arc" else [0, 1, -1]):
                wi = segment_word(o, mi, ("x", x), ("x", y), wind_i)
                wj = segment_word(o, mj, ("x", y), ("x", x), wind_j)
                if wi is None or wj is None:
                    continue
                if word_is_trivial(wi + wj):
                    return (x.index, y.index)
    return None
