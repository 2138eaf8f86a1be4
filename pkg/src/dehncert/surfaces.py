"""Oriented combinatorial surfaces with boundary.

A surface is a set of oriented triangles glued along sides. Triangles are
indexed 0..n-1; each has sides 0, 1, 2, where side s runs from corner s to
corner s+1 (mod 3) and all triangles are traversed counterclockwise. A gluing
identifies two sides with reversed direction, which keeps the global
orientation consistent; unglued sides form the boundary.

Every vertex is required to lie on the boundary. This is what makes reduced
crossing sequences through the triangulation a complete invariant of isotopy
classes of curves and arcs (the dual graph of the universal cover is a tree).
"""

from __future__ import annotations

import itertools
from typing import Dict, List, Optional, Sequence, Tuple

Side = Tuple[int, int]  # (triangle, side index 0..2)


class SurfaceError(ValueError):
    """Invalid surface data or unsupported surface request."""


def _other(pair: Tuple[Side, Side], side: Side) -> Side:
    return pair[1] if pair[0] == side else pair[0]


class Surface:
    """Triangulated oriented surface with nonempty boundary.

    Parameters
    ----------
    n_triangles:
        Number of triangles.
    gluings:
        Iterable of side pairs ((t, s), (t', s')) to identify (orientation
        reversing, as induced by keeping all triangles counterclockwise).
    genus, boundary_count:
        Expected topology; validated against the Euler characteristic and the
        traced boundary cycles.
    edge_labels:
        Optional mapping from human labels to sides (interior label names one
        side of the glued pair; boundary labels name the boundary side).
    """

    def __init__(
        self,
        n_triangles: int,
        gluings: Sequence[Tuple[Side, Side]],
        genus: int,
        boundary_count: int,
        edge_labels: Optional[Dict[str, Side]] = None,
        name: str = "",
    ) -> None:
        self.n_triangles = n_triangles
        self.genus = genus
        self.boundary_count = boundary_count
        self.name = name or f"S_{genus},{boundary_count}"

        glue: Dict[Side, Side] = {}
        for a, b in gluings:
            for side in (a, b):
                t, s = side
                if not (0 <= t < n_triangles and 0 <= s < 3):
                    raise SurfaceError(f"side {side} out of range")
                if side in glue:
                    raise SurfaceError(f"side {side} glued twice")
            if a == b:
                raise SurfaceError(f"side {a} glued to itself")
            glue[a] = b
            glue[b] = a
        self._glue = glue

        all_sides = [(t, s) for t in range(n_triangles) for s in range(3)]
        self.boundary_sides: List[Side] = [s for s in all_sides if s not in glue]
        if not self.boundary_sides:
            raise SurfaceError("surface must have nonempty boundary")

        # Interior edges, indexed deterministically by their smaller side.
        seen = set()
        self.edges: List[Tuple[Side, Side]] = []
        for side in all_sides:
            if side in glue and side not in seen:
                mate = glue[side]
                seen.add(side)
                seen.add(mate)
                self.edges.append((side, mate))
        self._edge_of_side: Dict[Side, int] = {}
        for i, (a, b) in enumerate(self.edges):
            self._edge_of_side[a] = i
            self._edge_of_side[b] = i

        self.edge_labels: Dict[str, Side] = dict(edge_labels or {})
        self._side_label: Dict[Side, str] = {}
        for lab, side in self.edge_labels.items():
            self._side_label[side] = lab
            if side in glue:
                self._side_label[glue[side]] = lab

        self._validate()

    # ------------------------------------------------------------------
    # Basic queries

    def opposite(self, side: Side) -> Optional[Side]:
        """The side glued to `side`, or None when `side` is on the boundary."""
        return self._glue.get(side)

    def is_boundary(self, side: Side) -> bool:
        return side not in self._glue

    def edge_index(self, side: Side) -> int:
        if side not in self._edge_of_side:
            raise SurfaceError(f"{side} is a boundary side, not an interior edge")
        return self._edge_of_side[side]

    def edge_sides(self, edge: int) -> Tuple[Side, Side]:
        return self.edges[edge]

    def side_label(self, side: Side) -> str:
        if side in self._side_label:
            return self._side_label[side]
        return f"{side[0]}.{side[1]}"

    def side_by_label(self, label: str) -> Side:
        if label in self.edge_labels:
            return self.edge_labels[label]
        t, s = label.split(".")
        return (int(t), int(s))

    @property
    def n_interior_edges(self) -> int:
        return len(self.edges)

    def euler_characteristic(self) -> int:
        return len(self._vertex_classes) - (len(self.edges) + len(self.boundary_sides)) + self.n_triangles

    # ------------------------------------------------------------------
    # Corner / vertex structure

    def _corner_step(self, corner: Tuple[int, int]) -> Optional[Tuple[int, int]]:
        """Rotate one step counterclockwise around the vertex at `corner`.

        Corner (t, c) sits between sides c-1 and c of t. Crossing side (t, c)
        lands at corner (t2, s2+1) of the glued triangle; returns None at the
        boundary.
        """
        t, c = corner
        mate = self._glue.get((t, c))
        if mate is None:
            return None
        t2, s2 = mate
        return (t2, (s2 + 1) % 3)

    def _corner_step_back(self, corner: Tuple[int, int]) -> Optional[Tuple[int, int]]:
        t, c = corner
        mate = self._glue.get((t, (c - 1) % 3))
        if mate is None:
            return None
        t2, s2 = mate
        return (t2, s2)

    def _compute_vertex_classes(self) -> List[List[Tuple[int, int]]]:
        corners = [(t, c) for t in range(self.n_triangles) for c in range(3)]
        unseen = set(corners)
        classes = []
        while unseen:
            start = min(unseen)
            cls = [start]
            unseen.discard(start)
            for step in (self._corner_step, self._corner_step_back):
                cur = start
                while True:
                    nxt = step(cur)
                    if nxt is None or nxt == start:
                        break
                    if nxt in cls:
                        break
                    cls.append(nxt)
                    unseen.discard(nxt)
                    cur = nxt
            classes.append(sorted(cls))
        return classes

    def _boundary_cycles(self) -> List[List[Side]]:
        """Boundary components as cyclic lists of boundary sides."""
        nxt: Dict[Side, Side] = {}
        for side in self.boundary_sides:
            t, s = side
            # Rotate around the vertex at the endpoint corner (t, s+1) until
            # the boundary side leaving that vertex is found.
            corner = (t, (s + 1) % 3)
            guard = 0
            while not self.is_boundary(corner):
                corner = self._corner_step(corner)
                guard += 1
                if corner is None or guard > 3 * self.n_triangles:
                    raise SurfaceError("boundary walk failed; bad gluing data")
            nxt[side] = corner
        cycles = []
        unseen = set(self.boundary_sides)
        while unseen:
            start = min(unseen)
            cyc = [start]
            unseen.discard(start)
            cur = nxt[start]
            while cur != start:
                cyc.append(cur)
                unseen.discard(cur)
                cur = nxt[cur]
            cycles.append(cyc)
        return cycles

    # ------------------------------------------------------------------
    # Validation

    def _validate(self) -> None:
        # Connectivity of the dual graph.
        if self.n_triangles == 0:
            raise SurfaceError("empty surface")
        seen = {0}
        stack = [0]
        while stack:
            t = stack.pop()
            for s in range(3):
                mate = self._glue.get((t, s))
                if mate is not None and mate[0] not in seen:
                    seen.add(mate[0])
                    stack.append(mate[0])
        if len(seen) != self.n_triangles:
            raise SurfaceError("surface is not connected")

        self._vertex_classes = self._compute_vertex_classes()
        chi = self.euler_characteristic()
        expected = 2 - 2 * self.genus - self.boundary_count
        if chi != expected:
            raise SurfaceError(f"Euler characteristic {chi} != {expected}")

        cycles = self._boundary_cycles()
        if len(cycles) != self.boundary_count:
            raise SurfaceError(
                f"{len(cycles)} boundary cycles, expected {self.boundary_count}"
            )
        self.boundary_cycles = cycles

        # Every vertex must touch the boundary (see module docstring).
        boundary_corners = set()
        for t, s in self.boundary_sides:
            boundary_corners.add((t, s))
            boundary_corners.add((t, (s + 1) % 3))
        for cls in self._vertex_classes:
            if not any(c in boundary_corners for c in cls):
                raise SurfaceError("triangulation has an interior vertex")

    def __repr__(self) -> str:
        return (
            f"Surface({self.name}: genus {self.genus}, "
            f"{self.boundary_count} boundary, {self.n_triangles} triangles)"
        )


# ----------------------------------------------------------------------
# Canonical models


def _polygon_surface(word: List[str], genus: int, boundary_count: int) -> Surface:
    """Fan-triangulated polygon with sides glued according to `word`.

    `word` lists one label per polygon side; a label appearing twice marks a
    glued pair, a label appearing once a boundary side. Triangle k of the fan
    is (v0, v_{k+1}, v_{k+2}); its side 1 is polygon side k+1, side 0 of
    triangle 0 is polygon side 0 and side 2 of the last triangle is the last
    polygon side. Fan diagonals are glued internally and labelled m1, m2, ...
    """
    n = len(word)
    if n < 3:
        raise SurfaceError("polygon needs at least 3 sides")
    n_tri = n - 2

    def polygon_side(j: int) -> Side:
        if j == 0:
            return (0, 0)
        if j == n - 1:
            return (n_tri - 1, 2)
        return (j - 1, 1)

    gluings: List[Tuple[Side, Side]] = []
    labels: Dict[str, Side] = {}
    for k in range(n_tri - 1):
        gluings.append(((k, 2), (k + 1, 0)))
        labels[f"m{k + 1}"] = (k, 2)
    where: Dict[str, List[int]] = {}
    for j, lab in enumerate(word):
        where.setdefault(lab, []).append(j)
    for lab, positions in where.items():
        if len(positions) == 1:
            labels[lab] = polygon_side(positions[0])
        elif len(positions) == 2:
            a, b = positions
            gluings.append((polygon_side(a), polygon_side(b)))
            labels[lab] = polygon_side(a)
        else:
            raise SurfaceError(f"label {lab} used {len(positions)} times")
    return Surface(
        n_tri,
        gluings,
        genus,
        boundary_count,
        edge_labels=labels,
        name=f"S_{genus},{boundary_count}",
    )


def canonical_word(genus: int, boundary_count: int) -> List[str]:
    """Polygon side word of the canonical model of S_{genus, boundary_count}."""
    word: List[str] = []
    for i in range(1, genus + 1):
        word += [f"a{i}", f"b{i}", f"a{i}", f"b{i}"]
    for i in range(1, boundary_count):
        word += [f"d{i}", f"e{i}", f"d{i}"]
    word.append("f")
    k = 1
    while len(word) < 3:
        word.append(f"f{k}")  # pad tiny cases with extra boundary edges
        k += 1
    return word


def build_surface(genus: int, boundary_count: int) -> Surface:
    """Canonical triangulated model of the surface S_{genus, boundary_count}.

    The model is a fan-triangulated polygon with side word
    a1 b1 a1 b1 ... ag bg ag bg d1 e1 d1 ... f (genus handles first, then one
    d/e/d pocket per extra boundary component, one free side f). Every vertex
    lies on the boundary. Edge labels: the word letters plus fan diagonals
    m1, m2, ...; fixtures address edges by these labels.
    """
    if boundary_count < 1:
        raise SurfaceError("surfaces must have at least one boundary component")
    if genus < 0:
        raise SurfaceError("genus must be non-negative")
    return _polygon_surface(canonical_word(genus, boundary_count), genus, boundary_count)
