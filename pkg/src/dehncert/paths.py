"""Traced arcs and closed curves as crossing sequences.

A path is recorded by the sequence of interior edges it crosses, each crossing
directed. Because every vertex of the triangulation is on the boundary, two
paths with the same endpoints are isotopic (rel endpoints) iff their reduced
crossing words agree, and closed curves are freely isotopic iff their
cyclically reduced words agree up to rotation. Reduction = cancelling
immediate backtracks; it is the combinatorial form of removing bigons with the
triangulation.

Arc endpoints are marked boundary points: (boundary side, integer position
along the side's direction). Arcs may share marked endpoints (an arc and its
image under a mapping class do).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

from .surfaces import Side, Surface, SurfaceError

Step = Tuple[int, int]  # (interior edge index, direction +1/-1)


class PathError(ValueError):
    """Invalid or degenerate traced path."""


@dataclass(frozen=True, order=True)
class Mark:
    """Marked point on a boundary side, at integer position along the side."""

    side: Side
    pos: int

    def __repr__(self) -> str:
        return f"Mark({self.side[0]}.{self.side[1]}@{self.pos})"


def step_faces(surface: Surface, step: Step) -> Tuple[int, int]:
    """(source triangle, target triangle) of a directed edge crossing."""
    a, b = surface.edge_sides(step[0])
    if step[1] == +1:
        return a[0], b[0]
    return b[0], a[0]


def entry_side(surface: Surface, step: Step) -> Side:
    """Side through which the crossing enters its target triangle."""
    a, b = surface.edge_sides(step[0])
    return b if step[1] == +1 else a


def exit_side(surface: Surface, step: Step) -> Side:
    """Side through which the crossing leaves its source triangle."""
    a, b = surface.edge_sides(step[0])
    return a if step[1] == +1 else b


def inverse_step(step: Step) -> Step:
    return (step[0], -step[1])


def reduce_word(steps: Sequence[Step]) -> List[Step]:
    """Free reduction: cancel adjacent inverse crossings."""
    out: List[Step] = []
    for st in steps:
        if out and out[-1][0] == st[0] and out[-1][1] == -st[1]:
            out.pop()
        else:
            out.append(st)
    return out


def reduce_tagged(pairs: Sequence[Tuple[Step, object]]) -> List[Tuple[Step, object]]:
    """Free reduction keeping a tag alongside each surviving letter."""
    out: List[Tuple[Step, object]] = []
    for st, tag in pairs:
        if out and out[-1][0][0] == st[0] and out[-1][0][1] == -st[1]:
            out.pop()
        else:
            out.append((st, tag))
    return out


def cyclic_reduce(steps: Sequence[Step]) -> List[Step]:
    """Reduce a cyclic word: free reduction plus cancellation across the seam."""
    word = reduce_word(steps)
    while len(word) >= 2 and word[0][0] == word[-1][0] and word[0][1] == -word[-1][1]:
        word = word[1:-1]
        word = reduce_word(word)
    return word


def min_rotation(word: Sequence[Step]) -> Tuple[Step, ...]:
    w = tuple(word)
    if not w:
        return w
    return min(w[i:] + w[:i] for i in range(len(w)))


class TracedPath:
    """A properly embedded arc or simple closed curve, up to isotopy.

    The constructor reduces the word. Embeddedness is not checked here (it
    needs a placement); `overlay.Overlay` validates it.
    """

    def __init__(
        self,
        surface: Surface,
        kind: str,
        steps: Iterable[Step],
        start: Optional[Mark] = None,
        end: Optional[Mark] = None,
        name: str = "",
        _reduced: bool = False,
    ) -> None:
        if kind not in ("arc", "closed"):
            raise PathError(f"bad kind {kind!r}")
        self.surface = surface
        self.kind = kind
        self.name = name
        steps = list(steps)
        if kind == "arc":
            if start is None or end is None:
                raise PathError("arcs need two marked endpoints")
            for mark in (start, end):
                if not surface.is_boundary(mark.side):
                    raise PathError(f"endpoint {mark} not on a boundary side")
            if start == end:
                raise PathError("arc endpoints must be distinct marked points")
            if not _reduced:
                steps = reduce_word(steps)
            self.start: Optional[Mark] = start
            self.end: Optional[Mark] = end
        else:
            if start is not None or end is not None:
                raise PathError("closed curves have no endpoints")
            if not _reduced:
                steps = cyclic_reduce(steps)
                steps = list(min_rotation(steps))
            if not steps:
                raise PathError("closed curve is null-homotopic (bounds a disc)")
            self.start = None
            self.end = None
        self.steps: Tuple[Step, ...] = tuple(steps)
        self._validate_chaining()

    # ------------------------------------------------------------------

    def _validate_chaining(self) -> None:
        surface = self.surface
        n = len(self.steps)
        if self.kind == "arc":
            tri = self.start.side[0]
            for st in self.steps:
                src, dst = step_faces(surface, st)
                if src != tri:
                    raise PathError(f"{self.name or 'arc'}: step {st} does not chain")
                tri = dst
            if tri != self.end.side[0]:
                raise PathError(f"{self.name or 'arc'}: end mark not in final triangle")
        else:
            for i in range(n):
                _, dst = step_faces(surface, self.steps[i])
                src_next, _ = step_faces(surface, self.steps[(i + 1) % n])
                if dst != src_next:
                    raise PathError(f"{self.name or 'curve'}: steps do not chain cyclically")

    # ------------------------------------------------------------------
    # Visits: maximal sub-segments inside one triangle.

    @property
    def n_visits(self) -> int:
        return len(self.steps) + 1 if self.kind == "arc" else len(self.steps)

    def visit_triangle(self, j: int) -> int:
        if self.kind == "arc":
            if j == 0:
                return self.start.side[0]
            return step_faces(self.surface, self.steps[j - 1])[1]
        return step_faces(self.surface, self.steps[j])[0]

    def visit_entry_step(self, j: int) -> Optional[int]:
        """Index of the step through which visit j is entered (None at arc start)."""
        if self.kind == "arc":
            return j - 1 if j > 0 else None
        return (j - 1) % len(self.steps)

    def visit_exit_step(self, j: int) -> Optional[int]:
        if self.kind == "arc":
            return j if j < len(self.steps) else None
        return j

    # ------------------------------------------------------------------

    def reversed(self) -> "TracedPath":
        steps = [inverse_step(st) for st in reversed(self.steps)]
        if self.kind == "arc":
            return TracedPath(
                self.surface, "arc", steps, self.end, self.start,
                name=self.name and self.name + "_rev",
            )
        return TracedPath(self.surface, "closed", steps, name=self.name and self.name + "_rev")

    def canonical_steps(self) -> Tuple[Step, ...]:
        """Isotopy invariant: reduced word (arcs) / minimal rotation (closed)."""
        return self.steps

    def same_class(self, other: "TracedPath", oriented: bool = True) -> bool:
        """Equal isotopy classes (arcs: rel endpoints; closed: free isotopy)."""
        if self.surface is not other.surface or self.kind != other.kind:
            return False
        if self.kind == "arc":
            if self.start == other.start and self.end == other.end and self.steps == other.steps:
                return True
            if oriented:
                return False
            rev = other.reversed()
            return self.start == rev.start and self.end == rev.end and self.steps == rev.steps
        if self.steps == other.steps:
            return True
        if oriented:
            return False
        return self.steps == other.reversed().steps

    def __repr__(self) -> str:
        label = self.name or self.kind
        return f"<{label}: {format_path(self)}>"


# ----------------------------------------------------------------------
# Text format
#
#   arc gamma: T0/f@0 -> T1/m1 -> T0/f@1
#   closed beta: T1/m1 -> T2/d1
#
# Each token t/s names triangle t entered through its side s (side labels as
# in Surface.edge_labels, or the raw form t.s). The first and last tokens of
# an arc are marked endpoints t/s@p on boundary sides. `#` starts a comment.


def _resolve_side(surface: Surface, tri: int, label: str) -> Side:
    side = surface.side_by_label(label)
    if side[0] == tri:
        return side
    mate = surface.opposite(side)
    if mate is not None and mate[0] == tri:
        return mate
    raise PathError(f"side {label} is not a side of triangle {tri}")


def _parse_token(surface: Surface, token: str) -> Tuple[int, Side, Optional[int]]:
    token = token.strip()
    pos: Optional[int] = None
    if "@" in token:
        token, p = token.split("@")
        pos = int(p)
    tri_s, side_s = token.split("/")
    tri = int(tri_s.lstrip("T"))
    side = _resolve_side(surface, tri, side_s)
    return tri, side, pos


def parse_path(surface: Surface, line: str) -> TracedPath:
    """Parse one record of the curve-specification format."""
    line = line.split("#", 1)[0].strip()
    head, _, body = line.partition(":")
    parts = head.split()
    if len(parts) != 2 or parts[0] not in ("arc", "closed"):
        raise PathError(f"bad record header {head!r}")
    kind, name = parts
    tokens = [t for t in body.split("->") if t.strip()]
    if kind == "arc":
        if len(tokens) < 2:
            raise PathError("arc needs start and end tokens")
        t0, side0, p0 = _parse_token(surface, tokens[0])
        tN, sideN, pN = _parse_token(surface, tokens[-1])
        if p0 is None or pN is None:
            raise PathError("arc endpoints need @positions")
        steps: List[Step] = []
        prev_tri = t0
        for token in tokens[1:-1]:
            tri, side, _ = _parse_token(surface, token)
            mate = surface.opposite(side)
            if mate is None:
                raise PathError(f"cannot cross boundary side {side}")
            if mate[0] != prev_tri:
                raise PathError(f"token {token!r} does not chain from triangle {prev_tri}")
            e = surface.edge_index(side)
            sign = +1 if surface.edge_sides(e)[1] == side else -1
            steps.append((e, sign))
            prev_tri = tri
        return TracedPath(surface, "arc", steps, Mark(side0, p0), Mark(sideN, pN), name=name)
    steps = []
    for token in tokens:
        tri, side, _ = _parse_token(surface, token)
        mate = surface.opposite(side)
        if mate is None:
            raise PathError(f"cannot cross boundary side {side}")
        e = surface.edge_index(side)
        sign = +1 if surface.edge_sides(e)[1] == side else -1
        steps.append((e, sign))
    path = TracedPath(surface, "closed", steps, name=name)
    return path


def format_path(path: TracedPath) -> str:
    """Inverse of parse_path (on reduced words)."""
    surface = path.surface
    tokens: List[str] = []
    if path.kind == "arc":
        s = path.start
        tokens.append(f"T{s.side[0]}/{surface.side_label(s.side)}@{s.pos}")
    for st in path.steps:
        side = entry_side(surface, st)
        tokens.append(f"T{side[0]}/{surface.side_label(side)}")
    if path.kind == "arc":
        e = path.end
        tokens.append(f"T{e.side[0]}/{surface.side_label(e.side)}@{e.pos}")
    head = f"{path.kind} {path.name or 'member'}: "
    return head + " -> ".join(tokens)
