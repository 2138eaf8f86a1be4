"""Dehn twists, twist words, their action on members, and equality testing.

A twist image is computed by explicit surgery: at every crossing of the target
with the twisting curve, a full copy of the curve is spliced in, directed by
the crossing sign; the result is reduced to its canonical form. For arcs the
surgery can keep origin tags on every surviving letter, which downstream
right-position machinery uses to identify intersection points before and
after a twist.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Set, Tuple

from .overlay import Crossing, Overlay, OverlayError
from .paths import Mark, PathError, Step, TracedPath, inverse_step, reduce_word
from .surfaces import Side, Surface

# Chirality of the surgery: with SIGN_CONVENTION in overlay.py, inserting the
# curve forward at positive crossings makes positive twists send arcs to the
# right (validated by the orientation tests).
_TWIST_CHIRALITY = +1


class TwistError(ValueError):
    pass


def _is_disc_bounding(curve: TracedPath) -> bool:
    return curve.kind == "closed" and len(curve.steps) == 0


@dataclass(frozen=True)
class TwistWord:
    """Composition of signed Dehn twists; rightmost letter applied first."""

    surface: Surface
    letters: Tuple[Tuple[TracedPath, int], ...]
    name: str = ""

    def __post_init__(self):
        for curve, sign in self.letters:
            if curve.kind != "closed":
                raise TwistError("twist letters must be closed curves")
            if sign not in (+1, -1):
                raise TwistError("twist sign must be +1 or -1")
            if curve.surface is not self.surface:
                raise TwistError("letter on a different surface")

    @property
    def positive(self) -> bool:
        return all(s == +1 for _, s in self.letters)

    def inverse(self) -> "TwistWord":
        return TwistWord(
            self.surface,
            tuple((c, -s) for c, s in reversed(self.letters)),
            name=self.name and self.name + "^-1",
        )

    def __mul__(self, other: "TwistWord") -> "TwistWord":
        return TwistWord(self.surface, self.letters + other.letters)

    def __len__(self) -> int:
        return len(self.letters)

    def __repr__(self) -> str:
        body = " ".join(f"{'+' if s > 0 else '-'}{c.name or 'c'}" for c, s in self.letters)
        return f"<word {self.name or ''}: {body}>"


# ----------------------------------------------------------------------
# Surgery


class TaggedImage:
    """Twist image of an arc with per-visit provenance.

    visit_origins[j] is the set of origin labels merged into visit j of the
    image: ('t', v, q) = interval q of visit v of the pre-image (intervals cut
    by the twist-curve crossings along that visit), ('a', x, w) = visit w of
    the inserted curve copy at pre-image/curve crossing with index x.
    """

    def __init__(self, path: TracedPath, visit_origins: List[Set], insertions: List[int]):
        self.path = path
        self.visit_origins = visit_origins
        self.insertions = insertions

    def visits_with_origin(self, origin) -> List[int]:
        return [j for j, s in enumerate(self.visit_origins) if origin in s]


def dehn_twist(alpha: TracedPath, target: TracedPath, sign: int = +1,
               overlay: Optional[Overlay] = None) -> TracedPath:
    """Image of `target` under the Dehn twist about `alpha` (sign +1 positive)."""
    return _twist(alpha, target, sign, overlay)[0]


def dehn_twist_tagged(alpha: TracedPath, target: TracedPath, sign: int = +1,
                      overlay: Optional[Overlay] = None) -> Tuple[TaggedImage, Overlay]:
    """Twist image of an arc together with provenance data.

    Also returns the minimal pair overlay (target, alpha) the surgery used, in
    which the insertion crossing indices live.
    """
    if target.kind != "arc":
        raise TwistError("tagged surgery is for arcs")
    path, origins, insertions, o = _twist(alpha, target, sign, overlay)
    return TaggedImage(path, origins, insertions), o


def _twist(alpha: TracedPath, target: TracedPath, sign: int,
           overlay: Optional[Overlay]):
    if sign not in (+1, -1):
        raise TwistError("sign must be +1 or -1")
    if _is_disc_bounding(alpha):
        raise TwistError("twisting curve bounds a disc")
    if alpha.kind != "closed":
        raise TwistError("can only twist about closed curves")
    if alpha.surface is not target.surface:
        raise TwistError("different surfaces")
    o = overlay if overlay is not None else Overlay(alpha.surface, [target, alpha])
    assert o.members[0] is target and o.members[1] is alpha
    cross = o.crossings_of_pair(0, 1)
    L = len(alpha.steps)

    # Raw tagged word: walk the target, splicing a full alpha copy at each
    # crossing. Tokens are (letter, origin-of-gap-after-letter).
    by_visit: Dict[int, List[Crossing]] = {}
    for c in cross:
        by_visit.setdefault(c.visit_of(0), []).append(c)
    for v in by_visit:
        by_visit[v].sort(key=lambda c: c.param_of(0))

    tokens: List[Tuple[Step, object]] = []
    lead_gap: Set = {("t", 0, 0)}
    insertions: List[int] = []

    def emit(letter: Step, gap_origin) -> None:
        tokens.append((letter, gap_origin))

    n_visits = target.n_visits
    for v in range(n_visits):
        for q, c in enumerate(by_visit.get(v, [])):
            insertions.append(c.index)
            va = c.visit_of(1)
            d = _TWIST_CHIRALITY * sign * c.sign_for(0)
            if d == +1:
                seq = [(alpha.steps[(va + i) % L], ("a", c.index, (va + 1 + i) % L))
                       for i in range(L)]
            else:
                seq = [(inverse_step(alpha.steps[(va - 1 - i) % L]),
                        ("a", c.index, (va - 1 - i) % L))
                       for i in range(L)]
            # Re-label the gap after the last inserted letter: back in the
            # target's visit, next interval.
            seq[-1] = (seq[-1][0], ("t", v, q + 1))
            tokens.extend(seq)
        k = target.visit_exit_step(v)
        if k is not None and (target.kind == "closed" or v < n_visits - 1):
            emit(target.steps[k], ("t", (v + 1) % n_visits, 0))

    # Free reduction with gap merging.
    stack: List[Tuple[Step, Set]] = []
    pending: Set = set(lead_gap)
    for letter, gap_after in tokens:
        if stack and stack[-1][0] == inverse_step(letter):
            _, gb = stack.pop()
            pending = gb | pending | {gap_after}
        else:
            stack.append((letter, pending))
            pending = {gap_after}
    steps = [letter for letter, _ in stack]
    origins = [gb for _, gb in stack] + [pending]
    # Raw gap origins were stored as singletons inside sets of labels; flatten.
    norm_origins: List[Set] = []
    for s in origins:
        flat: Set = set()
        for item in s:
            flat.add(item)
        norm_origins.append(flat)

    if target.kind == "arc":
        path = TracedPath(alpha.surface, "arc", steps, target.start, target.end,
                          name=target.name, _reduced=True)
        return path, norm_origins, insertions, o
    path = TracedPath(alpha.surface, "closed", steps, name=target.name)
    return path, None, insertions, o


def apply_word(word: TwistWord, target: TracedPath) -> TracedPath:
    """Apply a twist word, rightmost letter first."""
    out = target
    for curve, sign in reversed(word.letters):
        out = dehn_twist(curve, out, sign)
    return out


# ----------------------------------------------------------------------
# Canonical filling arc system and mapping-class equality


def _dual_tree_paths(surface: Surface, root: int = 0,
                     diagonal_only: bool = False) -> Dict[int, List[Step]]:
    """Shortest dual-graph word from `root` to every triangle.

    With diagonal_only, routes use fan diagonals (labels m*) exclusively; on
    the canonical polygon models these form a spanning path, so the routes
    never cross the seam edges the filling arcs are built around.
    """
    from collections import deque

    paths: Dict[int, List[Step]] = {root: []}
    dq = deque([root])
    while dq:
        t = dq.popleft()
        for s in range(3):
            side = (t, s)
            mate = surface.opposite(side)
            if mate is None or mate[0] in paths:
                continue
            if diagonal_only and not surface.side_label(side).startswith("m"):
                continue
            e = surface.edge_index(side)
            sgn = +1 if surface.edge_sides(e)[0] == side else -1
            paths[mate[0]] = paths[t] + [(e, sgn)]
            dq.append(mate[0])
    return paths


_fill_cache: Dict[int, List[TracedPath]] = {}

_MARK_SPAN = 10 ** 6  # mark positions near a side's far corner count down from here


def _fan_walk_to_boundary(surface: Surface, corner: Tuple[int, int], forward: bool):
    """Interior sides crossed rotating from `corner` around its vertex to ∂.

    forward=True crosses side (t, c) first (counterclockwise rotation),
    forward=False crosses side (t, c-1) (clockwise). Returns (crossed sides in
    order, final boundary side, final corner).
    """
    sides = []
    t, c = corner
    while True:
        side = (t, c) if forward else (t, (c - 1) % 3)
        if surface.is_boundary(side):
            return sides, side, (t, c)
        sides.append(side)
        t2, s2 = surface.opposite(side)
        t, c = (t2, (s2 + 1) % 3) if forward else (t2, s2)


def edge_pushoff_arc(surface: Surface, e: int, name: str = "") -> TracedPath:
    """Properly embedded arc parallel to interior edge e, pushed to one side.

    Runs beside the edge inside one adjacent triangle and escapes to the
    boundary around the edge's two endpoint vertices. The side is chosen so
    the escape fans avoid the edge itself where possible; the result is
    validated embedded.
    """
    from .overlay import is_embedded

    candidates = []
    for (ta, sa) in surface.edge_sides(e):
        fan_a, bdy_a, _ = _fan_walk_to_boundary(surface, (ta, sa), forward=False)
        fan_b, bdy_b, _ = _fan_walk_to_boundary(surface, (ta, (sa + 1) % 3), forward=True)
        crosses_self = any(surface.edge_index(s) == e for s in fan_a + fan_b)
        candidates.append((crosses_self, fan_a, bdy_a, fan_b, bdy_b))
    candidates.sort(key=lambda c: c[0])

    last_error = None
    for _, fan_a, bdy_a, fan_b, bdy_b in candidates:
        word: List[Step] = []
        for side in reversed(fan_a):
            # Enter the triangle of `side` from its mate (boundary -> edge).
            ei = surface.edge_index(side)
            word.append((ei, +1 if surface.edge_sides(ei)[1] == side else -1))
        for side in fan_b:
            # Leave through `side` (edge -> boundary).
            ei = surface.edge_index(side)
            word.append((ei, +1 if surface.edge_sides(ei)[0] == side else -1))
        # The backward walk lands near the boundary side's end corner, the
        # forward walk near its start corner; depth stacks simultaneous
        # push-offs around a vertex (shallower fan = closer to the corner).
        pos_a = _MARK_SPAN - (len(fan_a) + 1)
        pos_b = len(fan_b) + 1
        arc = TracedPath(
            surface, "arc", word, Mark(bdy_a, pos_a), Mark(bdy_b, pos_b),
            name=name or f"push_{surface.side_label(surface.edge_sides(e)[0])}",
        )
        if is_embedded(arc):
            return arc
        last_error = arc
    raise TwistError(f"no embedded push-off found for edge {e} ({last_error})")


def filling_arcs(surface: Surface) -> List[TracedPath]:
    """A fixed filling arc system for a canonical surface.

    One arc per seam (non-diagonal interior edge), crossing it exactly once
    and routed through the fan-diagonal corridor from the base boundary side.
    Cutting along all of them cuts the surface into a single disc, so equal
    images of this system pin a mapping class (Alexander method). The arcs
    are pairwise disjoint; the mark layout realizing that is found by a small
    deterministic search and cached.
    """
    key = id(surface)
    if key in _fill_cache:
        return _fill_cache[key]
    from .cells import complement_components
    from .overlay import Overlay, is_embedded

    base_side = max(surface.boundary_sides)
    base_tri = base_side[0]
    tree = _dual_tree_paths(surface, base_tri, diagonal_only=True)
    if len(tree) != surface.n_triangles:
        tree = _dual_tree_paths(surface, base_tri)
    to_base = {t: [inverse_step(st) for st in reversed(p)] for t, p in tree.items()}
    seams = [
        i for i, (a, b) in enumerate(surface.edges)
        if not surface.side_label(a).startswith("m")
    ]
    words: List[List[Step]] = []
    for e in seams:
        a, b = surface.edge_sides(e)
        word = (
            [inverse_step(st) for st in reversed(to_base[a[0]])]
            + [(e, +1)]
            + to_base[b[0]]
        )
        words.append(reduce_word(word))

    k = len(words)
    center = _MARK_SPAN // 2

    def layout(pattern: str, i: int) -> Tuple[int, int]:
        if pattern == "seq":
            return (2 * i, 2 * i + 1)
        if pattern == "seq_swap":
            return (2 * i + 1, 2 * i)
        if pattern == "nest":
            return (center - 1 - i, center + 1 + i)
        return (center + 1 + i, center - 1 - i)

    last = None
    for pattern in ("nest", "nest_swap", "seq", "seq_swap"):
        arcs: List[TracedPath] = []
        ok = True
        for i, (e, word) in enumerate(zip(seams, words)):
            pa, pb = layout(pattern, i)
            arc = TracedPath(
                surface, "arc", word, Mark(base_side, pa), Mark(base_side, pb),
                name=f"fill_{surface.side_label(surface.edge_sides(e)[0])}",
            )
            if not is_embedded(arc):
                ok = False
                break
            arcs.append(arc)
        if not ok:
            continue
        o = Overlay(surface, arcs)
        if any(o.count(i, j) for i in range(k) for j in range(i + 1, k)):
            continue
        if complement_components(o) != 1:
            continue
        _fill_cache[key] = arcs
        return arcs
    raise TwistError(f"no filling arc layout found for {surface.name}")


def equal_mapping_classes(w1: TwistWord, w2: TwistWord) -> bool:
    """Whether two twist words define the same mapping class.

    Compares the images of the canonical filling arc system, rel endpoints.
    """
    if w1.surface is not w2.surface:
        raise TwistError("words on different surfaces")
    for arc in filling_arcs(w1.surface):
        im1 = apply_word(w1, arc)
        im2 = apply_word(w2, arc)
        if not im1.same_class(im2):
            return False
    return True


def is_identity(word: TwistWord) -> bool:
    for arc in filling_arcs(word.surface):
        if not apply_word(word, arc).same_class(arc):
            return False
    return True


# ----------------------------------------------------------------------
# First homology with integer coefficients


class Homology:
    """H_1 of the surface via the dual spanning tree.

    Crossing a non-tree interior edge contributes a generator; tree edges
    contribute nothing. Independent of any overlay placement.
    """

    def __init__(self, surface: Surface) -> None:
        self.surface = surface
        tree_edges: Set[int] = set()
        seen = {0}
        from collections import deque

        dq = deque([0])
        while dq:
            t = dq.popleft()
            for s in range(3):
                mate = surface.opposite((t, s))
                if mate is None or mate[0] in seen:
                    continue
                tree_edges.add(surface.edge_index((t, s)))
                seen.add(mate[0])
                dq.append(mate[0])
        self.generators = [e for e in range(surface.n_interior_edges) if e not in tree_edges]
        self._index = {e: i for i, e in enumerate(self.generators)}

    def curve_class(self, curve: TracedPath) -> Tuple[int, ...]:
        if curve.kind != "closed":
            raise TwistError("homology classes here are for closed curves")
        vec = [0] * len(self.generators)
        for e, sgn in curve.steps:
            if e in self._index:
                vec[self._index[e]] += sgn
        return tuple(vec)

    def rank(self) -> int:
        return len(self.generators)


def algebraic_intersection(a: TracedPath, b: TracedPath, overlay: Optional[Overlay] = None) -> int:
    """Signed count of crossings of two closed curves."""
    o = overlay if overlay is not None else Overlay(a.surface, [a, b])
    return sum(c.sign_for(0) for c in o.crossings_of_pair(0, 1))


def transvection_check(alpha: TracedPath, beta: TracedPath, sign: int = +1) -> bool:
    """Oracle: [twist_alpha^sign(beta)] == [beta] + sign * <alpha, beta> * [alpha].

    The pairing sign convention matches the crossing-sign convention; this is
    the homology shadow of the surgery and must hold for every twist.
    """
    h = Homology(alpha.surface)
    image = dehn_twist(alpha, beta, sign)
    got = h.curve_class(image) if image.kind == "closed" else None
    if got is None:
        return False
    k = algebraic_intersection(alpha, beta)
    expect = tuple(
        hb + sign * (-k) * ha for hb, ha in zip(h.curve_class(beta), h.curve_class(alpha))
    )
    return got == expect
