"""Planar diagrams of framed links with ordered crossing-ball markings.

A diagram is a PD-style code: each crossing is a 4-tuple (a, b, c, d) of edge
labels listed counterclockwise starting at an end of the under-strand, so the
under-strand occupies positions 0 and 2 and the over-strand positions 1 and 3.
Every edge label appears exactly twice.  Crossing-free circles carry no labels
at all and are tracked by the ``loops`` counter.  Balls single out crossings,
in order: ``balls[i]`` is the (1-based) index of crossing ball i+1.

Framing is the blackboard framing of the diagram.  The rotation system of the
code must embed in the 2-sphere; :func:`validate` enforces this with an Euler
characteristic check on every connected component.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Literal, Mapping, Sequence

__all__ = [
    "BalledDiagram",
    "DiagramError",
    "EdgeLabelCount",
    "NonPlanar",
    "BadBallIndex",
    "LevelMismatch",
    "validate",
    "smooth",
    "unmark",
    "strip_trivial",
    "canonical_key",
    "faces",
    "crossing_components",
    "link_component_count",
    "self_writhes",
    "diagram_to_json",
    "diagram_from_json",
]

Crossing = tuple[int, int, int, int]
Dart = tuple[int, int]  # (crossing index 0-based, position 0..3)
SmoothKind = Literal["zero", "infinity"]


class DiagramError(ValueError):
    """Base class for malformed-diagram errors."""

    validator = "DiagramError"


class EdgeLabelCount(DiagramError):
    """An edge label does not appear exactly twice."""

    validator = "EdgeLabelCount"


class NonPlanar(DiagramError):
    """The rotation system does not embed in the 2-sphere."""

    validator = "NonPlanar"


class BadBallIndex(DiagramError):
    """A ball index is out of range or repeated."""

    validator = "BadBallIndex"


class LevelMismatch(DiagramError):
    """Two objects that must share a level do not."""

    validator = "LevelMismatch"


@dataclass(frozen=True)
class BalledDiagram:
    """Immutable planar diagram with ordered crossing balls.

    ``crossings``: PD tuples as described in the module docstring.
    ``balls``: 1-based crossing indices; position i holds crossing ball i+1.
    ``loops``: number of crossing-free circles split from everything else.
    """

    crossings: tuple[Crossing, ...]
    balls: tuple[int, ...] = ()
    loops: int = 0

    def __init__(self, crossings: Iterable[Sequence[int]] = (), balls: Iterable[int] = (), loops: int = 0):
        object.__setattr__(self, "crossings", tuple(tuple(c) for c in crossings))
        object.__setattr__(self, "balls", tuple(balls))
        object.__setattr__(self, "loops", loops)

    @property
    def level(self) -> int:
        return len(self.balls)

    def is_empty(self) -> bool:
        return not self.crossings and self.loops == 0

    def ball_crossing(self, ball: int) -> Crossing:
        """The PD tuple of crossing ball ``ball`` (1-based)."""
        if not 1 <= ball <= len(self.balls):
            raise BadBallIndex(f"ball {ball} out of range 1..{len(self.balls)}")
        return self.crossings[self.balls[ball - 1] - 1]

    def edge_labels(self) -> set[int]:
        return {lab for c in self.crossings for lab in c}

    def __str__(self) -> str:
        parts = ["X" + str(tuple(c)) for c in self.crossings]
        s = " ".join(parts) if parts else "(no crossings)"
        if self.balls:
            s += f" balls={list(self.balls)}"
        if self.loops:
            s += f" loops={self.loops}"
        return s


#: The crossing-free circle: the one generator allowed to carry a loop.
CIRCLE = BalledDiagram((), (), 1)
EMPTY = BalledDiagram((), (), 0)


def _edge_ends(d: BalledDiagram) -> dict[int, list[Dart]]:
    ends: dict[int, list[Dart]] = {}
    for ci, cr in enumerate(d.crossings):
        for p, lab in enumerate(cr):
            ends.setdefault(lab, []).append((ci, p))
    return ends


def _partner(ends: Mapping[int, list[Dart]], dart: Dart, label: int) -> Dart:
    a, b = ends[label]
    return b if dart == a else a


def faces(d: BalledDiagram) -> list[list[Dart]]:
    """Faces of the embedded 4-valent map, as orbits of darts.

    The next dart of a face is obtained by crossing the current dart's edge
    and turning counterclockwise once at the far crossing.
    """
    ends = _edge_ends(d)
    seen: set[Dart] = set()
    out: list[list[Dart]] = []
    for ci, cr in enumerate(d.crossings):
        for p in range(4):
            start = (ci, p)
            if start in seen:
                continue
            orbit = []
            dart = start
            while True:
                orbit.append(dart)
                seen.add(dart)
                cj, q = _partner(ends, dart, d.crossings[dart[0]][dart[1]])
                dart = (cj, (q + 1) % 4)
                if dart == start:
                    break
            out.append(orbit)
    return out


def crossing_components(d: BalledDiagram) -> list[set[int]]:
    """Connected components of the crossing graph (crossings sharing an edge)."""
    parent = list(range(len(d.crossings)))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    ends = _edge_ends(d)
    for darts in ends.values():
        if len(darts) == 2:
            ra, rb = find(darts[0][0]), find(darts[1][0])
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
    comps: dict[int, set[int]] = {}
    for ci in range(len(d.crossings)):
        comps.setdefault(find(ci), set()).add(ci)
    return [comps[r] for r in sorted(comps)]


def validate(d: BalledDiagram) -> BalledDiagram:
    """Check all structural invariants; return the diagram unchanged if valid.

    Raises EdgeLabelCount, NonPlanar or BadBallIndex as appropriate.
    """
    if not isinstance(d.loops, int) or d.loops < 0:
        raise DiagramError(f"loops must be a non-negative integer, got {d.loops!r}")
    counts: dict[int, int] = {}
    for cr in d.crossings:
        if len(cr) != 4:
            raise EdgeLabelCount(f"crossing {cr!r} is not a 4-tuple")
        for lab in cr:
            if not isinstance(lab, int) or lab < 1:
                raise EdgeLabelCount(f"edge label {lab!r} is not a positive integer")
            counts[lab] = counts.get(lab, 0) + 1
    bad = {lab: n for lab, n in counts.items() if n != 2}
    if bad:
        raise EdgeLabelCount(f"labels with end count != 2: {bad}")

    n = len(d.crossings)
    seen_balls: set[int] = set()
    for b in d.balls:
        if not isinstance(b, int) or not 1 <= b <= n:
            raise BadBallIndex(f"ball crossing index {b!r} out of range 1..{n}")
        if b in seen_balls:
            raise BadBallIndex(f"ball crossing index {b} repeated")
        seen_balls.add(b)

    if n:
        comps = crossing_components(d)
        comp_of: dict[int, int] = {}
        for k, comp in enumerate(comps):
            for ci in comp:
                comp_of[ci] = k
        face_count: dict[int, int] = {}
        for orbit in faces(d):
            k = comp_of[orbit[0][0]]
            face_count[k] = face_count.get(k, 0) + 1
        edge_count: dict[int, int] = {}
        for darts in _edge_ends(d).values():
            k = comp_of[darts[0][0]]
            edge_count[k] = edge_count.get(k, 0) + 1
        for k, comp in enumerate(comps):
            V, E, F = len(comp), edge_count.get(k, 0), face_count.get(k, 0)
            if V - E + F != 2:
                raise NonPlanar(
                    f"component {sorted(comp)} has Euler characteristic {V - E + F}, expected 2"
                )
    return d


class _EdgeUnion:
    """Union-find over edge labels with minimum-label representatives.

    Joining two ends already in one class closes a crossing-free circle;
    min-representatives make the merge order immaterial, which is what makes
    disjoint smoothings commute literally.
    """

    def __init__(self, labels: Iterable[int]):
        self.parent = {lab: lab for lab in labels}
        self.circles = 0

    def find(self, x: int) -> int:
        p = self.parent
        while p[x] != x:
            p[x] = p[p[x]]
            x = p[x]
        return x

    def join(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            self.circles += 1
        else:
            self.parent[max(ra, rb)] = min(ra, rb)


def smooth(d: BalledDiagram, ball: int, kind: SmoothKind) -> BalledDiagram:
    """Delete the marked crossing, joining its ends per ``kind``.

    ``zero`` joins positions (0,1) and (2,3); ``infinity`` joins (0,3) and
    (1,2).  A join that closes a crossing-free circle increments ``loops``.
    The surviving balls renumber by deleting position ``ball``.
    """
    if kind not in ("zero", "infinity"):
        raise ValueError(f"smoothing kind must be 'zero' or 'infinity', got {kind!r}")
    if not 1 <= ball <= len(d.balls):
        raise BadBallIndex(f"ball {ball} out of range 1..{len(d.balls)}")
    kcr = d.balls[ball - 1]
    t = d.crossings[kcr - 1]
    uf = _EdgeUnion({lab for c in d.crossings for lab in c})
    pairs = ((t[0], t[1]), (t[2], t[3])) if kind == "zero" else ((t[0], t[3]), (t[1], t[2]))
    for a, b in pairs:
        uf.join(a, b)
    new_crossings = [
        tuple(uf.find(lab) for lab in cr)
        for i, cr in enumerate(d.crossings)
        if i != kcr - 1
    ]
    new_balls = [b - 1 if b > kcr else b for j, b in enumerate(d.balls) if j != ball - 1]
    return BalledDiagram(new_crossings, new_balls, d.loops + uf.circles)


def unmark(d: BalledDiagram, ball: int) -> BalledDiagram:
    """Remove crossing ball ``ball``; the crossing itself survives."""
    if not 1 <= ball <= len(d.balls):
        raise BadBallIndex(f"ball {ball} out of range 1..{len(d.balls)}")
    new_balls = tuple(b for j, b in enumerate(d.balls) if j != ball - 1)
    return BalledDiagram(d.crossings, new_balls, d.loops)


def strip_trivial(d: BalledDiagram) -> tuple[BalledDiagram, int]:
    """Remove split zero-crossing circles, counting how many were removed.

    The caller multiplies its coefficient by (-(A^2 + A^-2))^count.  When the
    diagram is nothing but circles, one circle is kept: the crossing-free
    circle is itself a generator, exactly as in the worked computations where
    a bare circle survives the reduction.
    """
    if d.loops == 0:
        return d, 0
    if d.crossings:
        return BalledDiagram(d.crossings, d.balls, 0), d.loops
    return CIRCLE, d.loops - 1


def _component_code(
    d: BalledDiagram,
    ends: Mapping[int, list[Dart]],
    comp: Sequence[int],
    ball_number: Mapping[int, int],
) -> tuple:
    """Minimal traversal code of one connected component.

    The code is minimized over every start dart; it is invariant under edge
    relabeling, crossing reordering and the rotation of any tuple by two
    (which preserves the under/over roles), and it records which crossings
    carry which global ball numbers.
    """
    best: tuple | None = None
    for start in comp:
        for entry in range(4):
            base = {start: entry - (entry % 2)}
            order = [start]
            pos_of = {start: 0}
            edge_num: dict[int, int] = {}
            queue: list[Dart] = [(start, (base[start] + k) % 4) for k in range(4)]
            head = 0
            while head < len(queue):
                ci, p = queue[head]
                head += 1
                lab = d.crossings[ci][p]
                if lab not in edge_num:
                    edge_num[lab] = len(edge_num) + 1
                cj, q = _partner(ends, (ci, p), lab)
                if cj not in base:
                    base[cj] = q - (q % 2)
                    pos_of[cj] = len(order)
                    order.append(cj)
                    queue.extend((cj, (base[cj] + k) % 4) for k in range(4))
            tuples = tuple(
                tuple(edge_num[d.crossings[ci][(base[ci] + k) % 4]] for k in range(4))
                for ci in order
            )
            marks = tuple(
                (ball_number[ci], pos_of[ci] + 1) for ci in sorted(ball_number, key=ball_number.get) if ci in pos_of
            )
            code = (len(order), tuples, marks)
            if best is None or code < best:
                best = code
    assert best is not None
    return best


def canonical_key(d: BalledDiagram) -> bytes:
    """Deterministic key equal for diagrams identical up to relabeling,
    crossing reordering and sphere-preserving tuple rotation, with ball
    numbering preserved."""
    ends = _edge_ends(d)
    ball_number = {cr - 1: i + 1 for i, cr in enumerate(d.balls)}
    codes = sorted(
        _component_code(d, ends, sorted(comp), ball_number)
        for comp in crossing_components(d)
    )
    return repr((codes, d.loops)).encode("ascii")


def _strand_classes(d: BalledDiagram) -> dict[Dart, int]:
    """Map each dart to its link-component class (a representative id)."""
    parent: dict[Dart, Dart] = {}

    def find(x: Dart) -> Dart:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x: Dart, y: Dart) -> None:
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[max(rx, ry)] = min(rx, ry)

    for ci in range(len(d.crossings)):
        for p in range(4):
            parent[(ci, p)] = (ci, p)
    ends = _edge_ends(d)
    for ci in range(len(d.crossings)):
        union((ci, 0), (ci, 2))
        union((ci, 1), (ci, 3))
    for darts in ends.values():
        union(darts[0], darts[1])
    rep: dict[Dart, int] = {}
    ids: dict[Dart, int] = {}
    for ci in range(len(d.crossings)):
        for p in range(4):
            r = find((ci, p))
            if r not in ids:
                ids[r] = len(ids)
            rep[(ci, p)] = ids[r]
    return rep


def link_component_count(d: BalledDiagram) -> int:
    """Number of circles in the underlying link, including loops."""
    rep = _strand_classes(d)
    return len(set(rep.values())) + d.loops


def self_writhes(d: BalledDiagram) -> tuple[int, ...]:
    """Sorted self-writhes of the link components (loops contribute 0).

    The self-writhe of a component counts the signs of its self-crossings
    only; it is independent of orientation and invariant under the framed
    moves, so it separates diagrams that differ in framing.
    """
    rep = _strand_classes(d)
    ends = _edge_ends(d)
    entered: set[Dart] = set()
    visited: set[Dart] = set()
    for ci in range(len(d.crossings)):
        for p in range(4):
            start = (ci, p)
            if start in visited:
                continue
            dart = start
            while dart not in visited:
                visited.add(dart)
                visited.add((dart[0], (dart[1] + 2) % 4))
                entered.add(dart)
                exit_dart = (dart[0], (dart[1] + 2) % 4)
                dart = _partner(ends, exit_dart, d.crossings[exit_dart[0]][exit_dart[1]])
    writhe: dict[int, int] = {}
    for ci in range(len(d.crossings)):
        comp_under = rep[(ci, 0)]
        comp_over = rep[(ci, 1)]
        writhe.setdefault(comp_under, 0)
        writhe.setdefault(comp_over, 0)
        if comp_under == comp_over:
            sign = 1 if (((ci, 0) in entered) != ((ci, 1) in entered)) else -1
            writhe[comp_under] += sign
    return tuple(sorted(writhe.values())) + (0,) * d.loops


def diagram_to_json(d: BalledDiagram) -> dict:
    return {
        "crossings": [list(c) for c in d.crossings],
        "balls": list(d.balls),
        "loops": d.loops,
    }


def diagram_from_json(obj: Mapping) -> BalledDiagram:
    try:
        crossings = [tuple(int(x) for x in c) for c in obj.get("crossings", [])]
        balls = [int(b) for b in obj.get("balls", [])]
        loops = int(obj.get("loops", 0))
    except (TypeError, ValueError) as exc:
        raise DiagramError(f"malformed diagram object: {exc}") from exc
    return validate(BalledDiagram(crossings, balls, loops))
