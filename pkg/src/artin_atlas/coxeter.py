"""Euclidean reflection-group patches with exact coordinates.

Only three label triples (2,3,6), (2,4,4), (3,3,3) admit a flat triangle,
and every coordinate that shows up in their reflection orbits lives in
Q[sqrt(2)] or Q[sqrt(3)].  Everything here is therefore computed with
:class:`~artin_atlas.exactgeom.QuadraticNumber` entries: chamber points,
wall lines, sidedness tests and carrier orderings are exact, and the float
world only appears in the SVG/JSON exports.

The patch built around a base chamber is the polygonal complex whose
vertices sit at one marked point per chamber (the incenter, which is
equivariant under reflections), whose edges join chambers sharing a side,
and whose 2-cells are the complete finite-dihedral orbits around a corner
point.  A corner with angle pi/m carries a 2m-gon, so the three triples
produce the familiar hexagon, octagon+square and square+hexagon+12-gon
patterns.

Walls are fixed lines of reflections.  The carrier of a wall is the strip
of 2-cells centred on it; `coxeter_line_template` cuts such a strip out of
a patch and equips its edges with orientations solved from two families of
constraints: opposite sides of a cell must agree, and no vertex on either
side path of the strip may be a source or a sink.  The solver is a small
union-find with parity, so a contradictory instance is detected instead of
silently mis-oriented.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

from .exactgeom import QuadraticNumber

Point = Tuple[QuadraticNumber, QuadraticNumber]
EdgeKey = FrozenSet[Tuple]


class PatchTooLarge(Exception):
    """Raised when a requested patch would exceed the chamber cap."""


class OrientationError(Exception):
    """Raised when no edge orientation satisfies the strip constraints."""


# ---------------------------------------------------------------------------
# Triple bookkeeping.


def euclidean_triples(limit: int = 100) -> List[Tuple[int, int, int]]:
    """All label triples (m, n, r) with 1/m + 1/n + 1/r = 1, m <= n <= r <= limit.

    The reciprocal equation itself excludes the degenerate (2, 2, k)
    family, whose sum exceeds 1.  Scanning any limit >= 6 returns exactly
    (2, 3, 6), (2, 4, 4) and (3, 3, 3).
    """
    out = []
    for m in range(2, limit + 1):
        for n in range(m, limit + 1):
            for r in range(n, limit + 1):
                # integer form of 1/m + 1/n + 1/r == 1
                if n * r + m * r + m * n == m * n * r:
                    out.append((m, n, r))
    return out


_EUCLIDEAN = {(2, 3, 6), (2, 4, 4), (3, 3, 3)}


@dataclass(frozen=True)
class CoxeterTriangle:
    """A flat triangle label triple together with reflection names.

    ``names[k]`` is the reflection across the side opposite corner ``k``;
    the 2-cells around corner ``k`` alternate between the two *other*
    reflections and have ``2 * labels[k]`` sides.  Labels are stored in
    ascending order; use :func:`triangle_for` to normalise arbitrary input.
    """

    labels: Tuple[int, int, int]
    names: Tuple[str, str, str] = ("s", "t", "u")

    def __post_init__(self) -> None:
        if tuple(sorted(self.labels)) != tuple(self.labels):
            raise ValueError("labels must be ascending; use triangle_for()")
        if tuple(self.labels) not in _EUCLIDEAN:
            raise ValueError(f"labels {self.labels} are not a flat triangle triple")
        if len(set(self.names)) != 3:
            raise ValueError("reflection names must be distinct")

    def pair_label(self, i: int, j: int) -> int:
        if i == j:
            raise ValueError("a reflection has no pair label with itself")
        k = 3 - i - j
        return self.labels[k]

    def label_between(self, x: str, y: str) -> int:
        return self.pair_label(self.names.index(x), self.names.index(y))


def triangle_for(labels: Sequence[int], names: Sequence[str] = ("s", "t", "u")) -> CoxeterTriangle:
    """Build a triangle, permuting names alongside the label sort."""
    order = sorted(range(3), key=lambda k: labels[k])
    return CoxeterTriangle(
        labels=tuple(labels[k] for k in order),
        names=tuple(names[k] for k in order),
    )


def triangle_from_graph(graph, corners: Sequence[str]) -> CoxeterTriangle:
    """Triangle for three mutually joined defining-graph vertices.

    The reflection named after corner ``k`` faces the side whose cells
    alternate between the other two corner names, so ``labels[k]`` is the
    label of the edge joining those two.
    """
    x, y, z = corners
    labels = (graph.label(y, z), graph.label(x, z), graph.label(x, y))
    return triangle_for(labels, (x, y, z))


# ---------------------------------------------------------------------------
# Exact plane isometries.


def _qn(value, root: int) -> QuadraticNumber:
    return QuadraticNumber.of(Fraction(value), root)


def _field_sqrt(value: QuadraticNumber) -> QuadraticNumber:
    """Square root of a patch length-square; only rational*root shapes occur."""
    if value.radical == 0:
        q = value.rational
        if q.numerator >= 0:
            num = _int_sqrt(q.numerator)
            den = _int_sqrt(q.denominator)
            if num is not None and den is not None:
                return QuadraticNumber(Fraction(num, den), Fraction(0), value.root)
        ratio = q / value.root
        num = _int_sqrt(ratio.numerator)
        den = _int_sqrt(ratio.denominator)
        if num is not None and den is not None:
            return QuadraticNumber(Fraction(0), Fraction(num, den), value.root)
    raise ValueError(f"no exact square root for {value!r} in Q[sqrt {value.root}]")


def _int_sqrt(n: int) -> Optional[int]:
    if n < 0:
        return None
    r = int(n ** 0.5)
    for c in (r - 1, r, r + 1):
        if c >= 0 and c * c == n:
            return c
    return None


@dataclass(frozen=True)
class Isometry:
    """Affine map x -> A x + t with exact entries."""

    a: QuadraticNumber
    b: QuadraticNumber
    c: QuadraticNumber
    d: QuadraticNumber
    e: QuadraticNumber
    f: QuadraticNumber

    def apply(self, p: Point) -> Point:
        x, y = p
        return (self.a * x + self.b * y + self.e, self.c * x + self.d * y + self.f)

    def compose(self, other: "Isometry") -> "Isometry":
        """self after other."""
        return Isometry(
            a=self.a * other.a + self.b * other.c,
            b=self.a * other.b + self.b * other.d,
            c=self.c * other.a + self.d * other.c,
            d=self.c * other.b + self.d * other.d,
            e=self.a * other.e + self.b * other.f + self.e,
            f=self.c * other.e + self.d * other.f + self.f,
        )


def _identity_isometry(root: int) -> Isometry:
    one = _qn(1, root)
    zero = _qn(0, root)
    return Isometry(one, zero, zero, one, zero, zero)


def _reflection_across(p: Point, q: Point, root: int) -> Isometry:
    dx = q[0] - p[0]
    dy = q[1] - p[1]
    length = _field_sqrt(dx * dx + dy * dy)
    nx = (-dy) / length
    ny = dx / length
    # x -> x - 2 (<x, n> - <p, n>) n
    offset = p[0] * nx + p[1] * ny
    two = _qn(2, root)
    one = _qn(1, root)
    return Isometry(
        a=one - two * nx * nx,
        b=-(two * nx * ny),
        c=-(two * nx * ny),
        d=one - two * ny * ny,
        e=two * offset * nx,
        f=two * offset * ny,
    )


# ---------------------------------------------------------------------------
# Base geometry per triple.


def _base_geometry(labels: Tuple[int, int, int]) -> Tuple[int, List[Point], Point]:
    """Root, corner coordinates (angle pi/labels[k] at corner k), incenter."""
    if labels == (3, 3, 3):
        root = 3
        corners = [
            (_qn(0, root), _qn(0, root)),
            (_qn(1, root), _qn(0, root)),
            (_qn(Fraction(1, 2), root), QuadraticNumber(Fraction(0), Fraction(1, 2), root)),
        ]
        incenter = (_qn(Fraction(1, 2), root), QuadraticNumber(Fraction(0), Fraction(1, 6), root))
    elif labels == (2, 4, 4):
        root = 2
        corners = [
            (_qn(0, root), _qn(0, root)),
            (_qn(1, root), _qn(0, root)),
            (_qn(0, root), _qn(1, root)),
        ]
        inc = QuadraticNumber(Fraction(1), Fraction(-1, 2), root)
        incenter = (inc, inc)
    elif labels == (2, 3, 6):
        root = 3
        corners = [
            (_qn(0, root), _qn(0, root)),
            (_qn(1, root), _qn(0, root)),
            (_qn(0, root), QuadraticNumber(Fraction(0), Fraction(1), root)),
        ]
        inc = QuadraticNumber(Fraction(-1, 2), Fraction(1, 2), root)
        incenter = (inc, inc)
    else:
        raise ValueError(f"no flat geometry for {labels}")
    return root, corners, incenter


# ---------------------------------------------------------------------------
# Patches.


@dataclass
class DavisChamber:
    key: Tuple
    isometry: Isometry
    depth: int
    point: Point
    corners: Tuple[Point, Point, Point]


@dataclass
class DavisEdge:
    chambers: EdgeKey
    generator: int
    wall: Tuple
    midpoint: Point


@dataclass
class DavisCell:
    id: int
    corner_index: int
    center: Point
    chambers: Tuple[Tuple, ...]
    """Chamber keys in cyclic order around the center."""

    @property
    def sides(self) -> int:
        return len(self.chambers)


@dataclass
class WallCarrier:
    line: Tuple
    dual_edges: List[EdgeKey]
    cells: List[int]
    separates: bool
    side_counts: Tuple[int, int]
    pattern: Tuple[int, ...]


@dataclass
class DavisPatch:
    triple: CoxeterTriangle
    radius: int
    root: int
    chambers: Dict[Tuple, DavisChamber]
    edges: Dict[EdgeKey, DavisEdge]
    cells: Dict[int, DavisCell]
    base_key: Tuple
    reflections: Tuple[Isometry, Isometry, Isometry]
    base_corners: Tuple[Point, Point, Point]
    incenter: Point

    def cell_polygon(self, cell_id: int) -> List[Point]:
        return [self.chambers[k].point for k in self.cells[cell_id].chambers]

    def cell_label_pair(self, cell_id: int) -> Tuple[str, str]:
        cell = self.cells[cell_id]
        i, j = [t for t in range(3) if t != cell.corner_index]
        return (self.triple.names[i], self.triple.names[j])

    def chamber_adjacency(self) -> Dict[Tuple, Set[Tuple]]:
        adj: Dict[Tuple, Set[Tuple]] = {k: set() for k in self.chambers}
        for edge in self.edges:
            u, v = tuple(edge)
            adj[u].add(v)
            adj[v].add(u)
        return adj

    def stats(self) -> dict:
        return {
            "chambers": len(self.chambers),
            "edges": len(self.edges),
            "cells": len(self.cells),
            "cell_sizes": sorted({c.sides for c in self.cells.values()}),
        }


def _chamber_key(corners: Iterable[Point]) -> Tuple:
    return tuple((p[0].rational, p[0].radical, p[1].rational, p[1].radical) for p in corners)


def _line_key(p: Point, q: Point) -> Tuple:
    """Canonical (A, B, C) for the line A x + B y = C through p and q."""
    dx = q[0] - p[0]
    dy = q[1] - p[1]
    a = -dy
    b = dx
    c = a * p[0] + b * p[1]
    if a.sign() != 0:
        b = b / a
        c = c / a
        a = _qn(1, a.root)
    else:
        c = c / b
        b = _qn(1, b.root)
        a = _qn(0, b.root)
    return (
        (a.rational, a.radical),
        (b.rational, b.radical),
        (c.rational, c.radical),
        a.root,
    )


def _line_eval(key: Tuple, point: Point) -> QuadraticNumber:
    (ar, ai), (br, bi), (cr, ci), root = key
    a = QuadraticNumber(ar, ai, root)
    b = QuadraticNumber(br, bi, root)
    c = QuadraticNumber(cr, ci, root)
    return a * point[0] + b * point[1] - c


def _line_direction(key: Tuple) -> Point:
    (ar, ai), (br, bi), _, root = key
    a = QuadraticNumber(ar, ai, root)
    b = QuadraticNumber(br, bi, root)
    return (b, -a)


def build_davis_patch(
    triple: CoxeterTriangle,
    radius: int,
    max_chambers: int = 20000,
) -> DavisPatch:
    """Reflection-orbit patch of all chambers within gallery distance ``radius``.

    Chambers are deduplicated on their exact corner coordinates, which is
    faithful because the reflection group acts freely on chambers.  The
    2-cells kept are exactly the complete dihedral orbits, so every cell of
    the result is a full 2m-gon.
    """
    if radius < 0:
        raise ValueError("radius must be >= 0")
    root, corners, incenter = _base_geometry(triple.labels)
    reflections = []
    for i in range(3):
        j, k = [t for t in range(3) if t != i]
        reflections.append(_reflection_across(corners[j], corners[k], root))
    reflections = tuple(reflections)

    base = _identity_isometry(root)
    base_corners = tuple(corners)
    base_key = _chamber_key(base_corners)
    chambers: Dict[Tuple, DavisChamber] = {
        base_key: DavisChamber(base_key, base, 0, incenter, base_corners)
    }
    frontier = [base_key]
    for depth in range(1, radius + 1):
        nxt = []
        for key in frontier:
            g = chambers[key].isometry
            for i in range(3):
                h = g.compose(reflections[i])
                h_corners = tuple(h.apply(p) for p in corners)
                h_key = _chamber_key(h_corners)
                if h_key in chambers:
                    continue
                if len(chambers) >= max_chambers:
                    raise PatchTooLarge(
                        f"patch for {triple.labels} exceeds {max_chambers} chambers"
                    )
                chambers[h_key] = DavisChamber(
                    h_key, h, depth, h.apply(incenter), h_corners
                )
                nxt.append(h_key)
        frontier = nxt

    edges: Dict[EdgeKey, DavisEdge] = {}
    for key, chamber in chambers.items():
        for i in range(3):
            h = chamber.isometry.compose(reflections[i])
            h_key = _chamber_key(tuple(h.apply(p) for p in corners))
            if h_key not in chambers:
                continue
            ek = frozenset((key, h_key))
            if ek in edges:
                continue
            j, k2 = [t for t in range(3) if t != i]
            wall = _line_key(
                chamber.isometry.apply(corners[j]), chamber.isometry.apply(corners[k2])
            )
            p1 = chamber.point
            p2 = chambers[h_key].point
            half = Fraction(1, 2)
            midpoint = ((p1[0] + p2[0]) * half, (p1[1] + p2[1]) * half)
            edges[ek] = DavisEdge(ek, i, wall, midpoint)

    cells: Dict[int, DavisCell] = {}
    seen_centers: Dict[Tuple, int] = {}
    next_id = 0
    for key in sorted(chambers):
        chamber = chambers[key]
        for corner_index in range(3):
            center = chamber.isometry.apply(corners[corner_index])
            center_key = (
                center[0].rational,
                center[0].radical,
                center[1].rational,
                center[1].radical,
            )
            if center_key in seen_centers:
                continue
            i, j = [t for t in range(3) if t != corner_index]
            m = triple.labels[corner_index]
            cycle = [key]
            g = chamber.isometry
            ok = True
            for step in range(2 * m - 1):
                g = g.compose(reflections[i] if step % 2 == 0 else reflections[j])
                ck = _chamber_key(tuple(g.apply(p) for p in corners))
                if ck not in chambers:
                    ok = False
                    break
                cycle.append(ck)
            if not ok:
                continue
            seen_centers[center_key] = next_id
            cells[next_id] = DavisCell(next_id, corner_index, center, tuple(cycle))
            next_id += 1

    return DavisPatch(
        triple=triple,
        radius=radius,
        root=root,
        chambers=chambers,
        edges=edges,
        cells=cells,
        base_key=base_key,
        reflections=reflections,
        base_corners=base_corners,
        incenter=incenter,
    )


# ---------------------------------------------------------------------------
# Walls.


def walls(patch: DavisPatch) -> List[WallCarrier]:
    """All wall carriers of the patch, each with its separation check."""
    by_line: Dict[Tuple, List[EdgeKey]] = {}
    for ek, edge in patch.edges.items():
        by_line.setdefault(edge.wall, []).append(ek)

    out = []
    for line in sorted(by_line):
        duals = by_line[line]
        direction = _line_direction(line)

        def along(point: Point) -> QuadraticNumber:
            return direction[0] * point[0] + direction[1] * point[1]

        duals = sorted(duals, key=lambda ek: along(patch.edges[ek].midpoint))
        carrier = [
            cid
            for cid, cell in patch.cells.items()
            if _line_eval(line, cell.center).sign() == 0
        ]
        carrier.sort(key=lambda cid: along(patch.cells[cid].center))

        plus = minus = 0
        separates = True
        for key, chamber in patch.chambers.items():
            s = _line_eval(line, chamber.point).sign()
            if s > 0:
                plus += 1
            elif s < 0:
                minus += 1
            else:
                separates = False
        for ek in patch.edges:
            u, v = tuple(ek)
            su = _line_eval(line, patch.chambers[u].point).sign()
            sv = _line_eval(line, patch.chambers[v].point).sign()
            if su * sv < 0 and ek not in duals:
                separates = False
        if plus == 0 or minus == 0:
            separates = False

        out.append(
            WallCarrier(
                line=line,
                dual_edges=duals,
                cells=carrier,
                separates=separates,
                side_counts=(plus, minus),
                pattern=tuple(patch.cells[cid].sides for cid in carrier),
            )
        )
    return out


def base_wall_lines(patch: DavisPatch) -> List[Tuple]:
    """The three walls through the base chamber's sides, indexed by side."""
    lines = []
    for i in range(3):
        j, k = [t for t in range(3) if t != i]
        lines.append(_line_key(patch.base_corners[j], patch.base_corners[k]))
    return lines


# ---------------------------------------------------------------------------
# Orientation solving.


class _ParityUnionFind:
    """Union-find over edge variables with a parity on each link."""

    def __init__(self) -> None:
        self.parent: Dict = {}
        self.parity: Dict = {}

    def find(self, x) -> Tuple:
        if x not in self.parent:
            self.parent[x] = x
            self.parity[x] = 0
            return x, 0
        path = []
        while self.parent[x] != x:
            path.append(x)
            x = self.parent[x]
        root = x
        p = 0
        for node in reversed(path):
            p ^= self.parity[node]
            self.parent[node] = root
            self.parity[node] = p
        return root, self.parity[path[0]] if path else 0

    def union(self, x, y, parity: int) -> bool:
        """Impose bit(x) xor bit(y) == parity; False on contradiction."""
        rx, px = self.find(x)
        ry, py = self.find(y)
        if rx == ry:
            return (px ^ py) == parity
        self.parent[rx] = ry
        self.parity[rx] = px ^ py ^ parity
        return True

    def value(self, x) -> int:
        _, p = self.find(x)
        return p


def _canonical_vector(p: Point, q: Point) -> Tuple[Point, bool]:
    """Lexicographically positive direction for segment pq.

    Returns the vector and whether it runs p -> q.
    """
    dx = q[0] - p[0]
    dy = q[1] - p[1]
    s = dx.sign()
    if s > 0 or (s == 0 and dy.sign() > 0):
        return (dx, dy), True
    return (-dx, -dy), False


# ---------------------------------------------------------------------------
# Strips (wall-carrier templates).


@dataclass
class CoxeterStrip:
    """A finite run of carrier cells with solved edge orientations.

    ``orientation`` maps each edge to its (tail, head) chamber keys;
    ``labels`` to the reflection name of the dual generator.  The two side
    paths are vertex key sequences ordered along the wall.
    """

    triple: CoxeterTriangle
    wall: Tuple
    wall_side: int
    cells: List[DavisCell]
    points: Dict[Tuple, Point]
    cell_edges: Dict[int, List[EdgeKey]]
    labels: Dict[EdgeKey, str]
    orientation: Dict[EdgeKey, Tuple[Tuple, Tuple]]
    plus_path: List[Tuple]
    minus_path: List[Tuple]
    dual_edges: List[EdgeKey]
    patch: DavisPatch

    def boundary_paths(self) -> Tuple[List[Tuple], List[Tuple]]:
        return self.plus_path, self.minus_path

    def cell_block(self, cell_id: int) -> Tuple[str, str]:
        return self.patch.cell_label_pair(cell_id)


def _strip_edges(patch: DavisPatch, cell: DavisCell) -> List[EdgeKey]:
    cyc = cell.chambers
    return [frozenset((cyc[t], cyc[(t + 1) % len(cyc)])) for t in range(len(cyc))]


def _solve_strip_orientation(
    patch: DavisPatch,
    cells: List[DavisCell],
    side_paths: Sequence[List[Tuple]],
) -> Dict[EdgeKey, Tuple[Tuple, Tuple]]:
    uf = _ParityUnionFind()
    edge_set: Set[EdgeKey] = set()
    for cell in cells:
        ring = _strip_edges(patch, cell)
        edge_set.update(ring)
        m = len(ring) // 2
        for t in range(m):
            e1, e2 = ring[t], ring[t + m]
            v1, _ = _canonical_vector(*(patch.chambers[k].point for k in tuple(e1)))
            v2, _ = _canonical_vector(*(patch.chambers[k].point for k in tuple(e2)))
            parallel_same = v1 == v2
            # opposite sides must carry the same direction; if the canonical
            # vectors disagree the bits must differ.
            if not uf.union(e1, e2, 0 if parallel_same else 1):
                raise OrientationError("opposite-side constraints are contradictory")

    for path in side_paths:
        for t in range(len(path) - 2):
            u, v, w = path[t], path[t + 1], path[t + 2]
            e1 = frozenset((u, v))
            e2 = frozenset((v, w))
            _, forward1 = _canonical_vector(patch.chambers[u].point, patch.chambers[v].point)
            _, forward2 = _canonical_vector(patch.chambers[v].point, patch.chambers[w].point)
            # no source or sink at v: edge directions agree along the walk
            parity = (0 if forward1 else 1) ^ (0 if forward2 else 1)
            if not uf.union(e1, e2, parity):
                raise OrientationError("side-path constraints are contradictory")

    orientation: Dict[EdgeKey, Tuple[Tuple, Tuple]] = {}
    for ek in edge_set:
        u, v = sorted(ek)
        _, forward = _canonical_vector(patch.chambers[u].point, patch.chambers[v].point)
        bit = uf.value(ek)
        along_canonical = bit == 0
        runs_u_to_v = along_canonical == forward
        orientation[ek] = (u, v) if runs_u_to_v else (v, u)
    return orientation


def coxeter_line_template(
    triple: CoxeterTriangle,
    wall: int,
    length: int,
    max_radius: int = 40,
) -> CoxeterStrip:
    """Oriented carrier strip of ``length + 1`` cells along a base wall.

    ``wall`` picks one of the three walls through the base chamber's sides.
    The patch is grown until the strip fits; the orientation is solved from
    the opposite-side and no-reversal constraints and then re-validated.
    """
    if wall not in (0, 1, 2):
        raise ValueError("wall must index a base chamber side (0, 1 or 2)")
    if length < 0:
        raise ValueError("length must be >= 0")

    radius = 4
    while True:
        patch = build_davis_patch(triple, radius)
        line = base_wall_lines(patch)[wall]
        direction = _line_direction(line)

        def along(point: Point) -> QuadraticNumber:
            return direction[0] * point[0] + direction[1] * point[1]

        carrier = [
            cell
            for cell in patch.cells.values()
            if _line_eval(line, cell.center).sign() == 0
        ]
        carrier.sort(key=lambda cell: along(cell.center))
        base_cells = [
            idx
            for idx, cell in enumerate(carrier)
            if patch.base_key in cell.chambers
        ]
        if base_cells:
            start = base_cells[0]
            if len(carrier) - start >= length + 1:
                chosen = carrier[start : start + length + 1]
                # interior safety margin: every chamber of a chosen cell must
                # have all its own cells complete, else grow the patch.
                boundary_risk = any(
                    patch.chambers[k].depth >= patch.radius - 1
                    for cell in chosen
                    for k in cell.chambers
                )
                if not boundary_risk:
                    break
        radius += 4
        if radius > max_radius:
            raise PatchTooLarge(
                f"cannot fit a strip of {length + 1} cells within radius {max_radius}"
            )

    cells = chosen
    cell_edges = {cell.id: _strip_edges(patch, cell) for cell in cells}
    edge_count: Dict[EdgeKey, int] = {}
    for ring in cell_edges.values():
        for ek in ring:
            edge_count[ek] = edge_count.get(ek, 0) + 1

    duals = []
    side_edges = {1: [], -1: []}
    for ek, count in edge_count.items():
        mid = patch.edges[ek].midpoint
        s = _line_eval(line, mid).sign()
        if s == 0:
            duals.append(ek)
        elif count == 1:
            side_edges[s].append(ek)

    duals.sort(key=lambda ek: along(patch.edges[ek].midpoint))

    def path_from(eks: List[EdgeKey]) -> List[Tuple]:
        eks = sorted(eks, key=lambda ek: along(patch.edges[ek].midpoint))
        verts: List[Tuple] = []
        for ek in eks:
            u, v = sorted(tuple(ek), key=lambda k: along(patch.chambers[k].point))
            if not verts:
                verts.extend([u, v])
            else:
                if verts[-1] != u:
                    raise OrientationError("side path does not chain")
                verts.append(v)
        return verts

    plus_path = path_from(side_edges[1])
    minus_path = path_from(side_edges[-1])

    orientation = _solve_strip_orientation(patch, cells, [plus_path, minus_path])

    labels = {}
    for ring in cell_edges.values():
        for ek in ring:
            labels[ek] = triple.names[patch.edges[ek].generator]

    points = {}
    for cell in cells:
        for k in cell.chambers:
            points[k] = patch.chambers[k].point

    strip = CoxeterStrip(
        triple=triple,
        wall=line,
        wall_side=wall,
        cells=cells,
        points=points,
        cell_edges=cell_edges,
        labels=labels,
        orientation=orientation,
        plus_path=plus_path,
        minus_path=minus_path,
        dual_edges=duals,
        patch=patch,
    )
    problems = validate_strip(strip)
    if problems:
        raise OrientationError("; ".join(problems))
    return strip


def validate_strip(strip: CoxeterStrip) -> List[str]:
    """Check the oriented strip against the wall-line conditions.

    Conditions: every cell reads as a relator cell (single source, single
    sink, both boundary halves directed source to sink with alternating
    labels), and neither side path has a source or sink vertex.
    """
    problems = []
    for cell in strip.cells:
        ring = strip.cell_edges[cell.id]
        cyc = cell.chambers
        n2 = len(cyc)
        indeg = {k: 0 for k in cyc}
        outdeg = {k: 0 for k in cyc}
        for ek in ring:
            tail, head = strip.orientation[ek]
            outdeg[tail] += 1
            indeg[head] += 1
        sources = [k for k in cyc if outdeg[k] == 2]
        sinks = [k for k in cyc if indeg[k] == 2]
        if len(sources) != 1 or len(sinks) != 1:
            problems.append(
                f"cell {cell.id} has {len(sources)} sources and {len(sinks)} sinks"
            )
            continue
        for t in range(n2):
            e1 = ring[t]
            e2 = ring[(t + 1) % n2]
            if strip.labels[e1] == strip.labels[e2]:
                problems.append(f"cell {cell.id} repeats label {strip.labels[e1]}")
                break

    for path in (strip.plus_path, strip.minus_path):
        for t in range(len(path) - 2):
            u, v, w = path[t], path[t + 1], path[t + 2]
            d1 = strip.orientation[frozenset((u, v))]
            d2 = strip.orientation[frozenset((v, w))]
            into = (d1[1] == v) + (d2[1] == v)
            if into != 1:
                problems.append(f"orientation reverses at a side-path vertex")
    return problems


# ---------------------------------------------------------------------------
# Whole-patch orientations (flat checks).


def orient_patch(patch: DavisPatch) -> Dict[EdgeKey, Tuple[Tuple, Tuple]]:
    """Orient every edge along the canonical vector of its parallel family.

    Edges dual to parallel walls are parallel segments, so orienting each
    one along its lexicographically positive direction makes every family
    coherent; around any 2m-gon the positive directions form a contiguous
    arc of m sides, which yields exactly one source and one sink per cell.
    """
    orientation = {}
    for ek in patch.edges:
        u, v = sorted(ek)
        _, forward = _canonical_vector(patch.chambers[u].point, patch.chambers[v].point)
        orientation[ek] = (u, v) if forward else (v, u)
    return orientation


@dataclass
class FlatOrientationReport:
    coherent: bool
    witness: Optional[Tuple[Tuple, Tuple]] = None
    """Two wall lines whose dual edges disagree, when incoherent."""

    def __bool__(self) -> bool:
        return self.coherent


def coxeter_flat_orientation_check(
    patch: DavisPatch,
    orientation: Dict[EdgeKey, Tuple[Tuple, Tuple]],
) -> FlatOrientationReport:
    """Do edges dual to parallel walls all point the same way?

    Two walls are parallel when their normalised line keys share the
    direction part.  The witness on failure is a pair of wall lines whose
    dual edges carry opposite directions.
    """
    family_sign: Dict[Tuple, Tuple[int, Tuple]] = {}
    for ek, edge in patch.edges.items():
        if ek not in orientation:
            continue
        tail, head = orientation[ek]
        vec, forward = _canonical_vector(
            patch.chambers[tail].point, patch.chambers[head].point
        )
        sign = 1 if forward else -1
        family = edge.wall[:2]
        if family not in family_sign:
            family_sign[family] = (sign, edge.wall)
        elif family_sign[family][0] != sign:
            return FlatOrientationReport(False, (family_sign[family][1], edge.wall))
    return FlatOrientationReport(True)


# ---------------------------------------------------------------------------
# Word lengths.


def _word_isometry(triple: CoxeterTriangle, word: Sequence[str], patch_root: int,
                   reflections: Sequence[Isometry]) -> Isometry:
    g = _identity_isometry(patch_root)
    for name in word:
        if name not in triple.names:
            raise ValueError(f"unknown reflection name {name!r}")
        g = g.compose(reflections[triple.names.index(name)])
    return g


def coxeter_distance(
    triple: CoxeterTriangle,
    word1: Sequence[str],
    word2: Sequence[str],
    max_length: int = 64,
) -> int:
    """Word metric d(w1, w2) in the reflection group, exactly.

    Both words are sequences of reflection names.  The distance is the
    gallery distance between the two image chambers, found by breadth-first
    search over exact chamber keys; the search radius is bounded by the
    total input length, so it always terminates.
    """
    root, corners, incenter = _base_geometry(triple.labels)
    reflections = []
    for i in range(3):
        j, k = [t for t in range(3) if t != i]
        reflections.append(_reflection_across(corners[j], corners[k], root))

    g1 = _word_isometry(triple, word1, root, reflections)
    g2 = _word_isometry(triple, word2, root, reflections)
    # d(w1, w2) = length of w1^{-1} w2; compare chambers of g1 h and g2
    # by translating the search to start at g1's chamber.
    target = _chamber_key(tuple(g2.apply(p) for p in corners))
    start = _chamber_key(tuple(g1.apply(p) for p in corners))
    if start == target:
        return 0

    bound = min(max_length, len(word1) + len(word2))
    frontier = {start: g1}
    seen = {start}
    for depth in range(1, bound + 1):
        nxt = {}
        for key, g in frontier.items():
            for r in reflections:
                h = g.compose(r)
                hk = _chamber_key(tuple(h.apply(p) for p in corners))
                if hk in seen:
                    continue
                if hk == target:
                    return depth
                seen.add(hk)
                nxt[hk] = h
        frontier = nxt
    raise ValueError(f"words are farther apart than the search bound {bound}")


# ---------------------------------------------------------------------------
# Exports.


def _pt(point: Point) -> Tuple[float, float]:
    return (float(point[0]), float(point[1]))


def patch_to_json(patch: DavisPatch) -> str:
    chamber_ids = {k: i for i, k in enumerate(sorted(patch.chambers))}
    data = {
        "triple": list(patch.triple.labels),
        "names": list(patch.triple.names),
        "radius": patch.radius,
        "chambers": [
            {"id": chamber_ids[k], "depth": c.depth, "point": _pt(c.point)}
            for k, c in sorted(patch.chambers.items())
        ],
        "edges": [
            {
                "chambers": sorted(chamber_ids[k] for k in ek),
                "generator": patch.triple.names[e.generator],
            }
            for ek, e in sorted(patch.edges.items(), key=lambda kv: sorted(chamber_ids[k] for k in kv[0]))
        ],
        "cells": [
            {
                "id": cid,
                "sides": cell.sides,
                "labels": list(patch.cell_label_pair(cid)),
                "chambers": [chamber_ids[k] for k in cell.chambers],
            }
            for cid, cell in sorted(patch.cells.items())
        ],
    }
    return json.dumps(data, indent=2, sort_keys=True)


def patch_to_svg(patch: DavisPatch, scale: float = 60.0) -> str:
    xs = [float(c.point[0]) for c in patch.chambers.values()]
    ys = [float(c.point[1]) for c in patch.chambers.values()]
    pad = 1.0
    minx, maxx = min(xs) - pad, max(xs) + pad
    miny, maxy = min(ys) - pad, max(ys) + pad
    width = (maxx - minx) * scale
    height = (maxy - miny) * scale

    def coord(point: Point) -> Tuple[float, float]:
        x, y = _pt(point)
        return ((x - minx) * scale, (maxy - y) * scale)

    fills = {4: "#d8e8f8", 6: "#e8f8d8", 8: "#f8e8d8", 12: "#f8d8e8", 16: "#e8d8f8"}
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0f}" height="{height:.0f}">'
    ]
    for cid, cell in sorted(patch.cells.items()):
        pts = " ".join(f"{x:.2f},{y:.2f}" for x, y in map(coord, patch.cell_polygon(cid)))
        fill = fills.get(cell.sides, "#eeeeee")
        parts.append(f'<polygon points="{pts}" fill="{fill}" stroke="#444" stroke-width="1"/>')
    for ek in sorted(patch.edges, key=lambda e: sorted(map(str, e))):
        u, v = tuple(ek)
        x1, y1 = coord(patch.chambers[u].point)
        x2, y2 = coord(patch.chambers[v].point)
        parts.append(
            f'<line x1="{x1:.2f}" y1="{y1:.2f}" x2="{x2:.2f}" y2="{y2:.2f}" '
            'stroke="#999" stroke-width="0.5"/>'
        )
    parts.append("</svg>")
    return "\n".join(parts)


def wall_adjacency_dot(patch: DavisPatch) -> str:
    """DOT graph with one node per wall, edges between crossing walls."""
    carriers = walls(patch)
    names = {c.line: f"w{i}" for i, c in enumerate(carriers)}
    lines = ["graph walls {"]
    for c in carriers:
        lines.append(
            f'  {names[c.line]} [label="|carrier|={len(c.cells)} sep={int(c.separates)}"];'
        )
    cell_walls: Dict[int, Set[Tuple]] = {}
    for c in carriers:
        for cid in c.cells:
            cell_walls.setdefault(cid, set()).add(c.line)
    drawn = set()
    for cid, wset in sorted(cell_walls.items()):
        ws = sorted(wset)
        for i in range(len(ws)):
            for j in range(i + 1, len(ws)):
                pair = (ws[i], ws[j])
                if pair in drawn:
                    continue
                drawn.add(pair)
                lines.append(f"  {names[ws[i]]} -- {names[ws[j]]};")
    lines.append("}")
    return "\n".join(lines)
