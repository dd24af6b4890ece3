"""Thickened dihedral complexes and metric vertex links.

The Cayley 2-complex of ``DA_n`` is thickened in two steps.  Each 2n-gon
cell gets a center ("fake") vertex joined to its boundary ("real")
vertices, and two centers are joined whenever their cells share at
least two boundary edges; the flag completion of the result carries a
piecewise Euclidean metric determined by three edge lengths, all chords
of a unit circle:

* real to fake: length 1;
* real to real: the side of a regular 2n-gon with radius 1;
* fake to fake over an i-edge overlap: the chord spanning the fraction
  ``(n-i)/(2n)`` of a full turn.

The link of a vertex is a weighted graph: one vertex per incident
edge, one edge per incident triangle, weighted by the triangle's apex
angle at the center.  Whenever a closed form exists the angle is kept
as an exact fraction of a turn and cross-checked against the numeric
law of cosines; remaining angles (between two center vertices seen
from a third) are numeric only.

Link vertices are named by their role.  At a real center the four
neighbors along generator edges are ``a^i, a^o, b^i, b^o`` (in/out),
and cell centers are ``l^-1o``, ``r^-1o``, ``d1^-1o``..., ``u1^-1o``...
where the d-side cells pass through the center with an incoming b edge
and an outgoing a edge, and the index measures the overlap with the
cell at the left tip.  At a fake center the boundary vertices are
``v0..vn`` (one half) and ``v'1..v'{n-1}`` (the other), and neighbor
centers are ``L{m}/R{m}`` (overlap of m edges containing the left or
right tip, in the v-half) or primed (in the v'-half).

Every link designates a neck pair; all short cycles must pass through
both necks, and neck-to-neck paths of angular length exactly pi follow
a small list of families, enumerated by :func:`neck_paths`.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, FrozenSet, List, Optional, Sequence, Set, Tuple, Union

from .dihedral import (
    Ball,
    LazyBall,
    NormalForm,
    Precell,
    alternating_word,
    identity,
    multiply_letter,
    parse_key,
    precell_intersection,
)
from .exactgeom import UNIT_CHORD, Angle, Chord, angle_sum, corner_angle

Source = Union[Ball, LazyBall]

TWO_PI = 2 * math.pi


class MarginViolation(Exception):
    """The requested vertex sits too close to the ball boundary."""


# ---------------------------------------------------------------------------
# Edge lengths.


@dataclass(frozen=True)
class EdgeLength:
    kind: str  # real-real | real-fake | fake-fake
    n: int
    shared_edges: Optional[int]
    chord: Chord

    @property
    def value(self) -> float:
        return self.chord.value

    @property
    def turn_fraction(self) -> Fraction:
        return self.chord.t


def edge_length(kind: str, n: int, shared_edges: Optional[int] = None) -> EdgeLength:
    """Exact length of a complex edge as a unit-circle chord."""
    if kind == "real-fake":
        return EdgeLength(kind, n, None, UNIT_CHORD)
    if kind == "real-real":
        return EdgeLength(kind, n, None, Chord(Fraction(1, 2 * n)))
    if kind == "fake-fake":
        if shared_edges is None or not 2 <= shared_edges <= n - 1:
            raise ValueError(
                f"fake-fake edges need 2 <= shared edges <= {n - 1}, got {shared_edges}"
            )
        return EdgeLength(kind, n, shared_edges, Chord(Fraction(n - shared_edges, 2 * n)))
    raise ValueError(f"unknown edge kind {kind!r}")


# ---------------------------------------------------------------------------
# Thickened balls.


def fake_vertex_id(tip: str) -> str:
    return f"o|{tip}"


def is_fake_id(vertex: str) -> bool:
    return vertex.startswith("o|")


def fake_vertex_tip(vertex: str) -> str:
    return vertex[2:]


@dataclass
class ThickenedBall:
    """A ball with cell centers, center-center edges, and edge lengths."""

    ball: Ball
    fake_vertices: List[str]
    fake_edges: List[Tuple[str, str, int]]  # (tip1, tip2, shared edge count)

    @property
    def n(self) -> int:
        return self.ball.n

    def edge_lengths_used(self) -> List[EdgeLength]:
        out = [edge_length("real-real", self.n), edge_length("real-fake", self.n)]
        for count in sorted({c for _, _, c in self.fake_edges}):
            out.append(edge_length("fake-fake", self.n, count))
        return out

    def triangles_at_fake(self, tip: str) -> List[Tuple[str, str, str]]:
        """Flag triangles containing the center of the cell at ``tip``."""
        cell = self.ball.cells_by_tip[tip]
        o = fake_vertex_id(tip)
        tris = []
        for u, v, _ in cell.oriented_edges():
            tris.append((o, u, v))
        mine = cell.edge_pairs()
        for t1, t2, _ in self.fake_edges:
            if tip not in (t1, t2):
                continue
            other_tip = t2 if t1 == tip else t1
            other_cell = self.ball.cells_by_tip[other_tip]
            for x in set(cell.vertices) & set(other_cell.vertices):
                tris.append((o, fake_vertex_id(other_tip), x))
        return tris


def thicken(ball: Ball) -> ThickenedBall:
    """Add cell centers and the center-center edges of the ≥2-overlap rule."""
    fake_vertices = [fake_vertex_id(c.tip) for c in ball.precells]
    by_vertex: Dict[str, List[int]] = {}
    for idx, cell in enumerate(ball.precells):
        for v in cell.vertices:
            by_vertex.setdefault(v, []).append(idx)
    pairs = sorted(
        {
            (i, j)
            for members in by_vertex.values()
            for i in members
            for j in members
            if i < j
        }
    )
    fake_edges = []
    for i, j in pairs:
        c1, c2 = ball.precells[i], ball.precells[j]
        shared = len(c1.edge_pairs() & c2.edge_pairs())
        if shared >= 2:
            fake_edges.append((c1.tip, c2.tip, shared))
    return ThickenedBall(ball=ball, fake_vertices=fake_vertices, fake_edges=fake_edges)


# ---------------------------------------------------------------------------
# Metric links.


@dataclass(frozen=True)
class LinkVertex:
    name: str
    kind: str  # real | fake
    payload: str  # element key for reals, cell tip for fakes


@dataclass
class MetricLinkGraph:
    n: int
    center: str
    center_kind: str  # real | fake
    vertices: Dict[str, LinkVertex]
    edges: Dict[FrozenSet[str], Angle]
    necks: Tuple[str, str]
    plus_side: Set[str]
    minus_side: Set[str]
    block: Optional[str] = None  # set when part of a multi-block assembly

    def adjacency(self) -> Dict[str, Set[str]]:
        adj: Dict[str, Set[str]] = {v: set() for v in self.vertices}
        for pair in self.edges:
            u, v = tuple(pair)
            adj[u].add(v)
            adj[v].add(u)
        return adj

    def angle(self, u: str, v: str) -> Angle:
        return self.edges[frozenset((u, v))]

    def path_length(self, path: Sequence[str]) -> Angle:
        return angle_sum(self.angle(u, v) for u, v in zip(path, path[1:]))

    def real_names(self) -> List[str]:
        return sorted(v.name for v in self.vertices.values() if v.kind == "real")

    def fake_names(self) -> List[str]:
        return sorted(v.name for v in self.vertices.values() if v.kind == "fake")

    def numeric_only_edges(self) -> List[Tuple[str, str]]:
        out = []
        for pair, angle in sorted(self.edges.items(), key=lambda kv: sorted(kv[0])):
            if angle.turns is None:
                out.append(tuple(sorted(pair)))
        return out

    def to_dot(self) -> str:
        lines = [f'graph link_{self.center_kind} {{']
        for name in sorted(self.vertices):
            vx = self.vertices[name]
            shape = "circle" if vx.kind == "fake" else "point"
            lines.append(f'  "{name}" [shape={shape}];')
        for pair, angle in sorted(self.edges.items(), key=lambda kv: sorted(kv[0])):
            u, v = sorted(pair)
            if angle.turns is not None:
                label = f"{angle.turns}*2pi"
            else:
                label = f"{angle.radians:.6f}"
            lines.append(f'  "{u}" -- "{v}" [label="{label}"];')
        lines.append("}")
        return "\n".join(lines)


def _upper_in_letter(idx: int) -> str:
    return "a" if idx % 2 == 1 else "b"


def _position_letters(half: str, idx: int, n: int) -> Tuple[Optional[str], Optional[str]]:
    """Incoming/outgoing boundary letters at boundary position (half, idx)."""
    start = "a" if half == "upper" else "b"
    word = alternating_word(start, n)
    incoming = word[idx - 1] if idx >= 1 else None
    outgoing = word[idx] if idx <= n - 1 else None
    return incoming, outgoing


def _source_nf(source: Source, key: str) -> NormalForm:
    if isinstance(source, Ball):
        return source.elements[key]
    return parse_key(source.n, key)


def _check_real_margin(source: Source, key: str, margin: int) -> None:
    if isinstance(source, Ball):
        if key not in source.elements:
            raise MarginViolation(f"vertex {key!r} not in ball")
        if source.distance[key] + margin > source.radius:
            raise MarginViolation(
                f"vertex at distance {source.distance[key]} needs margin {margin} "
                f"in a radius-{source.radius} ball"
            )
    else:
        if _source_nf(source, key).positive_length + margin > source.radius:
            raise MarginViolation(
                f"vertex spelling length exceeds radius {source.radius} minus margin {margin}"
            )


def _shared_edge_count(c1: Precell, c2: Precell) -> int:
    return len(c1.edge_pairs() & c2.edge_pairs())


def build_link(source, vertex: str) -> MetricLinkGraph:
    """Metric link of a vertex, from a ball, lazy ball, or thickened ball.

    ``vertex`` is an element key for a real vertex or ``o|<tip>`` for
    the center of a cell.  The vertex must be interior enough that all
    cells shaping the link lie inside the source's radius.
    """
    if isinstance(source, ThickenedBall):
        source = source.ball
    if is_fake_id(vertex):
        return _build_fake_link(source, fake_vertex_tip(vertex))
    return _build_real_link(source, vertex)


def _build_real_link(source: Source, key: str) -> MetricLinkGraph:
    n = source.n
    _check_real_margin(source, key, 2 * n)
    positioned = source.cells_through(key)
    if len(positioned) != 2 * n:
        raise MarginViolation(
            f"expected {2 * n} cells through {key!r}, found {len(positioned)}"
        )
    center = _source_nf(source, key)

    vertices: Dict[str, LinkVertex] = {}
    edges: Dict[FrozenSet[str], Angle] = {}

    for letter in ("a", "b"):
        vertices[f"{letter}^i"] = LinkVertex(
            f"{letter}^i", "real", multiply_letter(center, letter, -1).key
        )
        vertices[f"{letter}^o"] = LinkVertex(
            f"{letter}^o", "real", multiply_letter(center, letter, 1).key
        )

    left_cell = next(c for h, i, c in positioned if (h, i) == ("upper", 0))
    names: Dict[Tuple[str, int], str] = {}
    cells_by_name: Dict[str, Precell] = {}
    for half, idx, cell in positioned:
        if (half, idx) == ("upper", 0):
            name = "l^-1o"
        elif (half, idx) == ("upper", n):
            name = "r^-1o"
        else:
            incoming, outgoing = _position_letters(half, idx, n)
            side = "d" if (incoming, outgoing) == ("b", "a") else "u"
            overlap = _shared_edge_count(cell, left_cell)
            name = f"{side}{n - overlap}^-1o"
        if name in cells_by_name:
            raise AssertionError(f"duplicate link name {name} at {key}")
        names[(half, idx)] = name
        cells_by_name[name] = cell
        vertices[name] = LinkVertex(name, "fake", cell.tip)

    type_one = corner_angle(
        left=edge_length("real-real", n).chord, right=UNIT_CHORD, across=UNIT_CHORD
    )
    for (half, idx), name in sorted(names.items()):
        if idx == 0:
            ins: List[str] = []
            outs = ["a", "b"]  # both halves leave the left tip
        elif idx == n:
            ins = ["a", "b"]  # both halves arrive at the right tip
            outs = []
        else:
            incoming, outgoing = _position_letters(half, idx, n)
            ins, outs = [incoming], [outgoing]
        for letter in ins:
            edges[frozenset((name, f"{letter}^i"))] = type_one
        for letter in outs:
            edges[frozenset((name, f"{letter}^o"))] = type_one

    fake_names = sorted(cells_by_name)
    for i, n1 in enumerate(fake_names):
        for n2 in fake_names[i + 1 :]:
            shared = _shared_edge_count(cells_by_name[n1], cells_by_name[n2])
            if shared >= 2:
                across = edge_length("fake-fake", n, shared).chord
                edges[frozenset((n1, n2))] = corner_angle(
                    left=UNIT_CHORD, right=UNIT_CHORD, across=across
                )

    d_family = {"l^-1o", "r^-1o"} | {s for s in fake_names if s.startswith("d")}
    u_family = {"l^-1o", "r^-1o"} | {s for s in fake_names if s.startswith("u")}
    return MetricLinkGraph(
        n=n,
        center=key,
        center_kind="real",
        vertices=vertices,
        edges=edges,
        necks=("l^-1o", "r^-1o"),
        plus_side={"b^i", "a^o"} | d_family,
        minus_side={"a^i", "b^o"} | u_family,
    )


def _build_fake_link(source: Source, tip: str) -> MetricLinkGraph:
    n = source.n
    _check_real_margin(source, tip, 3 * n)
    cell = source.cell_at(tip)
    if cell is None:
        raise MarginViolation(f"cell at tip {tip!r} does not fit in the source")

    vertices: Dict[str, LinkVertex] = {}
    edges: Dict[FrozenSet[str], Angle] = {}

    real_name: Dict[str, str] = {}
    for i, v in enumerate(cell.upper):
        real_name[v] = f"v{i}"
    for i, v in enumerate(cell.lower):
        if 0 < i < n:
            real_name[v] = f"v'{i}"
    for v, name in real_name.items():
        vertices[name] = LinkVertex(name, "real", v)

    # neighbor cells: share >= 2 boundary edges with this cell
    candidates: Dict[str, Precell] = {}
    for v in cell.vertices:
        for _, _, c in source.cells_through(v):
            if c.tip != cell.tip:
                candidates.setdefault(c.tip, c)
    neighbor: Dict[str, Precell] = {}
    overlap_of: Dict[str, "object"] = {}
    for cand_tip in sorted(candidates):
        cand = candidates[cand_tip]
        inter = precell_intersection(cell, cand)
        if inter.edge_count < 2:
            continue
        if inter.kind != "path" or inter.halves[0] is None:
            raise AssertionError(f"irregular overlap between {tip} and {cand_tip}")
        side = "L" if cell.left_tip in inter.shared_vertices else "R"
        prime = "" if inter.halves[0] == "upper" else "'"
        name = f"{side}{prime}{inter.edge_count}"
        if name in neighbor:
            raise AssertionError(f"two cells claim link position {name} at {tip}")
        neighbor[name] = cand
        overlap_of[name] = inter
        vertices[name] = LinkVertex(name, "fake", cand.tip)

    boundary_angle = corner_angle(
        left=UNIT_CHORD, right=UNIT_CHORD, across=edge_length("real-real", n).chord
    )
    for path in (cell.upper, cell.lower):
        for x, y in zip(path, path[1:]):
            edges[frozenset((real_name[x], real_name[y]))] = boundary_angle

    for name in sorted(neighbor):
        m = overlap_of[name].edge_count
        leg = edge_length("fake-fake", n, m).chord
        angle = corner_angle(left=UNIT_CHORD, right=leg, across=UNIT_CHORD)
        for v in overlap_of[name].shared_vertices:
            edges[frozenset((name, real_name[v]))] = angle

    fake_names = sorted(neighbor)
    for i, n1 in enumerate(fake_names):
        for n2 in fake_names[i + 1 :]:
            shared = _shared_edge_count(neighbor[n1], neighbor[n2])
            if shared >= 2:
                angle = corner_angle(
                    left=edge_length("fake-fake", n, overlap_of[n1].edge_count).chord,
                    right=edge_length("fake-fake", n, overlap_of[n2].edge_count).chord,
                    across=edge_length("fake-fake", n, shared).chord,
                )
                edges[frozenset((n1, n2))] = angle

    upper_reals = {f"v{i}" for i in range(n + 1)}
    lower_reals = {f"v'{i}" for i in range(1, n)} | {"v0", f"v{n}"}
    plus = upper_reals | {s for s in fake_names if "'" not in s}
    minus = lower_reals | {s for s in fake_names if "'" in s}
    return MetricLinkGraph(
        n=n,
        center=fake_vertex_id(tip),
        center_kind="fake",
        vertices=vertices,
        edges=edges,
        necks=("v0", f"v{n}"),
        plus_side=plus,
        minus_side=minus,
    )


# ---------------------------------------------------------------------------
# 2pi-largeness.


@dataclass
class CycleViolation:
    cycle: List[str]
    radians: float
    turns: Optional[Fraction]


@dataclass
class SystolicReport:
    two_pi_large: bool
    violations: List[CycleViolation]
    cycles_examined: int
    numeric_only_edges: List[Tuple[str, str]]

    def __bool__(self) -> bool:
        return self.two_pi_large

    def to_json(self) -> dict:
        return {
            "twoPiLarge": self.two_pi_large,
            "cyclesExamined": self.cycles_examined,
            "numericOnlyEdges": [list(e) for e in self.numeric_only_edges],
            "violations": [
                {
                    "cycle": v.cycle,
                    "radians": v.radians,
                    "turns": str(v.turns) if v.turns is not None else None,
                }
                for v in self.violations
            ],
        }


def check_two_pi_large(
    link: MetricLinkGraph, tolerance: float = 1e-9, cycle_guard: int = 2_000_000
) -> SystolicReport:
    """Search for 2-full simple cycles of angular length below 2 pi.

    A cycle is 2-full when no link edge joins two of its vertices that
    have a common neighbor along the cycle.  The DFS enumerates each
    simple cycle once (smallest vertex first, direction normalized),
    pruning branches whose partial angular length already reaches the
    2 pi budget and branches that have just created a local diagonal,
    since both properties are inherited by extensions.
    """
    adj = link.adjacency()
    order = {name: i for i, name in enumerate(sorted(adj))}
    violations: List[CycleViolation] = []
    examined = 0

    def has_edge(u: str, v: str) -> bool:
        return frozenset((u, v)) in link.edges

    budget = TWO_PI - tolerance

    def extend(path: List[str], length: float) -> None:
        nonlocal examined
        examined += 1
        if examined > cycle_guard:
            raise RuntimeError("cycle enumeration guard exceeded")
        head = path[-1]
        start = path[0]
        for nxt in sorted(adj[head], key=order.get):
            if order[nxt] < order[start]:
                continue
            if nxt == start and len(path) >= 3:
                if len(path) >= 4 and path[1] > path[-1]:
                    continue  # direction dedup
                if has_edge(path[-2], start) and len(path) >= 4:
                    continue
                if has_edge(head, path[1]) and len(path) >= 4:
                    continue
                if len(path) == 3:
                    continue  # triangles carry their own diagonal
                total = length + link.angle(head, start).radians
                if total < budget:
                    angles = [link.angle(u, v) for u, v in zip(path, path[1:])]
                    angles.append(link.angle(head, start))
                    s = angle_sum(angles)
                    if s.turns is not None and s.turns >= 1:
                        continue  # numeric roundoff below budget, exact at it
                    violations.append(
                        CycleViolation(cycle=list(path), radians=total, turns=s.turns)
                    )
                continue
            if nxt in path:
                continue
            if len(path) >= 2 and has_edge(path[-2], nxt):
                continue  # local diagonal: no extension is 2-full
            step = length + link.angle(head, nxt).radians
            if step >= budget:
                continue
            path.append(nxt)
            extend(path, step)
            path.pop()

    for start in sorted(adj, key=order.get):
        extend([start], 0.0)

    return SystolicReport(
        two_pi_large=not violations,
        violations=violations,
        cycles_examined=examined,
        numeric_only_edges=link.numeric_only_edges(),
    )


# ---------------------------------------------------------------------------
# Neck paths.


@dataclass
class NeckPath:
    path: List[str]
    radians: float
    turns: Optional[Fraction]
    is_pi: bool
    family: Optional[str]


@dataclass
class NeckPathReport:
    minimum_radians: float
    minimum_is_pi: bool
    paths: List[NeckPath]
    unmatched_pi_paths: List[List[str]]

    @property
    def pi_paths(self) -> List[NeckPath]:
        return [p for p in self.paths if p.is_pi]


def neck_paths(link: MetricLinkGraph, budget: float = math.pi + 1e-9) -> NeckPathReport:
    """All simple neck-to-neck paths with angular length below the budget.

    Every path of angular length exactly pi is classified into one of
    the closed-form families; a pi path outside every family is
    reported as unmatched (none are expected).
    """
    src, dst = link.necks
    adj = link.adjacency()
    found: List[NeckPath] = []

    def walk(path: List[str], length: float) -> None:
        head = path[-1]
        if head == dst:
            angles = [link.angle(u, v) for u, v in zip(path, path[1:])]
            total = angle_sum(angles)
            is_pi = (
                total.turns == Fraction(1, 2)
                if total.turns is not None
                else abs(total.radians - math.pi) <= 1e-9
            )
            family = _classify_pi_path(link, path) if is_pi else None
            found.append(
                NeckPath(
                    path=list(path),
                    radians=total.radians,
                    turns=total.turns,
                    is_pi=is_pi,
                    family=family,
                )
            )
            return
        for nxt in sorted(adj[head]):
            if nxt in path:
                continue
            step = length + link.angle(head, nxt).radians
            if step > budget:
                continue
            path.append(nxt)
            walk(path, step)
            path.pop()

    walk([src], 0.0)
    found.sort(key=lambda p: (p.radians, p.path))
    minimum = found[0].radians if found else math.inf
    unmatched = [p.path for p in found if p.is_pi and p.family is None]
    return NeckPathReport(
        minimum_radians=minimum,
        minimum_is_pi=bool(found) and abs(minimum - math.pi) <= 1e-9,
        paths=found,
        unmatched_pi_paths=unmatched,
    )


_DU_NAME = re.compile(r"^([du])(\d+)\^-1o$")
_LR_NAME = re.compile(r"^([LR])(')?(\d+)$")
_V_NAME = re.compile(r"^v(')?(\d+)$")


def _classify_pi_path(link: MetricLinkGraph, path: Sequence[str]) -> Optional[str]:
    if link.center_kind == "real":
        return _classify_real_pi_path(link, path)
    return _classify_fake_pi_path(link, path)


def _classify_real_pi_path(link: MetricLinkGraph, path: Sequence[str]) -> Optional[str]:
    # normalize: run from the right neck to the left neck
    names = list(path)
    if names[0] == "l^-1o":
        names.reverse()
    if names[0] != "r^-1o" or names[-1] != "l^-1o":
        return None
    n = link.n
    for side, real_in, real_out in (("d", "b^i", "a^o"), ("u", "a^i", "b^o")):
        mirror = "" if side == "d" else "-mirror"
        inner = names[1:-1]
        if inner == [real_in, f"{side}1^-1o"]:
            return f"neck-real-fake{mirror}"
        if inner == [f"{side}{n - 1}^-1o", real_out]:
            return f"fake-real-neck{mirror}"
        if n == 2 and inner == [real_in, f"{side}1^-1o", real_out]:
            # n = 2 has no center-center edges; pi paths alternate instead
            return f"square-alternating{mirror}"
        indices = [n]
        for name in inner:
            m = _DU_NAME.match(name)
            if not m or m.group(1) != side:
                indices = None
                break
            indices.append(int(m.group(2)))
        if indices is not None:
            indices.append(0)
            if all(x > y for x, y in zip(indices, indices[1:])):
                return f"fake-descent{mirror}"
    return None


def _classify_fake_pi_path(link: MetricLinkGraph, path: Sequence[str]) -> Optional[str]:
    n = link.n
    names = list(path)
    if names[0] == f"v{n}":
        names.reverse()
    if names[0] != "v0" or names[-1] != f"v{n}":
        return None
    for prime in ("", "'"):
        family = _match_fake_family(names, n, prime)
        if family is not None:
            return family + ("-mirror" if prime else "")
    return None


def _match_fake_family(names: Sequence[str], n: int, prime: str) -> Optional[str]:
    """Match one half's path grammar: reals [L-run reals [R-run real]]."""

    def real_index(name: str) -> Optional[int]:
        m = _V_NAME.match(name)
        if not m:
            return None
        p, i = m.group(1) or "", int(m.group(2))
        if i in (0, n):
            return i if p == "" else None  # the two tips are unprimed
        return i if p == prime else None

    def lr_index(name: str, letter: str) -> Optional[int]:
        m = _LR_NAME.match(name)
        if not m or m.group(1) != letter or (m.group(2) or "") != prime:
            return None
        return int(m.group(3))

    runs: List[Tuple[str, List[int]]] = []
    for name in names:
        i = real_index(name)
        kind = "real" if i is not None else None
        if kind is None:
            for letter in "LR":
                i = lr_index(name, letter)
                if i is not None:
                    kind = letter
                    break
        if kind is None:
            return None
        if runs and runs[-1][0] == kind:
            runs[-1][1].append(i)
        else:
            runs.append((kind, [i]))
    kinds = [k for k, _ in runs]
    vals = [v for _, v in runs]

    def consec(xs: List[int]) -> bool:
        return xs == list(range(xs[0], xs[0] + len(xs)))

    def strictly_up(xs: List[int]) -> bool:
        return all(x < y for x, y in zip(xs, xs[1:]))

    def strictly_down(xs: List[int]) -> bool:
        return all(x > y for x, y in zip(xs, xs[1:]))

    if kinds == ["real"]:
        return "all-real" if vals[0] == list(range(n + 1)) else None
    if kinds == ["real", "R", "real"]:
        lead, rr, tail = vals
        if (
            consec(lead)
            and lead[0] == 0
            and strictly_down(rr)
            and rr[-1] >= 2
            and lead[-1] == n - rr[0]
            and tail == [n]
        ):
            return "real-then-right-fakes"
        return None
    if kinds == ["real", "L", "real"]:
        lead, lr, tail = vals
        if (
            lead == [0]
            and strictly_up(lr)
            and lr[0] >= 2
            and consec(tail)
            and tail[0] == lr[-1]
            and tail[-1] == n
        ):
            return "left-fakes-then-real"
        return None
    if kinds == ["real", "L", "real", "R", "real"]:
        lead, lr, mid, rr, tail = vals
        if (
            lead == [0]
            and strictly_up(lr)
            and lr[0] >= 2
            and consec(mid)
            and mid[0] == lr[-1]
            and strictly_down(rr)
            and rr[-1] >= 2
            and mid[-1] == n - rr[0]
            and tail == [n]
        ):
            return "left-and-right-fakes"
        return None
    return None


# ---------------------------------------------------------------------------
# Cross-block assembly.


def assemble_cross_block_link(graph, star: Dict[Tuple[str, str], MetricLinkGraph]) -> MetricLinkGraph:
    """Glue per-block links of a common real vertex along generator reals.

    ``star`` maps defining-graph edges (sorted vertex pairs) to the
    dihedral link of the block over that edge.  The block link's letter
    ``a`` means the smaller endpoint, ``b`` the larger.  Real link
    vertices become ``{generator}^i/o`` and are shared across blocks;
    fake vertices are namespaced by their block.
    """
    vertices: Dict[str, LinkVertex] = {}
    edges: Dict[FrozenSet[str], Angle] = {}
    for pair in sorted(star):
        x, y = sorted(pair)
        if not graph.has_edge(x, y):
            raise ValueError(f"star edge {pair} is not an edge of the graph")
        block = f"{x}-{y}"
        link = star[pair]
        if link.center_kind != "real":
            raise ValueError("cross-block assembly glues links of real vertices")
        rename: Dict[str, str] = {}
        for name, vx in link.vertices.items():
            if vx.kind == "real":
                letter, direction = name.split("^")
                gen = x if letter == "a" else y
                new = f"{gen}^{direction}"
                rename[name] = new
                vertices.setdefault(new, LinkVertex(new, "real", f"{block}:{vx.payload}"))
            else:
                new = f"{block}:{name}"
                rename[name] = new
                vertices[new] = LinkVertex(new, "fake", f"{block}:{vx.payload}")
        for epair, angle in link.edges.items():
            u, v = tuple(epair)
            edges[frozenset((rename[u], rename[v]))] = angle
    return MetricLinkGraph(
        n=0,
        center="assembled",
        center_kind="real",
        vertices=vertices,
        edges=edges,
        necks=("", ""),
        plus_side=set(),
        minus_side=set(),
    )


def dihedral_star_link(graph) -> MetricLinkGraph:
    """Assembled link of the identity vertex over every edge of a graph."""
    star = {}
    for x, y, m in graph.edges:
        source = LazyBall(m, 4 * m)
        star[(x, y)] = build_link(source, identity(m).key)
    return assemble_cross_block_link(graph, star)


@dataclass
class ShortCycleClass:
    case: int
    blocks: List[str]
    detail: str


def classify_short_cycle(
    graph, link: MetricLinkGraph, cycle: Sequence[str], tolerance: float = 1e-9
) -> ShortCycleClass:
    """Sort a short simple cycle of an assembled link into one of four shapes.

    The shapes: within one block; across two blocks meeting at a
    generator with half a turn in each; a six-cycle over a Euclidean
    triangle of blocks; or a four-block circuit over a full square with
    a quarter turn inside each block.
    """
    angles = [link.angle(u, v) for u, v in zip(cycle, list(cycle[1:]) + [cycle[0]])]
    total = angle_sum(angles)
    if total.radians > TWO_PI + tolerance:
        raise ValueError("cycle exceeds angular length 2pi")

    def block_of(name: str) -> Optional[str]:
        vx = link.vertices[name]
        if vx.kind == "fake":
            return name.split(":", 1)[0]
        return None

    edge_blocks: List[str] = []
    per_block: Dict[str, float] = {}
    closed = list(cycle) + [cycle[0]]
    for u, v in zip(closed, closed[1:]):
        bu, bv = block_of(u), block_of(v)
        blocks = {b for b in (bu, bv) if b is not None}
        if len(blocks) > 1:
            raise ValueError(f"edge {u}-{v} spans two blocks; assembly is broken")
        if not blocks:
            raise ValueError(f"edge {u}-{v} joins two real vertices; links forbid this")
        b = blocks.pop()
        edge_blocks.append(b)
        per_block[b] = per_block.get(b, 0.0) + link.angle(u, v).radians

    support = sorted(per_block)
    if len(support) == 1:
        return ShortCycleClass(1, support, "single block")
    defining = [tuple(b.split("-")) for b in support]
    if len(support) == 2:
        shared = set(defining[0]) & set(defining[1])
        if len(shared) == 1 and all(
            abs(v - math.pi) <= tolerance for v in per_block.values()
        ):
            g = shared.pop()
            crossing = [
                name
                for name in cycle
                if link.vertices[name].kind == "real" and name.split("^")[0] == g
            ]
            if len(crossing) == 2:
                return ShortCycleClass(
                    2, support, f"two blocks meeting at {g}, half-turn each"
                )
        raise ValueError("two-block cycle does not fit the half-turn pattern")
    if len(support) == 3:
        verts = sorted(set(v for e in defining for v in e))
        labels = []
        triangle = len(verts) == 3
        if triangle:
            for x, y in (
                (verts[0], verts[1]),
                (verts[0], verts[2]),
                (verts[1], verts[2]),
            ):
                if graph.has_edge(x, y):
                    labels.append(graph.label(x, y))
                else:
                    triangle = False
        if (
            triangle
            and sum(Fraction(1, m) for m in labels) == 1
            and len(cycle) == 6
        ):
            kinds = [link.vertices[v].kind for v in cycle]
            if kinds in (["real", "fake"] * 3, ["fake", "real"] * 3):
                return ShortCycleClass(
                    3, support, f"Euclidean triangle with labels {sorted(labels)}"
                )
        raise ValueError("three-block cycle does not fit the triangle pattern")
    if len(support) == 4:
        verts = sorted(set(v for e in defining for v in e))
        square = len(verts) == 4 and all(
            sum(1 for e in defining if v in e) == 2 for v in verts
        )
        diagonals_absent = square and not any(
            graph.has_edge(x, y)
            for i, x in enumerate(verts)
            for y in verts[i + 1 :]
            if tuple(sorted((x, y))) not in [tuple(sorted(e)) for e in defining]
        )
        if (
            square
            and diagonals_absent
            and all(abs(v - math.pi / 2) <= tolerance for v in per_block.values())
        ):
            return ShortCycleClass(
                4, support, "full square of blocks, quarter-turn each"
            )
        raise ValueError("four-block cycle does not fit the square pattern")
    raise ValueError(f"cycle spans {len(support)} blocks; the lemma allows at most 4")
