"""Planar tilings by relator cells, with sector constructors and local analysis.

A tiling here is a finite planar 2-complex whose cells are relator polygons:
each cell is a 2m-gon carrying a two-generator block tag, every edge is
oriented and labeled by a generator, and the boundary word spells the Artin
relator (two directed paths of length m between a source tip and a sink tip).
The module builds the singular rays, atomic sectors and half-flat truncations
used in the flat-geometry analysis of two-dimensional Artin groups, classifies
interior vertex stars, performs the right-shift reading along diamond rays,
develops single layers against a boundary ray, and computes completions and
shadow angles.

Vertices are strings.  Cells built inside one dihedral group are anchored by
Garside normal-form keys, which makes vertex identification automatic and the
anchored image checkable against a Cayley ball.  Coxeter-patch constructions
anchor vertices by chamber words instead.
"""

from __future__ import annotations

import json
import math
from collections import defaultdict, deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

from . import coxeter as cx
from . import dihedral as dh
from .dihedral import other
from .graphs import DefiningGraph, perp_set, stable_label_class


class InvalidTiling(Exception):
    """A tiling violates a structural rule; the message names the rule."""


class SectorRejection(ValueError):
    """A construction request contradicts a defining clause of its kind."""

    def __init__(self, kind: str, clause: str, message: str):
        super().__init__(f"{kind} clause {clause}: {message}")
        self.kind = kind
        self.clause = clause


class DevelopmentError(Exception):
    """No deterministic layer case applies to the given boundary data."""


# ---------------------------------------------------------------------------
# Data model.


@dataclass
class TileCell:
    id: int
    block: Tuple[str, str]
    label: int
    boundary: Tuple[str, ...]

    def __post_init__(self) -> None:
        self.block = tuple(sorted(self.block))  # type: ignore[assignment]
        self.boundary = tuple(self.boundary)  # type: ignore[assignment]


@dataclass(frozen=True)
class Ray:
    """An ordered boundary ray: a vertex path, with cells when 2-dimensional."""

    kind: str  # "diamond" | "plain" | "coxeter"
    vertices: Tuple[str, ...]
    cells: Tuple[int, ...] = ()
    label: Optional[str] = None


@dataclass(frozen=True)
class VertexReport:
    vertex: str
    vertex_type: str  # "O" | "I" | "II" | "III" | "boundary" | "invalid"
    good: bool = False
    shape: Optional[str] = None  # "triangle" | "square" for type III
    support: Tuple[str, ...] = ()
    blocks: int = 0
    tips: Tuple[int, ...] = ()
    problem: Optional[str] = None


class Tiling:
    """Cells plus a global oriented, labeled edge set.

    ``edges`` maps ``(tail, head)`` to a generator name.  Positions are
    optional drawing coordinates; anchors map vertices into an ambient
    group (normal-form keys or chamber words) when the construction has
    one.  Star structure is derived: the two boundary edges of a cell at
    a vertex form a corner, and corners glue along shared edges into the
    vertex link, which must be a single cycle (interior) or a single
    open chain (boundary).
    """

    def __init__(
        self,
        cells: Sequence[TileCell],
        edges: Dict[Tuple[str, str], str],
        positions: Optional[Dict[str, Tuple[float, float]]] = None,
        anchors: Optional[Dict[str, str]] = None,
        anchor_kind: Optional[str] = None,
        meta: Optional[dict] = None,
    ):
        self.cells: Tuple[TileCell, ...] = tuple(cells)
        self.edges: Dict[Tuple[str, str], str] = dict(edges)
        self.positions: Dict[str, Tuple[float, float]] = dict(positions or {})
        self.anchors: Dict[str, str] = dict(anchors or {})
        self.anchor_kind = anchor_kind
        self.meta = dict(meta or {})
        self._index()

    def _index(self) -> None:
        self._by_id = {c.id: c for c in self.cells}
        if len(self._by_id) != len(self.cells):
            raise InvalidTiling("duplicate cell ids")
        self._pair_label: Dict[frozenset, Tuple[str, str, str]] = {}
        for (t, h), lab in self.edges.items():
            key = frozenset((t, h))
            if len(key) != 2:
                raise InvalidTiling(f"self-loop at {t}")
            if key in self._pair_label:
                raise InvalidTiling(f"edge {t}-{h} oriented twice")
            self._pair_label[key] = (t, h, lab)
        self._vertices: Set[str] = set()
        for t, h in self.edges:
            self._vertices.add(t)
            self._vertices.add(h)
        self._cells_at: Dict[str, List[int]] = defaultdict(list)
        for c in self.cells:
            for v in c.boundary:
                self._vertices.add(v)
                self._cells_at[v].append(c.id)
        self._vertex_edges: Dict[str, List[frozenset]] = defaultdict(list)
        for key in self._pair_label:
            for v in key:
                self._vertex_edges[v].append(key)

    # -- accessors ----------------------------------------------------------

    @property
    def vertices(self) -> Set[str]:
        return set(self._vertices)

    def cell(self, cid: int) -> TileCell:
        return self._by_id[cid]

    def cells_at(self, v: str) -> List[int]:
        return list(self._cells_at.get(v, ()))

    def has_edge(self, u: str, v: str) -> bool:
        return frozenset((u, v)) in self._pair_label

    def edge_label(self, u: str, v: str) -> str:
        return self._pair_label[frozenset((u, v))][2]

    def oriented(self, u: str, v: str) -> Tuple[str, str, str]:
        """The stored (tail, head, label) of the edge between u and v."""
        return self._pair_label[frozenset((u, v))]

    # -- cell combinatorics ---------------------------------------------------

    def cell_walk(self, cid: int) -> List[Tuple[str, str, str, int]]:
        """Boundary traversal as (tail, head, label, sign) per step.

        The sign is +1 when the stored orientation agrees with the
        traversal direction of the boundary cycle.
        """
        b = self._by_id[cid].boundary
        out = []
        for i, u in enumerate(b):
            w = b[(i + 1) % len(b)]
            key = frozenset((u, w))
            if key not in self._pair_label:
                raise InvalidTiling(f"cell {cid}: boundary step {u}->{w} is not an edge")
            t, h, lab = self._pair_label[key]
            out.append((u, w, lab, 1 if t == u else -1))
        return out

    def cell_tips(self, cid: int) -> Tuple[str, str]:
        """(source, sink) of the cell's relator orientation."""
        walk = self.cell_walk(cid)
        b = self._by_id[cid].boundary
        source = sink = None
        for i in range(len(b)):
            prev = walk[i - 1][3]
            cur = walk[i][3]
            if prev == -1 and cur == 1:
                source = b[i]
            if prev == 1 and cur == -1:
                sink = b[i]
        if source is None or sink is None:
            raise InvalidTiling(f"cell {cid} has no relator tips")
        return source, sink

    def cell_halves(self, cid: int) -> Tuple[Tuple[str, ...], Tuple[str, ...]]:
        """The two directed source-to-sink vertex paths of the cell."""
        b = self._by_id[cid].boundary
        source, sink = self.cell_tips(cid)
        i = b.index(source)
        j = b.index(sink)
        n = len(b)
        fwd = [b[(i + t) % n] for t in range((j - i) % n + 1)]
        bwd = [b[(i - t) % n] for t in range((i - j) % n + 1)]
        return tuple(fwd), tuple(bwd)

    def cell_edge_pairs(self, cid: int) -> Set[frozenset]:
        b = self._by_id[cid].boundary
        return {frozenset((b[i], b[(i + 1) % len(b)])) for i in range(len(b))}

    def shared_edges(self, c1: int, c2: int) -> Set[frozenset]:
        return self.cell_edge_pairs(c1) & self.cell_edge_pairs(c2)

    def shared_vertices(self, c1: int, c2: int) -> Set[str]:
        return set(self._by_id[c1].boundary) & set(self._by_id[c2].boundary)

    # -- vertex links ---------------------------------------------------------

    def link_at(self, v: str) -> Tuple[str, List[int], Optional[str]]:
        """(kind, ordered cells, problem).

        Kind is "cycle" for interior vertices, "chain" for boundary
        vertices (including vertices with cell-free edges), "none" for
        vertices of rays, and "invalid" with a problem message when the
        corners do not glue into a disc or half-disc.
        """
        cids = self._cells_at.get(v, ())
        if not cids:
            return "none", [], None
        corners: Dict[int, Tuple[frozenset, frozenset]] = {}
        for cid in cids:
            b = self._by_id[cid].boundary
            idxs = [i for i, x in enumerate(b) if x == v]
            if len(idxs) != 1:
                return "invalid", [], f"cell {cid} visits {v} more than once"
            i = idxs[0]
            m = len(b)
            corners[cid] = (
                frozenset((b[(i - 1) % m], v)),
                frozenset((v, b[(i + 1) % m])),
            )
        edge_cells: Dict[frozenset, List[int]] = defaultdict(list)
        for cid, (e1, e2) in corners.items():
            edge_cells[e1].append(cid)
            edge_cells[e2].append(cid)
        for e, cs in edge_cells.items():
            if len(cs) > 2:
                pair = tuple(sorted(e))
                return "invalid", [], f"edge {pair} lies in {len(cs)} cells at {v}"
        bare = [e for e in self._vertex_edges.get(v, ()) if e not in edge_cells]

        open_cells = [
            cid
            for cid, (e1, e2) in corners.items()
            if len(edge_cells[e1]) == 1 or len(edge_cells[e2]) == 1
        ]
        if open_cells:
            start = open_cells[0]
            e1, e2 = corners[start]
            enter = e1 if len(edge_cells[e1]) == 1 else e2
        else:
            start = cids[0]
            enter = corners[start][0]
        order = []
        cur, via = start, enter
        while True:
            order.append(cur)
            e1, e2 = corners[cur]
            leave = e2 if via == e1 else e1
            others = [c for c in edge_cells[leave] if c != cur]
            if not others:
                closed = False
                break
            nxt = others[0]
            if nxt == start and leave == enter:
                closed = True
                break
            if nxt in order:
                return "invalid", [], f"link of {v} is not a simple chain"
            cur, via = nxt, leave
        if len(order) != len(cids):
            return "invalid", [], f"link of {v} is disconnected"
        if closed and not open_cells and not bare:
            return "cycle", order, None
        if closed:
            return "invalid", [], f"link of {v} closes but leaves edges unmatched"
        return "chain", order, None

    def is_interior(self, v: str) -> bool:
        kind, _, _ = self.link_at(v)
        return kind == "cycle"

    def rotation_system(self) -> Dict[str, Tuple[str, ...]]:
        """Neighbors of each vertex in rotational order.

        Positions fix the order where present; otherwise the corner
        chain order is used, which determines the rotation up to
        reflection (enough for star enumeration).
        """
        out: Dict[str, Tuple[str, ...]] = {}
        for v in sorted(self._vertices):
            nbrs = sorted({(set(e) - {v}).pop() for e in self._vertex_edges.get(v, ())})
            if v in self.positions and all(u in self.positions for u in nbrs):
                px, py = self.positions[v]
                nbrs.sort(key=lambda u: math.atan2(self.positions[u][1] - py, self.positions[u][0] - px))
            out[v] = tuple(nbrs)
        return out

    # -- metrics --------------------------------------------------------------

    def adjacency(self) -> Dict[str, Set[str]]:
        adj: Dict[str, Set[str]] = {v: set() for v in self._vertices}
        for key in self._pair_label:
            u, w = tuple(key)
            adj[u].add(w)
            adj[w].add(u)
        return adj

    def distances_from(self, source: str) -> Dict[str, int]:
        adj = self.adjacency()
        dist = {source: 0}
        queue = deque([source])
        while queue:
            x = queue.popleft()
            for y in adj[x]:
                if y not in dist:
                    dist[y] = dist[x] + 1
                    queue.append(y)
        return dist

    def distance(self, u: str, v: str) -> int:
        d = self.distances_from(u)
        if v not in d:
            raise InvalidTiling(f"{u} and {v} lie in different components")
        return d[v]

    # -- validation -----------------------------------------------------------

    def validate(self) -> List[str]:
        """All structural problems, empty when the tiling is sound.

        Checks per cell: boundary length 2m with distinct vertices, every
        step an edge with a label from the block, labels alternating,
        exactly one source and one sink at antipodal positions, and the
        opposite-edge rule (same label when m is even, the other label
        when m is odd, traversal sign always opposite).  Checks per
        vertex: the corner link is a disc or half-disc.  Checks per edge:
        at most two incident cells.
        """
        problems: List[str] = []
        edge_use: Dict[frozenset, int] = defaultdict(int)
        for c in self.cells:
            m = c.label
            b = c.boundary
            if len(b) != 2 * m:
                problems.append(f"cell {c.id}: boundary has {len(b)} vertices, wants {2 * m}")
                continue
            if len(set(b)) != len(b):
                problems.append(f"cell {c.id}: boundary revisits a vertex")
                continue
            try:
                walk = self.cell_walk(c.id)
            except InvalidTiling as exc:
                problems.append(str(exc))
                continue
            labels = [w[2] for w in walk]
            signs = [w[3] for w in walk]
            if set(labels) != set(c.block):
                problems.append(f"cell {c.id}: labels {sorted(set(labels))} do not match block {c.block}")
                continue
            if any(labels[i] == labels[(i + 1) % len(labels)] for i in range(len(labels))):
                problems.append(f"cell {c.id}: labels fail to alternate")
            for i in range(m):
                same = labels[i] == labels[i + m]
                if m % 2 == 0 and not same:
                    problems.append(f"cell {c.id}: opposite edges {i},{i + m} carry different labels")
                if m % 2 == 1 and same:
                    problems.append(f"cell {c.id}: opposite edges {i},{i + m} repeat a label")
                if signs[i] != -signs[i + m]:
                    problems.append(f"cell {c.id}: opposite edges {i},{i + m} break the orientation rule")
            changes = sum(1 for i in range(2 * m) if signs[i] != signs[i - 1])
            if changes != 2:
                problems.append(f"cell {c.id}: boundary word has {changes} direction changes, wants 2")
            else:
                src, snk = self.cell_tips(c.id)
                if (b.index(src) - b.index(snk)) % (2 * m) != m:
                    problems.append(f"cell {c.id}: tips are not antipodal")
            for e in self.cell_edge_pairs(c.id):
                edge_use[e] += 1
        for e, count in edge_use.items():
            if count > 2:
                problems.append(f"edge {tuple(sorted(e))} lies in {count} cells")
        for v in sorted(self._vertices):
            kind, _, problem = self.link_at(v)
            if kind == "invalid":
                problems.append(problem or f"bad link at {v}")
        return problems

    def assert_valid(self) -> None:
        problems = self.validate()
        if problems:
            raise InvalidTiling("; ".join(problems[:4]))


# ---------------------------------------------------------------------------
# Vertex classification.


def _edge_path(edges: Set[frozenset]) -> Optional[List[str]]:
    """Vertex sequence of a simple path, or None if the set is not one."""
    if not edges:
        return None
    deg: Dict[str, int] = defaultdict(int)
    adj: Dict[str, List[str]] = defaultdict(list)
    for e in edges:
        u, w = tuple(e)
        deg[u] += 1
        deg[w] += 1
        adj[u].append(w)
        adj[w].append(u)
    ends = [v for v, d in deg.items() if d == 1]
    if len(ends) != 2 or any(d > 2 for d in deg.values()):
        return None
    path = [ends[0]]
    prev = None
    while True:
        cur = path[-1]
        nxts = [x for x in adj[cur] if x != prev]
        if not nxts:
            break
        prev = cur
        path.append(nxts[0])
    if len(path) != len(edges) + 1:
        return None
    return path


def _is_arc_at(tiling: Tiling, c1: int, c2: int, length: int, v: str) -> bool:
    """Do the cells share exactly a length-edge simple path ending at v?"""
    shared = tiling.shared_edges(c1, c2)
    if len(shared) != length:
        return False
    path = _edge_path(shared)
    if path is None:
        return False
    if tiling.shared_vertices(c1, c2) != set(path):
        return False
    return v == path[0] or v == path[-1]


def _is_single_edge_at(tiling: Tiling, c1: int, c2: int, v: str) -> bool:
    shared = tiling.shared_edges(c1, c2)
    if len(shared) != 1:
        return False
    (e,) = shared
    if v not in e:
        return False
    return tiling.shared_vertices(c1, c2) == set(e)


def _vertex_only(tiling: Tiling, c1: int, c2: int, v: str) -> bool:
    return tiling.shared_vertices(c1, c2) == {v}


def _star_block_classes(tiling: Tiling, cids: Sequence[int]) -> List[Set[int]]:
    """Partition of star cells into block cosets.

    Two cells with the same block tag that share an edge lie in the same
    coset (a relator edge determines its block coset), and the relation
    closes transitively, which joins tip pairs through their common
    neighbors.
    """
    parent = {c: c for c in cids}

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i, c1 in enumerate(cids):
        for c2 in list(cids)[i + 1 :]:
            if tiling.cell(c1).block != tiling.cell(c2).block:
                continue
            if tiling.shared_edges(c1, c2):
                parent[find(c1)] = find(c2)
    groups: Dict[int, Set[int]] = defaultdict(set)
    for c in cids:
        groups[find(c)].add(c)
    return list(groups.values())


def _match_grid_pattern(
    tiling: Tiling, cycle: List[int], v: str
) -> Optional[Tuple[int, int, int, int]]:
    """Match the four-cell grid star against the cyclic order, if possible.

    Returns (P1, P3, P4, P2) with P1,P2 of one size sharing an
    (n1-1)-edge arc, P3,P4 of one size sharing an (n2-1)-edge arc, the
    cross pairs P1/P3 and P2/P4 sharing single edges through v, and the
    remaining two pairs meeting in v alone.
    """
    for r in range(4):
        for step in (1, -1):
            p1, p3, p4, p2 = (cycle[(r + step * t) % 4] for t in range(4))
            n1 = tiling.cell(p1).label
            n2 = tiling.cell(p3).label
            if tiling.cell(p2).label != n1 or tiling.cell(p4).label != n2:
                continue
            if not _is_arc_at(tiling, p1, p2, n1 - 1, v):
                continue
            if not _is_arc_at(tiling, p3, p4, n2 - 1, v):
                continue
            if not _is_single_edge_at(tiling, p1, p3, v):
                continue
            if not _is_single_edge_at(tiling, p2, p4, v):
                continue
            if not _vertex_only(tiling, p2, p3, v):
                continue
            if not _vertex_only(tiling, p1, p4, v):
                continue
            return p1, p3, p4, p2
    return None


def _match_tip_pattern(tiling: Tiling, cycle: List[int], v: str) -> Optional[Tuple[int, int]]:
    """Match the one-block turning star: two opposite tip cells.

    The two non-tip cells each meet the union of the tip cells in a full
    half of their boundary, split between the two tips.
    """
    tips = [c for c in cycle if v in tiling.cell_tips(c)]
    if len(tips) != 2:
        return None
    i, j = cycle.index(tips[0]), cycle.index(tips[1])
    if (j - i) % 4 != 2:
        return None
    non = [c for c in cycle if c not in tips]
    blocks = {tiling.cell(c).block for c in cycle}
    labels = {tiling.cell(c).label for c in cycle}
    if len(blocks) != 1 or len(labels) != 1:
        return None
    if not _vertex_only(tiling, tips[0], tips[1], v):
        return None
    if not _vertex_only(tiling, non[0], non[1], v):
        return None
    for c in non:
        combined: Set[frozenset] = set()
        for t in tips:
            shared = tiling.shared_edges(c, t)
            if not shared:
                return None
            combined |= shared
        halves = tiling.cell_halves(c)
        half_edge_sets = [
            {frozenset((h[i], h[i + 1])) for i in range(len(h) - 1)} for h in halves
        ]
        if combined not in half_edge_sets:
            return None
    return tips[0], tips[1]


def classify_vertex(tiling: Tiling, v: str) -> VertexReport:
    """Classify the star of an interior vertex.

    Two cells give type O.  Three cells must meet pairwise in single
    edges through the vertex, lie in three distinct blocks, and have
    Euclidean label reciprocals (type III with triangle support).  Four
    cells are matched against the grid pattern; one block coset gives
    type I, two give type II, four square blocks give type III with
    square support.  Four one-block cells with two opposite tips form
    the non-grid type I star.  Anything else is an invalid tiling, and
    the report carries the failing condition.
    """
    if v not in tiling.vertices:
        raise KeyError(f"no vertex {v}")
    kind, cycle, problem = tiling.link_at(v)
    if kind == "invalid":
        return VertexReport(v, "invalid", problem=problem)
    if kind in ("chain", "none"):
        return VertexReport(v, "boundary")
    tips = tuple(c for c in cycle if v in tiling.cell_tips(c))
    k = len(cycle)

    if k == 2:
        return VertexReport(v, "O", blocks=1, tips=tips)

    if k == 3:
        pairs = [(cycle[0], cycle[1]), (cycle[1], cycle[2]), (cycle[2], cycle[0])]
        for c1, c2 in pairs:
            if not _is_single_edge_at(tiling, c1, c2, v):
                return VertexReport(
                    v, "invalid",
                    problem=f"three cells at {v} but {c1} and {c2} do not share a single edge there",
                )
        blocks = [tiling.cell(c).block for c in cycle]
        if len(set(blocks)) != 3:
            return VertexReport(v, "invalid", problem=f"three cells at {v} with repeated blocks")
        support = sorted(set(x for b in blocks for x in b))
        if len(support) != 3:
            return VertexReport(v, "invalid", problem=f"blocks at {v} do not close a triangle")
        recip = sum(Fraction(1, tiling.cell(c).label) for c in cycle)
        if recip != 1:
            return VertexReport(
                v, "invalid",
                problem=f"triangle labels at {v} have angle sum {recip} instead of 1",
            )
        return VertexReport(v, "III", shape="triangle", support=tuple(support), blocks=3, tips=tips)

    if k == 4:
        grid = _match_grid_pattern(tiling, cycle, v)
        if grid is not None:
            classes = _star_block_classes(tiling, cycle)
            blocks = len(classes)
            if blocks == 1:
                return VertexReport(v, "I", good=True, blocks=1, tips=tips)
            if blocks == 2:
                return VertexReport(v, "II", good=True, blocks=2, tips=tips)
            if all(tiling.cell(c).label == 2 for c in cycle):
                letters: List[str] = []
                ok = True
                for i in range(4):
                    b1 = set(tiling.cell(cycle[i]).block)
                    b2 = set(tiling.cell(cycle[(i + 1) % 4]).block)
                    common = b1 & b2
                    if len(common) != 1:
                        ok = False
                        break
                    letters.append(common.pop())
                if ok and len(set(letters)) == 4:
                    return VertexReport(
                        v, "III", good=True, shape="square",
                        support=tuple(sorted(letters)), blocks=blocks, tips=tips,
                    )
            return VertexReport(
                v, "invalid",
                problem=f"grid star at {v} spans {blocks} blocks without a square support",
            )
        turning = _match_tip_pattern(tiling, cycle, v)
        if turning is not None:
            classes = _star_block_classes(tiling, cycle)
            if len(classes) != 1:
                return VertexReport(
                    v, "invalid", problem=f"turning star at {v} crosses block cosets"
                )
            return VertexReport(v, "I", good=False, blocks=1, tips=tips)
        return VertexReport(
            v, "invalid",
            problem=f"four cells at {v} match neither the grid nor the turning pattern",
        )

    return VertexReport(v, "invalid", problem=f"{k} cells around {v}")


def classify_all(tiling: Tiling) -> Dict[str, VertexReport]:
    return {v: classify_vertex(tiling, v) for v in sorted(tiling.vertices)}


def interior_reports(tiling: Tiling) -> Dict[str, VertexReport]:
    out = {}
    for v, rep in classify_all(tiling).items():
        if rep.vertex_type != "boundary":
            out[v] = rep
    return out


def support_propagation_problems(tiling: Tiling) -> List[str]:
    """Edges whose two interior triangle-type endpoints disagree on support."""
    reports = classify_all(tiling)
    problems = []
    for key in {frozenset((t, h)) for t, h in tiling.edges}:
        u, w = tuple(key)
        ru, rw = reports.get(u), reports.get(w)
        if ru is None or rw is None:
            continue
        if ru.vertex_type == rw.vertex_type == "III" and ru.shape == rw.shape == "triangle":
            if ru.support != rw.support:
                problems.append(f"adjacent triangle vertices {u},{w} have supports {ru.support} != {rw.support}")
    return problems


# ---------------------------------------------------------------------------
# Garside-anchored construction (cells inside one dihedral group).


class _GarsideSheet:
    """Accumulates cells anchored by normal-form keys in one dihedral group.

    Vertex ids are namespaced keys, so group-element equality performs
    all identification.  Drawing positions follow the standard cell
    layout (tips at the ends, one half above, one below); the first
    writer of a vertex fixes its position.
    """

    def __init__(self, n: int, letters: Tuple[str, str] = ("a", "b"), namespace: str = ""):
        self.n = n
        self.letters = letters
        self.namespace = namespace
        self.cells: List[TileCell] = []
        self.edges: Dict[Tuple[str, str], str] = {}
        self.positions: Dict[str, Tuple[float, float]] = {}
        self.anchors: Dict[str, str] = {}
        self._pairs: Dict[frozenset, Tuple[str, str]] = {}
        self._next = 0

    def _vid(self, key: str) -> str:
        vid = f"{self.namespace}{key}" if self.namespace else key
        if vid not in self.anchors:
            self.anchors[vid] = key
        return vid

    def _rename(self, letter: str) -> str:
        return self.letters[0] if letter == "a" else self.letters[1]

    def add_cell(
        self,
        tip: dh.NormalForm,
        origin: Tuple[float, float],
        down_start: str = "b",
        path_spots: Optional[Dict[str, Sequence[Tuple[float, float]]]] = None,
    ) -> int:
        """The relator cell with the given source tip, placed at origin.

        ``down_start`` picks which of the two boundary paths is drawn
        below the tip axis in the default diamond layout; ``path_spots``
        replaces that layout entirely with explicit positions per path,
        keyed by start letter and indexed from source to sink.  Drawing
        data never feeds back into the combinatorics: the first writer
        of a vertex fixes its position and later cells must only agree
        on edges, not on spots.
        """
        n = self.n
        paths = {}
        for start in ("a", "b"):
            word = dh.alternating_word(start, n)
            cur = tip
            keys = [cur.key]
            for ch in word:
                cur = dh.multiply_letter(cur, ch)
                keys.append(cur.key)
            paths[start] = keys
        if paths["a"][-1] != paths["b"][-1]:
            raise InvalidTiling("cell halves disagree on the sink")
        upper, lower = paths["a"], paths["b"]
        boundary = [self._vid(k) for k in upper] + [self._vid(k) for k in lower[-2:0:-1]]
        if path_spots is None:
            ox, oy = origin
            up = other(down_start)
            path_spots = {
                up: [(ox, oy)]
                + [(ox + t, oy + 0.5) for t in range(1, n)]
                + [(ox + n, oy)],
                down_start: [(ox, oy)]
                + [(ox + t, oy - 0.5) for t in range(1, n)]
                + [(ox + n, oy)],
            }
        for start, keys in paths.items():
            for t, key in enumerate(keys):
                self.positions.setdefault(self._vid(key), tuple(path_spots[start][t]))
        for start, keys in paths.items():
            word = dh.alternating_word(start, n)
            for i, ch in enumerate(word):
                t, h = self._vid(keys[i]), self._vid(keys[i + 1])
                pair = frozenset((t, h))
                old = self._pairs.get(pair)
                if old is not None:
                    if old != (t, h) or self.edges[old] != self._rename(ch):
                        raise InvalidTiling(f"edge conflict at {t}->{h}")
                else:
                    self._pairs[pair] = (t, h)
                    self.edges[(t, h)] = self._rename(ch)
        cid = self._next
        self._next += 1
        self.cells.append(
            TileCell(cid, (self.letters[0], self.letters[1]), n, tuple(boundary))
        )
        return cid

    def tiling(self, meta: Optional[dict] = None) -> Tiling:
        return Tiling(
            self.cells, self.edges, self.positions,
            anchors=self.anchors, anchor_kind="garside", meta=meta,
        )


@dataclass(frozen=True)
class SectorBlueprint:
    """A built object: its kind, defining parameters, tiling, and rays."""

    kind: str
    params: dict
    tiling: Tiling
    rays: Tuple[Ray, ...] = ()
    notes: Tuple[str, ...] = ()


def _nf_word(n: int, word: str) -> dh.NormalForm:
    return dh.normal_form(n, word)


def build_diamond_ray(n: int, cell_count: int) -> SectorBlueprint:
    """A chain of relator cells met tip to tip along powers of the half turn.

    The k-th cell has source the k-th power of the Garside half turn, so
    the sink of each cell is the source of the next and consecutive cells
    share exactly that one vertex.  As a bare subcomplex the interior
    tips are singular contacts (two cells, no shared edge); they become
    manifold points only once a flat side covers them, so no validity
    assertion is made here.
    """
    if n < 3:
        raise ValueError("a diamond ray needs a label of at least 3; label 2 cells are squares of a plain flat")
    if cell_count < 1:
        raise ValueError("cell_count must be positive")
    sheet = _GarsideSheet(n)
    cells = []
    for k in range(cell_count):
        cells.append(sheet.add_cell(dh.power(dh.delta(n), k), (float(k * n), 0.0)))
    tips = [sheet._vid(dh.power(dh.delta(n), k).key) for k in range(cell_count + 1)]
    tiling = sheet.tiling(meta={"kind": "DiamondRay", "n": n})
    ray = Ray("diamond", tuple(tips), tuple(cells))
    return SectorBlueprint("DiamondRay", {"n": n, "cell_count": cell_count}, tiling, (ray,))


def build_diamond_line(n: int, cell_count: int) -> SectorBlueprint:
    """Two-sided version of the diamond ray, centered at the identity."""
    if n < 3:
        raise ValueError("a diamond line needs a label of at least 3")
    if cell_count < 1:
        raise ValueError("cell_count must be positive")
    sheet = _GarsideSheet(n)
    cells = []
    for k in range(-cell_count, cell_count):
        cells.append(sheet.add_cell(dh.power(dh.delta(n), k), (float(k * n), 0.0)))
    tips = [
        sheet._vid(dh.power(dh.delta(n), k).key)
        for k in range(-cell_count, cell_count + 1)
    ]
    tiling = sheet.tiling(meta={"kind": "DiamondLine", "n": n})
    ray = Ray("diamond", tuple(tips), tuple(cells))
    return SectorBlueprint("DiamondLine", {"n": n, "cell_count": cell_count}, tiling, (ray,))


def build_plain_ray(graph: DefiningGraph, labels: Sequence[str]) -> SectorBlueprint:
    """A simple edge path whose steps are vertices of the defining graph.

    Consecutive labels must differ (a repeated generator does not move
    along a new edge), and the construction is purely 1-dimensional.
    """
    labels = list(labels)
    if not labels:
        raise ValueError("a plain ray needs at least one step")
    for lab in labels:
        if lab not in graph.vertices:
            raise ValueError(f"unknown generator {lab!r}")
    for i in range(len(labels) - 1):
        if labels[i] == labels[i + 1]:
            raise ValueError(
                f"steps {i} and {i + 1} repeat generator {labels[i]!r}; a plain path never repeats a step label"
            )
    chromatic = len(set(labels)) == 1 or all(
        labels[i] != labels[i + 1] for i in range(len(labels) - 1)
    )
    verts = [f"p{t}" for t in range(len(labels) + 1)]
    edges = {(verts[i], verts[i + 1]): labels[i] for i in range(len(labels))}
    positions = {v: (float(i), 0.0) for i, v in enumerate(verts)}
    single = len(set(labels)) == 1
    tiling = Tiling([], edges, positions, meta={"kind": "PlainRay", "single_labeled": single, "chromatic": chromatic})
    ray = Ray("plain", tuple(verts), (), label=labels[0] if single else None)
    return SectorBlueprint("PlainRay", {"labels": labels}, tiling, (ray,))


def build_plain_line(graph: DefiningGraph, label: str, length: int) -> SectorBlueprint:
    """Two-sided single-labeled plain path."""
    if label not in graph.vertices:
        raise ValueError(f"unknown generator {label!r}")
    verts = [f"p{t}" for t in range(-length, length + 1)]
    edges = {(verts[i], verts[i + 1]): label for i in range(len(verts) - 1)}
    positions = {v: (float(i - length), 0.0) for i, v in enumerate(verts)}
    tiling = Tiling([], edges, positions, meta={"kind": "PlainLine", "single_labeled": True})
    ray = Ray("plain", tuple(verts), (), label=label)
    return SectorBlueprint("PlainLine", {"label": label, "length": length}, tiling, (ray,))


def _lean_spots(
    n: int, j: int, i: int, top_letter: str, xsign: float
) -> Dict[str, List[Tuple[float, float]]]:
    """Positions for the cell in column j, level i of a wedge layout.

    Sources sit on the integer grid; each cell leans from its top edge
    at level i back to its sink one level up, so that the staircase arcs
    shared by neighbouring cells land on identical coordinates.
    """
    step = 1.0 / (n - 1)
    top = [(j + 0.0, i + 0.0)]
    top += [(j + 1 - (t - 1) * step, i + (t - 1) * step) for t in range(1, n + 1)]
    bottom = [(j + 0.0, i + 0.0)]
    bottom += [(j - t * step, i + t * step) for t in range(1, n)]
    bottom.append((j + 0.0, i + 1.0))
    if xsign < 0:
        top = [(-x, y) for x, y in top]
        bottom = [(-x, y) for x, y in bottom]
    return {top_letter: top, other(top_letter): bottom}


def build_diamond_plain_sector(
    n: int,
    direction: str = "up",
    depth: int = 0,
    graph: Optional[DefiningGraph] = None,
    letters: Tuple[str, str] = ("a", "b"),
) -> SectorBlueprint:
    """A wedge of one-block cells between a diamond ray and a plain ray.

    The cell in column j at level i has source ``x^j d^i`` where x is
    the wedge letter (the first generator for direction "up", the second
    for "down") and d the Garside half turn; the wedge is truncated
    triangularly at ``j + i <= depth + 1`` with columns ``j <= depth``.
    Column 0 is the tip chain of the diamond ray, the pure powers of x
    form the plain ray, and the two rays meet at the identity corner.
    Depth 0 degenerates to a bare two-cell diamond ray.
    """
    if n < 3:
        raise ValueError("a diamond-plain sector needs a label of at least 3")
    if direction not in ("up", "down"):
        raise ValueError("direction must be 'up' or 'down'")
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    if graph is not None:
        u, w = letters
        if graph.label(u, w) != n:
            raise ValueError(f"graph labels edge {u}-{w} with {graph.label(u, w)}, not {n}")
    sheet = _GarsideSheet(n, letters=letters)
    walk = "a" if direction == "up" else "b"
    xsign = 1.0 if direction == "up" else -1.0
    x = _nf_word(n, walk)
    column_cells: List[List[int]] = []
    for j in range(depth + 1):
        base = dh.power(x, j)
        col = []
        for i in range(depth + 2 - j):
            src = dh.multiply(base, dh.power(dh.delta(n), i))
            top_letter = walk if (n % 2 == 0 or i % 2 == 0) else other(walk)
            col.append(
                sheet.add_cell(src, (0.0, 0.0), path_spots=_lean_spots(n, j, i, top_letter, xsign))
            )
        column_cells.append(col)
    tiling = sheet.tiling(
        meta={"kind": "DiamondPlainSector", "n": n, "direction": direction}
    )
    if depth > 0:
        # Depth 0 is a bare two-cell diamond ray whose middle tip is a
        # singular contact, so the disc checks only apply from depth 1 on.
        tiling.assert_valid()
    tip_ids = [sheet._vid(dh.power(dh.delta(n), i).key) for i in range(depth + 3)]
    col0 = tuple(column_cells[0])
    if direction == "up":
        diamond = Ray("diamond", tuple(tip_ids), col0)
    else:
        diamond = Ray("diamond", tuple(reversed(tip_ids)), tuple(reversed(col0)))
    plain_ids = [sheet._vid(dh.power(x, j).key) for j in range(depth + 2)]
    plain_label = letters[0] if direction == "up" else letters[1]
    plain = Ray("plain", tuple(plain_ids), (), label=plain_label)
    params = {
        "n": n,
        "direction": direction,
        "depth": depth,
        "letters": list(letters),
        "graph": graph,
    }
    notes = ("degenerate: single diamond ray",) if depth == 0 else ()
    return SectorBlueprint("DiamondPlainSector", params, tiling, (diamond, plain), notes)


# ---------------------------------------------------------------------------
# One-block half-flats: rows of cells with a shift schedule.


def build_dihedral_half_flat(n: int, deltas: Sequence[int], length: int = 3) -> SectorBlueprint:
    """Rows of tip-to-tip cell chains glued with per-row phase shifts.

    Each row is a diamond chain; row i+1 starts ``deltas[i]`` edges into
    row i's facing zigzag, so at every interior tip of row i the covering
    cell of the next row reads exactly ``deltas[i]`` edges toward the
    following tip.  The facing zigzags alternate letters globally, which
    forces each row's start letter from the landing letter of the
    previous shift.  A schedule that is constantly 1 or constantly n-1
    folds into a diamond-plain sector and is rejected; entries outside
    1..n-1 do not land strictly between tips at all.
    """
    deltas = list(deltas)
    if n < 3:
        raise ValueError("one-block half-flats need a label of at least 3")
    if length < 1:
        raise ValueError("length must be positive")
    if not deltas:
        raise SectorRejection("DCH", "(2)", "the shift schedule is empty")
    for d in deltas:
        if not 1 <= d <= n - 1:
            raise SectorRejection("DCH", "(2)", f"shift {d} is out of range 1..{n - 1}")
    if all(d == 1 for d in deltas) or all(d == n - 1 for d in deltas):
        raise SectorRejection(
            "DCH", "(3)",
            "a constant unit shift schedule folds into a diamond-plain sector",
        )

    rows = len(deltas) + 1
    sheet = _GarsideSheet(n)
    # Row i has cols[i] cells; each shift eats one cell of width.
    cols = [length + rows - 1 - i for i in range(rows)]
    bases: List[dh.NormalForm] = [dh.identity(n)]
    starts = ["a"]
    offsets = [0]
    for i, d in enumerate(deltas):
        cur = bases[i]
        for ch in dh.alternating_word(starts[i], d):
            cur = dh.multiply_letter(cur, ch)
        bases.append(cur)
        landing = starts[i] if d % 2 == 0 else other(starts[i])
        starts.append(other(landing))
        offsets.append(offsets[i] + d)
    cell_ids: List[List[int]] = []
    for i in range(rows):
        row = []
        for k in range(cols[i]):
            src = dh.multiply(bases[i], dh.power(dh.delta(n), k))
            down = starts[i] if (k * n) % 2 == 0 else other(starts[i])
            row.append(
                sheet.add_cell(src, (float(offsets[i] + k * n), -float(i)), down_start=down)
            )
        cell_ids.append(row)
    tiling = sheet.tiling(meta={"kind": "DCH", "n": n})
    tiling.assert_valid()
    tips = [sheet._vid(dh.power(dh.delta(n), k).key) for k in range(cols[0] + 1)]
    ray = Ray("diamond", tuple(tips), tuple(cell_ids[0]))
    return SectorBlueprint(
        "DCH", {"n": n, "deltas": deltas, "length": length}, tiling, (ray,)
    )


def build_block_chain_half_flat(graph: DefiningGraph, blocks: Sequence[Tuple[str, str]], length: int = 4) -> SectorBlueprint:
    """Strips from distinct two-generator blocks chained along shared letters.

    Each layer is a diamond line strip in its own block; consecutive
    layers share a single-labeled line whose letter lies in both blocks.
    Inside a layer with label m the far line of the strip carries the
    same letter when m is even and the other letter of the block when m
    is odd, which drives the chain letter recurrence.
    """
    blocks = [tuple(sorted(b)) for b in blocks]
    if len(blocks) < 2:
        raise SectorRejection("PCH", "(1)", "a block chain needs at least two layers")
    labels = []
    for u, w in blocks:
        if not graph.has_edge(u, w):
            raise ValueError(f"graph has no edge {u}-{w}")
        labels.append(graph.label(u, w))
    if all(b == blocks[0] for b in blocks):
        raise SectorRejection("PCH", "(4)", "all layers lie in one block; the chain folds into that block's flat")
    if all(m == 2 for m in labels):
        raise SectorRejection("PCH", "(5)", "all labels are 2; the chain is a product flat, not a singular one")
    for i in range(len(blocks) - 1):
        if not set(blocks[i]) & set(blocks[i + 1]):
            raise ValueError(f"blocks {blocks[i]} and {blocks[i + 1]} share no generator")

    # Chain letters: the line between layer i and i+1 is single-labeled by
    # a letter of both blocks; inside layer i it must be the far letter.
    def far_letter(axis: str, block: Tuple[str, str], m: int) -> str:
        if m % 2 == 0:
            return axis
        return block[0] if block[1] == axis else block[1]

    shared0 = set(blocks[0]) & set(blocks[1])
    axes: List[str] = []
    for i, block in enumerate(blocks):
        m = labels[i]
        if i == 0:
            if len(shared0) == 1:
                t0 = shared0.pop()
                axis = t0 if m % 2 == 0 else (block[0] if block[1] == t0 else block[1])
            else:
                axis = min(block)
        else:
            axis = prev_far
            if axis not in block:
                raise ValueError(f"chain letter {axis!r} does not lie in block {block}")
        axes.append(axis)
        prev_far = far_letter(axis, block, m)
        if i + 1 < len(blocks) and prev_far not in blocks[i + 1]:
            raise ValueError(
                f"layer {i} hands letter {prev_far!r} to block {blocks[i + 1]}, which does not contain it"
            )

    counts = [length + len(blocks) - i for i in range(len(blocks))]
    cells: List[TileCell] = []
    edges: Dict[Tuple[str, str], str] = {}
    positions: Dict[str, Tuple[float, float]] = {}
    anchors: Dict[str, str] = {}
    alias: Dict[str, str] = {}
    next_cell = 0
    layer_near: List[List[str]] = []

    for i, block in enumerate(blocks):
        m = labels[i]
        ns = f"L{i}:"
        sheet = _GarsideSheet(m, letters=block, namespace=ns)
        axis_letter = axes[i]
        walk_letter = "a" if block[0] == axis_letter else "b"
        near_ids = []
        for k in range(counts[i]):
            tip = dh.normal_form(m, walk_letter * k)
            sheet.add_cell(tip, (0.0, 0.0), path_spots=_lean_spots(m, k, i, walk_letter, 1.0))
            near_ids.append(sheet._vid(tip.key))
        near_ids.append(sheet._vid(dh.normal_form(m, walk_letter * counts[i]).key))
        far_ids = []
        for k in range(counts[i]):
            g = dh.multiply(dh.normal_form(m, walk_letter * k), dh.delta(m))
            far_ids.append(sheet._vid(g.key))

        def resolve(v: str) -> str:
            while v in alias:
                v = alias[v]
            return v

        if i > 0:
            below_far = layer_far
            count = min(len(below_far), len(near_ids))
            for t in range(count):
                alias[near_ids[t]] = resolve(below_far[t])
        for cell in sheet.cells:
            bnd = tuple(resolve(v) for v in cell.boundary)
            cells.append(TileCell(next_cell, cell.block, cell.label, bnd))
            next_cell += 1
        for (t, h), lab in sheet.edges.items():
            rt, rh = resolve(t), resolve(h)
            pair = frozenset((rt, rh))
            stored = {frozenset(k): (k, v) for k, v in edges.items()}
            if pair in stored:
                (ot, oh), olab = stored[pair]
                if (ot, oh) != (rt, rh) or olab != lab:
                    raise InvalidTiling(f"layer {i}: interface edge disagreement at {rt}->{rh}")
            else:
                edges[(rt, rh)] = lab
        for v, p in sheet.positions.items():
            rv = resolve(v)
            positions.setdefault(rv, p)
        if i == 0:
            for v, a in sheet.anchors.items():
                anchors[v] = a
        layer_near.append([resolve(v) for v in near_ids])
        layer_far = [resolve(v) for v in far_ids]

    tiling = Tiling(cells, edges, positions, anchors=anchors, anchor_kind="garside",
                    meta={"kind": "PCH", "blocks": [list(b) for b in blocks]})
    tiling.assert_valid()
    ray = Ray("plain", tuple(layer_near[0]), (), label=axes[0])
    return SectorBlueprint(
        "PCH", {"blocks": [list(b) for b in blocks], "length": length}, tiling, (ray,)
    )


# === coxeter-side backends follow ===
