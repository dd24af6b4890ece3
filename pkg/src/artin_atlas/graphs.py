"""Defining graphs with integer edge labels and their structural tests.

A defining graph is a finite simple graph whose edges carry integer
labels ``>= 2``.  Vertices are generators; an edge ``{a, b}`` labeled
``m`` imposes the relation equating the two alternating words of length
``m`` in ``a`` and ``b``.

Two input formats are supported by :func:`parse_graph`:

* a line-based text format::

      # comment
      vertex a
      vertex b
      edge a b 3

* a JSON-style mapping ``{"vertices": [...], "edges": [["a","b",3], ...]}``.

All derived orderings (vertex lists, edge lists, automorphism lists,
chunk lists) are lexicographic, so repeated runs produce identical
output.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import networkx as nx

AUTOMORPHISM_VERTEX_CAP = 12


class GraphTooLarge(Exception):
    """Raised when an exhaustive search would exceed its vertex cap."""


def _normalize_edge(u: str, v: str) -> Tuple[str, str]:
    if u == v:
        raise ValueError(f"loop edge at {u!r} is not allowed")
    return (u, v) if u < v else (v, u)


class DefiningGraph:
    """Immutable labeled graph with deterministic accessors."""

    def __init__(self, vertices: Iterable[str], edges: Iterable[Tuple[str, str, int]]):
        self.vertices: Tuple[str, ...] = tuple(sorted(set(vertices)))
        seen: Dict[Tuple[str, str], int] = {}
        for u, v, label in edges:
            key = _normalize_edge(str(u), str(v))
            label = int(label)
            if label < 2:
                raise ValueError(f"edge {key} has label {label} < 2")
            if key in seen and seen[key] != label:
                raise ValueError(f"edge {key} listed twice with different labels")
            seen[key] = label
        unknown = {x for pair in seen for x in pair} - set(self.vertices)
        if unknown:
            raise ValueError(f"edges mention unknown vertices {sorted(unknown)}")
        self.edge_labels: Dict[Tuple[str, str], int] = dict(sorted(seen.items()))
        self._adj: Dict[str, Dict[str, int]] = {v: {} for v in self.vertices}
        for (u, v), m in self.edge_labels.items():
            self._adj[u][v] = m
            self._adj[v][u] = m

    # -- basic accessors ----------------------------------------------------

    @property
    def edges(self) -> List[Tuple[str, str, int]]:
        return [(u, v, m) for (u, v), m in self.edge_labels.items()]

    def label(self, u: str, v: str) -> int:
        key = _normalize_edge(u, v)
        if key not in self.edge_labels:
            raise KeyError(f"no edge {key}")
        return self.edge_labels[key]

    def has_edge(self, u: str, v: str) -> bool:
        return _normalize_edge(u, v) in self.edge_labels

    def neighbors(self, v: str) -> List[str]:
        return sorted(self._adj[v])

    def degree(self, v: str) -> int:
        return len(self._adj[v])

    def is_leaf(self, v: str) -> bool:
        return self.degree(v) == 1

    def subgraph(self, keep: Iterable[str]) -> "DefiningGraph":
        keep_set = set(keep)
        return DefiningGraph(
            keep_set,
            [(u, v, m) for (u, v), m in self.edge_labels.items() if u in keep_set and v in keep_set],
        )

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(self.vertices)
        for (u, v), m in self.edge_labels.items():
            g.add_edge(u, v, label=m)
        return g

    def is_connected(self) -> bool:
        if len(self.vertices) <= 1:
            return True
        return nx.is_connected(self.to_networkx())

    def triangles(self) -> List[Tuple[str, str, str]]:
        out = []
        for u, v, w in itertools.combinations(self.vertices, 3):
            if self.has_edge(u, v) and self.has_edge(v, w) and self.has_edge(u, w):
                out.append((u, v, w))
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, DefiningGraph):
            return NotImplemented
        return self.vertices == other.vertices and self.edge_labels == other.edge_labels

    def __hash__(self) -> int:
        return hash((self.vertices, tuple(self.edge_labels.items())))

    def __repr__(self) -> str:
        return f"DefiningGraph({len(self.vertices)} vertices, {len(self.edge_labels)} edges)"

    # -- serialization ------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "vertices": list(self.vertices),
            "edges": [[u, v, m] for (u, v), m in self.edge_labels.items()],
        }

    def to_dot(self) -> str:
        lines = ["graph defining_graph {"]
        for v in self.vertices:
            lines.append(f'  "{v}";')
        for (u, v), m in self.edge_labels.items():
            lines.append(f'  "{u}" -- "{v}" [label={m}];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def parse_graph(source) -> DefiningGraph:
    """Build a graph from text, a JSON string, or a mapping.

    >>> g = parse_graph("vertex a\\nvertex b\\nedge a b 3\\n")
    >>> g.label("b", "a")
    3
    """
    if isinstance(source, dict):
        return DefiningGraph(source.get("vertices", []), source.get("edges", []))
    text = str(source)
    stripped = text.lstrip()
    if stripped.startswith("{"):
        return parse_graph(json.loads(text))
    vertices: List[str] = []
    edges: List[Tuple[str, str, int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "vertex" and len(parts) == 2:
            vertices.append(parts[1])
        elif parts[0] == "edge" and len(parts) == 4:
            try:
                label = int(parts[3])
            except ValueError as exc:
                raise ValueError(f"line {lineno}: bad label {parts[3]!r}") from exc
            edges.append((parts[1], parts[2], label))
        else:
            raise ValueError(f"line {lineno}: cannot parse {raw!r}")
    return DefiningGraph(vertices, edges)


# ---------------------------------------------------------------------------
# Dimension and class checks.


@dataclass(frozen=True)
class TwoDimensionalityReport:
    ok: bool
    violations: Tuple[Tuple[Tuple[str, str, str], Fraction], ...]

    def __bool__(self) -> bool:
        return self.ok


def is_two_dimensional(graph: DefiningGraph) -> TwoDimensionalityReport:
    """Check that every labeled triangle is non-spherical.

    A triangle with labels ``p, q, r`` passes when
    ``1/p + 1/q + 1/r <= 1``, evaluated in exact rational arithmetic.
    """
    violations = []
    for u, v, w in graph.triangles():
        total = (
            Fraction(1, graph.label(u, v))
            + Fraction(1, graph.label(v, w))
            + Fraction(1, graph.label(u, w))
        )
        if total > 1:
            violations.append(((u, v, w), total))
    return TwoDimensionalityReport(not violations, tuple(violations))


@dataclass(frozen=True)
class ClttfReport:
    ok: bool
    reasons: Tuple[str, ...]

    def __bool__(self) -> bool:
        return self.ok


def is_clttf(graph: DefiningGraph) -> ClttfReport:
    """Connected, at least three vertices, all labels >= 3, triangle free."""
    reasons = []
    if not graph.is_connected():
        reasons.append("not connected")
    if len(graph.vertices) < 3:
        reasons.append("fewer than 3 vertices")
    small = sorted(e for e, m in graph.edge_labels.items() if m < 3)
    if small:
        reasons.append(f"labels below 3 on edges {small}")
    tri = graph.triangles()
    if tri:
        reasons.append(f"triangles present: {tri}")
    return ClttfReport(not reasons, tuple(reasons))


# ---------------------------------------------------------------------------
# Separators and chunks.


def separating_vertices(graph: DefiningGraph) -> List[str]:
    if len(graph.vertices) <= 2:
        return []
    g = graph.to_networkx()
    if not nx.is_connected(g):
        raise ValueError("separator analysis expects a connected graph")
    return sorted(nx.articulation_points(g))


def separating_edges(graph: DefiningGraph, rule: str = "closed") -> List[Tuple[str, str]]:
    """Edges whose removal disconnects the graph.

    ``rule="closed"`` (the default) removes the edge together with both
    endpoints, which matches splitting the graph over the closed edge.
    ``rule="open"`` removes only the edge itself, i.e. lists bridges.
    """
    g = graph.to_networkx()
    if not nx.is_connected(g):
        raise ValueError("separator analysis expects a connected graph")
    out = []
    if rule == "closed":
        for (u, v) in graph.edge_labels:
            rest = [x for x in graph.vertices if x not in (u, v)]
            if not rest:
                continue
            h = g.subgraph(rest)
            if h.number_of_nodes() and not nx.is_connected(h):
                out.append((u, v))
    elif rule == "open":
        out = sorted(tuple(sorted(e)) for e in nx.bridges(g))
    else:
        raise ValueError(f"unknown rule {rule!r}")
    return sorted(out)


def separators(graph: DefiningGraph, rule: str = "closed") -> dict:
    return {
        "vertices": separating_vertices(graph),
        "edges": separating_edges(graph, rule=rule),
    }


def _separator_sides(graph: DefiningGraph, removed: Sequence[str]) -> Dict[str, int]:
    """Map each surviving vertex to the index of its component."""
    g = graph.to_networkx()
    g.remove_nodes_from(removed)
    sides: Dict[str, int] = {}
    for idx, comp in enumerate(sorted(nx.connected_components(g), key=sorted)):
        for v in comp:
            sides[v] = idx
    return sides


def chunks(graph: DefiningGraph) -> List[DefiningGraph]:
    """Maximal full connected subgraphs not split by any separator.

    A full connected subgraph is indecomposable when, for every
    separating vertex or closed separating edge, the part of the
    subgraph away from the separator stays inside one component of the
    complement.  Chunks are the maximal ones; each is returned as a
    full subgraph, sorted by vertex set.
    """
    if not graph.is_connected():
        raise ValueError("chunk decomposition expects a connected graph")
    if not graph.edge_labels:
        return [graph]

    cut_data: List[Tuple[FrozenSet[str], Dict[str, int]]] = []
    for v in separating_vertices(graph):
        cut_data.append((frozenset([v]), _separator_sides(graph, [v])))
    for (u, v) in separating_edges(graph, rule="closed"):
        cut_data.append((frozenset([u, v]), _separator_sides(graph, [u, v])))

    def edge_side(edge: Tuple[str, str], removed: FrozenSet[str], sides: Dict[str, int]):
        outside = [x for x in edge if x not in removed]
        if not outside:
            return None  # the separating edge itself, compatible with all sides
        return sides[outside[0]]

    clusters: Dict[Tuple, List[Tuple[str, str]]] = {}
    wildcards: List[Tuple[str, str]] = []
    for edge in graph.edge_labels:
        vector = []
        wildcard = False
        for removed, sides in cut_data:
            side = edge_side(edge, removed, sides)
            if side is None:
                wildcard = True
                vector.append(None)
            else:
                vector.append(side)
        if wildcard:
            wildcards.append(edge)
        else:
            clusters.setdefault(tuple(vector), []).append(edge)

    chunk_edge_sets: List[List[Tuple[str, str]]] = []
    if clusters:
        for vector, edge_group in sorted(clusters.items()):
            group = list(edge_group)
            for edge in wildcards:
                compatible = True
                for (removed, sides), side in zip(cut_data, vector):
                    own = edge_side(edge, removed, sides)
                    if own is not None and own != side:
                        compatible = False
                        break
                if compatible:
                    group.append(edge)
            chunk_edge_sets.append(group)
    else:
        # Every edge is itself a separator: each closed edge is a chunk.
        chunk_edge_sets = [[edge] for edge in wildcards]

    out = []
    seen = set()
    for group in chunk_edge_sets:
        vertex_set = frozenset(x for e in group for x in e)
        if vertex_set in seen:
            continue
        seen.add(vertex_set)
        out.append(graph.subgraph(vertex_set))
    out.sort(key=lambda g: g.vertices)
    return out


def is_solid_chunk(chunk_graph: DefiningGraph) -> bool:
    """A chunk is solid when it contains a simple circuit."""
    g = chunk_graph.to_networkx()
    return g.number_of_edges() >= g.number_of_nodes()


# ---------------------------------------------------------------------------
# Perpendicularity, odd components, stable classes.


def perp(graph: DefiningGraph, v: str) -> Tuple[str, ...]:
    """Vertices joined to ``v`` by an edge labeled 2."""
    return tuple(u for u in graph.neighbors(v) if graph.label(u, v) == 2)


def perp_set(graph: DefiningGraph, vs: Iterable[str]) -> Tuple[str, ...]:
    vs = list(vs)
    if not vs:
        return ()
    common = set(perp(graph, vs[0]))
    for v in vs[1:]:
        common &= set(perp(graph, v))
    return tuple(sorted(common))


def odd_components(graph: DefiningGraph, v: str) -> Tuple[str, ...]:
    """Vertices reachable from ``v`` along odd-labeled edges."""
    seen = {v}
    stack = [v]
    while stack:
        x = stack.pop()
        for u in graph.neighbors(x):
            if graph.label(x, u) % 2 == 1 and u not in seen:
                seen.add(u)
                stack.append(u)
    return tuple(sorted(seen))


def euclidean_triangle(graph: DefiningGraph, tri: Sequence[str]) -> bool:
    u, v, w = tri
    if not (graph.has_edge(u, v) and graph.has_edge(v, w) and graph.has_edge(u, w)):
        return False
    total = (
        Fraction(1, graph.label(u, v))
        + Fraction(1, graph.label(v, w))
        + Fraction(1, graph.label(u, w))
    )
    return total == 1


def stable_label_class(graph: DefiningGraph, descriptor: Tuple) -> Optional[int]:
    """Classify a line descriptor into one of the five stable classes.

    Descriptors:

    * ``("diamond", (u, v))``: a line of cells through a block of the
      edge ``{u, v}``; stable whenever the edge exists (class 1).
    * ``("coxeter", (u, v, w))``: requires a triangle whose label
      reciprocals sum to 1 (class 2).
    * ``("plain", a)``: a single-labeled line with label ``a``;
      class 3 when every edge at ``a`` is labeled 2, ``|perp(a)| >= 2``
      and ``perp(perp(a)) == {a}``; class 4 when ``a`` is not a leaf
      and some edge at ``a`` has label >= 3; class 5 when ``a`` is a
      leaf attached by an odd label to a non-leaf.

    Returns ``None`` when the descriptor is not stable.
    """
    kind = descriptor[0]
    if kind == "diamond":
        u, v = descriptor[1]
        return 1 if graph.has_edge(u, v) else None
    if kind == "coxeter":
        return 2 if euclidean_triangle(graph, descriptor[1]) else None
    if kind == "plain":
        a = descriptor[1]
        if a not in graph.vertices:
            return None
        labels = [graph.label(a, u) for u in graph.neighbors(a)]
        if labels and all(m == 2 for m in labels):
            p = perp(graph, a)
            if len(p) >= 2 and perp_set(graph, p) == (a,):
                return 3
            return None
        if not graph.is_leaf(a) and any(m >= 3 for m in labels):
            return 4
        if graph.is_leaf(a):
            (b,) = graph.neighbors(a)
            if graph.label(a, b) % 2 == 1 and not graph.is_leaf(b):
                return 5
        return None
    raise ValueError(f"unknown descriptor kind {kind!r}")


# ---------------------------------------------------------------------------
# Automorphisms and strong rigidity.


def label_automorphisms(
    graph: DefiningGraph, max_vertices: int = AUTOMORPHISM_VERTEX_CAP
) -> List[Dict[str, str]]:
    """All label-preserving graph automorphisms, identity first.

    Exhaustive search, guarded by a vertex cap; raises
    :class:`GraphTooLarge` beyond it.
    """
    if len(graph.vertices) > max_vertices:
        raise GraphTooLarge(
            f"{len(graph.vertices)} vertices exceeds the cap of {max_vertices}"
        )
    g = graph.to_networkx()
    matcher = nx.algorithms.isomorphism.GraphMatcher(
        g, g, edge_match=lambda e1, e2: e1["label"] == e2["label"]
    )
    autos = [dict(iso) for iso in matcher.isomorphisms_iter()]
    autos.sort(key=lambda m: tuple(m[v] for v in graph.vertices))
    return autos


@dataclass(frozen=True)
class RigidityReport:
    rigid: bool
    connected_and_large: bool
    no_separators: bool
    no_star_fixing_automorphism: bool
    witness: Optional[str] = None

    def __bool__(self) -> bool:
        return self.rigid


def is_strongly_rigid(graph: DefiningGraph) -> RigidityReport:
    """Three-condition rigidity test.

    The conditions: the graph is connected with at least three
    vertices; it has no separating vertices and no separating closed
    edges; and no nontrivial label-preserving automorphism fixes the
    closed star of some vertex pointwise.
    """
    cond1 = graph.is_connected() and len(graph.vertices) >= 3
    witness = None
    if not cond1:
        witness = "disconnected or fewer than 3 vertices"
        return RigidityReport(False, cond1, False, False, witness)

    seps = separators(graph)
    cond2 = not seps["vertices"] and not seps["edges"]
    if not cond2:
        witness = f"separators: {seps}"

    cond3 = True
    for auto in label_automorphisms(graph):
        if all(auto[v] == v for v in graph.vertices):
            continue
        for v in graph.vertices:
            star = [v] + graph.neighbors(v)
            if all(auto[x] == x for x in star):
                cond3 = False
                moved = sorted(x for x in graph.vertices if auto[x] != x)
                if witness is None:
                    witness = f"automorphism moving {moved} fixes the closed star of {v}"
                break
        if not cond3:
            break

    return RigidityReport(cond1 and cond2 and cond3, cond1, cond2, cond3, witness)
