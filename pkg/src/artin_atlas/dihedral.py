"""Garside normal forms and Cayley balls for dihedral Artin groups.

The group ``DA_n`` has two generators ``a`` and ``b`` subject to the
relation equating the two alternating words of length ``n``.  Its
Garside element is the alternating word ``delta`` of length ``n``; the
proper left divisors of ``delta`` are exactly the alternating words of
length ``1..n-1``.  Every element then has a unique normal form

    ``delta^p * f_1 * ... * f_k``

where each ``f_i`` is a proper divisor and each adjacent pair is
left-weighted.  For the dihedral case, left-weightedness reduces to a
junction condition: the first letter of ``f_{i+1}`` must equal the last
letter of ``f_i``.

Elements are represented by :class:`NormalForm`.  Multiplication is by
single letters with local re-normalisation, which keeps the Cayley ball
BFS in :func:`build_ball` cheap.

Words are written either compactly (``"abA"`` with uppercase meaning
the inverse letter) or as whitespace separated tokens (``"a b a^-1"``).
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

Letter = str

_WORD_TOKEN = re.compile(r"^([abAB])(\^(-?\d+))?$")


def other(letter: Letter) -> Letter:
    return "b" if letter == "a" else "a"


def alternating_word(start: Letter, length: int) -> str:
    """The word ``start, other, start, ...`` of the given length."""
    if length < 0:
        raise ValueError("length must be >= 0")
    out = []
    cur = start
    for _ in range(length):
        out.append(cur)
        cur = other(cur)
    return "".join(out)


def _last_letter(factor: Tuple[Letter, int]) -> Letter:
    start, length = factor
    return start if length % 2 == 1 else other(start)


def parse_word(text: str) -> Tuple[Tuple[Letter, int], ...]:
    """Parse a word into ``(letter, sign)`` pairs.

    >>> parse_word("abA")
    (('a', 1), ('b', 1), ('a', -1))
    >>> parse_word("a b^-2")
    (('a', 1), ('b', -1), ('b', -1))
    """
    out: List[Tuple[Letter, int]] = []
    tokens = text.split() if any(c.isspace() for c in text.strip()) else None
    if tokens is None and _WORD_TOKEN.match(text.strip()) and "^" in text:
        tokens = [text.strip()]
    if tokens is not None:
        for tok in tokens:
            m = _WORD_TOKEN.match(tok)
            if not m:
                raise ValueError(f"cannot parse word token {tok!r}")
            letter = m.group(1)
            power = int(m.group(3)) if m.group(3) else 1
            sign = 1 if letter.islower() else -1
            letter = letter.lower()
            if power < 0:
                sign, power = -sign, -power
            out.extend((letter, sign) for _ in range(power))
    else:
        for ch in text.strip():
            if ch in "ab":
                out.append((ch, 1))
            elif ch in "AB":
                out.append((ch.lower(), -1))
            elif ch.isspace():
                continue
            else:
                raise ValueError(f"cannot parse word character {ch!r}")
    return tuple(out)


@dataclass(frozen=True, slots=True)
class NormalForm:
    """Garside normal form ``delta^p * factors`` in ``DA_n``."""

    n: int
    delta_power: int
    factors: Tuple[Tuple[Letter, int], ...]

    @property
    def key(self) -> str:
        body = ".".join(f"{s}{l}" for s, l in self.factors)
        return f"{self.delta_power}|{body}"

    @property
    def is_identity(self) -> bool:
        return self.delta_power == 0 and not self.factors

    @property
    def positive_length(self) -> int:
        """Length of the defining spelling; an upper bound for word length."""
        return abs(self.delta_power) * self.n + sum(l for _, l in self.factors)

    @property
    def exponent_sum(self) -> int:
        return self.delta_power * self.n + sum(l for _, l in self.factors)

    def spelled_factors(self) -> List[str]:
        return [alternating_word(s, l) for s, l in self.factors]

    def __repr__(self) -> str:
        if self.is_identity:
            return "NF<e>"
        parts = []
        if self.delta_power:
            parts.append(f"D^{self.delta_power}")
        parts.extend(self.spelled_factors())
        return "NF<" + ".".join(parts) + ">"


def _tau_factors(
    factors: List[Tuple[Letter, int]], n: int, power: int = 1
) -> List[Tuple[Letter, int]]:
    """Conjugation by ``delta^power`` on a factor list."""
    if n % 2 == 0 or power % 2 == 0:
        return factors
    return [(other(s), l) for s, l in factors]


def _append_positive(
    n: int, p: int, factors: List[Tuple[Letter, int]], letter: Letter
) -> int:
    """Append one positive letter and restore the normal form. Returns p."""
    factors.append((letter, 1))
    i = len(factors) - 2
    while 0 <= i < len(factors) - 1:
        x = factors[i]
        y = factors[i + 1]
        if y[0] == _last_letter(x):
            break  # junction letters agree, pair is left-weighted
        k = min(y[1], n - x[1])
        grown = (x[0], x[1] + k)
        rest_len = y[1] - k
        rest = (y[0] if k % 2 == 0 else other(y[0]), rest_len)
        if grown[1] == n:
            # The factor filled up to delta; carry it to the front.
            p += 1
            prefix = _tau_factors(factors[:i], n)
            middle = [rest] if rest_len else []
            factors[:] = prefix + middle + factors[i + 2 :]
            i -= 1
        else:
            # y was fully absorbed; the left junction is unchanged.
            factors[i : i + 2] = [grown]
            break
    return p


def _append_negative(
    n: int, p: int, factors: List[Tuple[Letter, int]], letter: Letter
) -> int:
    if factors and _last_letter(factors[-1]) == letter:
        start, length = factors[-1]
        if length == 1:
            factors.pop()
        else:
            factors[-1] = (start, length - 1)
        return p
    # letter^-1 = delta^-1 * d where d * letter spells delta.
    p -= 1
    factors[:] = _tau_factors(factors, n)
    start = letter if n % 2 == 1 else other(letter)
    for ch in alternating_word(start, n - 1):
        p = _append_positive(n, p, factors, ch)
    return p


def identity(n: int) -> NormalForm:
    if n < 2:
        raise ValueError("dihedral index must be >= 2")
    return NormalForm(n, 0, ())


def multiply_letter(nf: NormalForm, letter: Letter, sign: int = 1) -> NormalForm:
    factors = list(nf.factors)
    if sign > 0:
        p = _append_positive(nf.n, nf.delta_power, factors, letter)
    else:
        p = _append_negative(nf.n, nf.delta_power, factors, letter)
    return NormalForm(nf.n, p, tuple(factors))


def normal_form(n: int, word) -> NormalForm:
    """Normal form of a word given as text or ``(letter, sign)`` pairs.

    >>> normal_form(3, "aba").key
    '1|'
    >>> normal_form(3, "abaA").key
    '0|a2'
    """
    nf = identity(n)
    pairs = parse_word(word) if isinstance(word, str) else tuple(word)
    for letter, sign in pairs:
        nf = multiply_letter(nf, letter, sign)
    return nf


def multiply(x: NormalForm, y: NormalForm) -> NormalForm:
    if x.n != y.n:
        raise ValueError("mixed dihedral indices")
    factors = _tau_factors(list(x.factors), x.n, y.delta_power)
    p = x.delta_power + y.delta_power
    for s, l in y.factors:
        for j in range(l):
            p = _append_positive(x.n, p, factors, s if j % 2 == 0 else other(s))
    return NormalForm(x.n, p, tuple(factors))


def inverse(x: NormalForm) -> NormalForm:
    nf = identity(x.n)
    for s, l in reversed(x.factors):
        word = alternating_word(s, l)
        for ch in reversed(word):
            nf = multiply_letter(nf, ch, -1)
    # Multiply by delta^{-p} on the right: shift the power and twist.
    factors = tuple(_tau_factors(list(nf.factors), x.n, x.delta_power))
    return NormalForm(x.n, nf.delta_power - x.delta_power, factors)


def equal(x: NormalForm, y: NormalForm) -> bool:
    return x.n == y.n and x.delta_power == y.delta_power and x.factors == y.factors


def delta(n: int) -> NormalForm:
    return NormalForm(n, 1, ())


def parse_key(n: int, key: str) -> NormalForm:
    """Rebuild a normal form from its key string."""
    head, _, body = key.partition("|")
    factors = []
    for tok in body.split("."):
        if tok:
            factors.append((tok[0], int(tok[1:])))
    return NormalForm(n, int(head), tuple(factors))


def power(x: NormalForm, k: int) -> NormalForm:
    out = identity(x.n)
    base = x if k >= 0 else inverse(x)
    for _ in range(abs(k)):
        out = multiply(out, base)
    return out


# ---------------------------------------------------------------------------
# Cayley balls and precells.

_GEN_ORDER: Tuple[Tuple[Letter, int], ...] = (("a", 1), ("b", 1), ("a", -1), ("b", -1))


@dataclass(frozen=True)
class Precell:
    """A relator cell, identified by the normal-form key of its left tip.

    ``upper`` walks the alternating word starting with ``a`` from the
    left tip to the right tip, ``lower`` the one starting with ``b``.
    """

    n: int
    tip: str
    upper: Tuple[str, ...]
    lower: Tuple[str, ...]

    @property
    def left_tip(self) -> str:
        return self.upper[0]

    @property
    def right_tip(self) -> str:
        return self.upper[-1]

    @property
    def vertices(self) -> Tuple[str, ...]:
        return self.upper + self.lower[1:-1]

    def edge_pairs(self) -> Set[frozenset]:
        out = set()
        for path in (self.upper, self.lower):
            for i in range(len(path) - 1):
                out.add(frozenset((path[i], path[i + 1])))
        return out

    def half_edge_pairs(self, half: str) -> Set[frozenset]:
        path = self.upper if half == "upper" else self.lower
        return {frozenset((path[i], path[i + 1])) for i in range(len(path) - 1)}

    def oriented_edges(self) -> List[Tuple[str, str, Letter]]:
        out = []
        for path, start in ((self.upper, "a"), (self.lower, "b")):
            for i in range(len(path) - 1):
                letter = start if i % 2 == 0 else other(start)
                out.append((path[i], path[i + 1], letter))
        return out

    def tip_kind(self, vertex: str) -> Optional[str]:
        if vertex == self.left_tip:
            return "left"
        if vertex == self.right_tip:
            return "right"
        return None

    def boundary_positions(self) -> List[Tuple[str, int, str]]:
        """All 2n boundary vertices as (half, index, key) triples."""
        out = [("upper", i, k) for i, k in enumerate(self.upper)]
        out += [("lower", i, k) for i, k in enumerate(self.lower) if 0 < i < self.n]
        return out


class BallTooLarge(Exception):
    pass


@dataclass
class Ball:
    """A radius-limited Cayley ball of ``DA_n`` with its relator cells."""

    n: int
    radius: int
    elements: Dict[str, NormalForm]
    distance: Dict[str, int]
    edges: List[Tuple[str, str, Letter]]
    precells: List[Precell]
    cells_by_tip: Dict[str, Precell] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.cells_by_tip:
            self.cells_by_tip = {c.tip: c for c in self.precells}

    def interior(self, key: str, margin: int) -> bool:
        return self.distance[key] + margin <= self.radius

    def has_vertex(self, key: str) -> bool:
        return key in self.elements

    def nf(self, key: str) -> NormalForm:
        return self.elements[key]

    def cell_at(self, tip_key: str) -> Optional["Precell"]:
        return self.cells_by_tip.get(tip_key)

    def cells_through(self, vertex: str) -> List[Tuple[str, int, "Precell"]]:
        """Cells containing the vertex, tagged with its boundary position."""
        return list(precells_at(self, vertex).cells)

    def adjacency(self) -> Dict[str, Set[str]]:
        adj: Dict[str, Set[str]] = {k: set() for k in self.elements}
        for u, v, _ in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        return adj

    def stats(self) -> dict:
        return {
            "n": self.n,
            "radius": self.radius,
            "vertices": len(self.elements),
            "edges": len(self.edges),
            "precells": len(self.precells),
        }


def build_ball(
    n: int,
    radius: int,
    max_vertices: Optional[int] = None,
    radius_cap: Optional[int] = None,
) -> Ball:
    """Breadth-first Cayley ball of radius ``radius`` around the identity.

    Cells are recorded for every group element whose whole relator
    boundary lies inside the ball, indexed by the left tip.  The ball
    grows exponentially for ``n >= 3``, so the radius is capped at
    ``8 * n`` by default; pass an explicit ``radius_cap`` to go beyond,
    or ``max_vertices`` for a hard memory guard.
    """
    if radius < 0:
        raise ValueError("radius must be >= 0")
    cap = 8 * n if radius_cap is None else radius_cap
    if radius > cap:
        raise BallTooLarge(f"radius {radius} exceeds the cap {cap}")
    start = identity(n)
    elements: Dict[str, NormalForm] = {start.key: start}
    dist: Dict[str, int] = {start.key: 0}
    queue = deque([start])
    while queue:
        cur = queue.popleft()
        d = dist[cur.key]
        if d == radius:
            continue
        for letter, sign in _GEN_ORDER:
            nxt = multiply_letter(cur, letter, sign)
            if nxt.key not in elements:
                elements[nxt.key] = nxt
                dist[nxt.key] = d + 1
                queue.append(nxt)
                if max_vertices is not None and len(elements) > max_vertices:
                    raise BallTooLarge(
                        f"ball exceeded {max_vertices} vertices at radius {d + 1}"
                    )

    edges: List[Tuple[str, str, Letter]] = []
    for key in sorted(elements):
        nf = elements[key]
        for letter in ("a", "b"):
            nxt = multiply_letter(nf, letter, 1)
            if nxt.key in elements:
                edges.append((key, nxt.key, letter))

    precells: List[Precell] = []
    for key in sorted(elements):
        nf = elements[key]
        paths: List[Tuple[str, ...]] = []
        ok = True
        for start_letter in ("a", "b"):
            path = [key]
            cur = nf
            for ch in alternating_word(start_letter, n):
                cur = multiply_letter(cur, ch, 1)
                if cur.key not in elements:
                    ok = False
                    break
                path.append(cur.key)
            if not ok:
                break
            paths.append(tuple(path))
        if ok:
            upper, lower = paths
            if upper[-1] != lower[-1]:
                raise AssertionError("relator boundary failed to close")
            precells.append(Precell(n=n, tip=key, upper=upper, lower=lower))

    return Ball(
        n=n,
        radius=radius,
        elements=elements,
        distance=dist,
        edges=edges,
        precells=precells,
    )


# ---------------------------------------------------------------------------
# Cells through a vertex.


@dataclass(frozen=True)
class CellsAtVertex:
    vertex: str
    cells: Tuple[Tuple[str, int, Precell], ...]  # (half, index, cell)
    complete: bool
    warning: Optional[str] = None


def boundary_position_words(n: int) -> List[Tuple[str, int, Tuple[Tuple[Letter, int], ...]]]:
    """The 2n boundary positions of a cell as words from the left tip."""
    out: List[Tuple[str, int, Tuple[Tuple[Letter, int], ...]]] = []
    for i in range(0, n + 1):
        word = tuple((ch, 1) for ch in alternating_word("a", i))
        out.append(("upper", i, word))
    for i in range(1, n):
        word = tuple((ch, 1) for ch in alternating_word("b", i))
        out.append(("lower", i, word))
    return out


def precells_at(ball: Ball, vertex: str) -> CellsAtVertex:
    """All cells of the ball containing ``vertex``.

    For an interior vertex (at distance ``>= 2n`` from the ball
    boundary) exactly ``2n`` cells are returned; closer to the boundary
    the result may be partial and carries a warning.
    """
    if vertex not in ball.elements:
        raise KeyError(f"vertex {vertex!r} not in ball")
    v = ball.elements[vertex]
    found = []
    for half, index, word in boundary_position_words(ball.n):
        w = normal_form(ball.n, word)
        tip = multiply(v, inverse(w))
        cell = ball.cells_by_tip.get(tip.key)
        if cell is not None:
            found.append((half, index, cell))
    complete = len(found) == 2 * ball.n
    warning = None
    if not ball.interior(vertex, 2 * ball.n) and not complete:
        warning = (
            f"vertex at distance {ball.distance[vertex]} is within 2n of the "
            f"radius-{ball.radius} boundary; cell list may be partial"
        )
    return CellsAtVertex(vertex=vertex, cells=tuple(found), complete=complete, warning=warning)


class LazyBall:
    """Radius-certified view of a Cayley ball, built element by element.

    Full enumeration of a radius-4n ball is hopeless for larger n (the
    vertex count grows by roughly an order of magnitude per two radius
    steps), but link construction around a vertex near the identity
    only ever touches elements whose defining spelling is short.  The
    spelling length certifies membership in the ball, so those queries
    can be answered exactly without a BFS.  Queries about elements the
    certificate cannot vouch for answer negatively; callers that need
    the exact boundary fringe should use :func:`build_ball`.
    """

    def __init__(self, n: int, radius: int) -> None:
        if n < 2 or radius < 0:
            raise ValueError("need n >= 2 and radius >= 0")
        self.n = n
        self.radius = radius
        self._cells: Dict[str, Optional[Precell]] = {}

    def has_vertex(self, key: str) -> bool:
        return parse_key(self.n, key).positive_length <= self.radius

    def nf(self, key: str) -> NormalForm:
        return parse_key(self.n, key)

    def cell_at(self, tip_key: str) -> Optional[Precell]:
        if tip_key in self._cells:
            return self._cells[tip_key]
        cell: Optional[Precell] = None
        tip = parse_key(self.n, tip_key)
        paths = []
        ok = True
        for start_letter in ("a", "b"):
            path = [tip_key]
            cur = tip
            for ch in alternating_word(start_letter, self.n):
                cur = multiply_letter(cur, ch, 1)
                if cur.positive_length > self.radius:
                    ok = False
                    break
                path.append(cur.key)
            if not ok:
                break
            paths.append(tuple(path))
        if ok:
            cell = Precell(n=self.n, tip=tip_key, upper=paths[0], lower=paths[1])
        self._cells[tip_key] = cell
        return cell

    def cells_through(self, vertex: str) -> List[Tuple[str, int, Precell]]:
        v = parse_key(self.n, vertex)
        found = []
        for half, index, word in boundary_position_words(self.n):
            w = normal_form(self.n, word)
            tip = multiply(v, inverse(w))
            cell = self.cell_at(tip.key)
            if cell is not None:
                found.append((half, index, cell))
        return found


# ---------------------------------------------------------------------------
# Intersections of cells and their audit.


@dataclass(frozen=True)
class PrecellIntersection:
    kind: str  # empty | vertex | path | other
    shared_vertices: Tuple[str, ...]
    shared_edges: Tuple[frozenset, ...]
    endpoints: Tuple[str, ...] = ()
    halves: Tuple[Optional[str], Optional[str]] = (None, None)
    proper: bool = True

    @property
    def edge_count(self) -> int:
        return len(self.shared_edges)


def precell_intersection(c1: Precell, c2: Precell) -> PrecellIntersection:
    """Describe the intersection of two distinct cells, with no shape assumption."""
    if c1.tip == c2.tip:
        raise ValueError("intersection is only defined for two distinct cells")
    v1, v2 = set(c1.vertices), set(c2.vertices)
    shared_v = v1 & v2
    shared_e = c1.edge_pairs() & c2.edge_pairs()
    if not shared_v:
        return PrecellIntersection("empty", (), ())
    if not shared_e:
        kind = "vertex" if len(shared_v) == 1 else "other"
        return PrecellIntersection(kind, tuple(sorted(shared_v)), ())

    degree: Dict[str, int] = {v: 0 for v in shared_v}
    covered: Set[str] = set()
    for e in shared_e:
        for v in e:
            degree[v] = degree.get(v, 0) + 1
            covered.add(v)
    is_path = (
        covered == shared_v
        and len(shared_e) == len(shared_v) - 1
        and all(d <= 2 for d in degree.values())
        and _edges_connected(shared_e)
    )
    endpoints = tuple(sorted(v for v, d in degree.items() if d == 1))
    halves = []
    for cell in (c1, c2):
        half: Optional[str] = None
        if shared_e <= cell.half_edge_pairs("upper"):
            half = "upper"
        elif shared_e <= cell.half_edge_pairs("lower"):
            half = "lower"
        halves.append(half)
    proper = len(shared_e) < c1.n
    kind = "path" if is_path else "other"
    return PrecellIntersection(
        kind,
        tuple(sorted(shared_v)),
        tuple(sorted(shared_e, key=sorted)),
        endpoints,
        (halves[0], halves[1]),
        proper,
    )


def _edges_connected(edges: Set[frozenset]) -> bool:
    if not edges:
        return True
    verts = {v for e in edges for v in e}
    adj: Dict[str, Set[str]] = {v: set() for v in verts}
    for e in edges:
        x, y = tuple(e)
        adj[x].add(y)
        adj[y].add(x)
    seen = set()
    stack = [next(iter(verts))]
    while stack:
        v = stack.pop()
        if v in seen:
            continue
        seen.add(v)
        stack.extend(adj[v] - seen)
    return seen == verts


@dataclass
class PrecellAudit:
    ok: bool
    violations: List[dict]
    pairs_checked: int
    triples_checked: int
    edge_count_histogram: Dict[int, int]

    def __bool__(self) -> bool:
        return self.ok


def verify_precell_lemmas(ball: Ball) -> PrecellAudit:
    """Audit the intersection pattern of all cell pairs in the ball.

    Checked properties, reported as violations when broken:

    * each cell boundary is an embedded 2n-gon;
    * every nonempty pairwise intersection is a vertex or a path;
    * a path intersection sits inside a single half of each cell and is
      a proper subset of that half;
    * a path intersection runs from a tip of one cell to a tip of the
      other, one left tip and one right tip;
    * no two distinct cells share an identical at-least-one-edge
      intersection with a third cell;
    * for triples: if two cells each share an edge with a third and
      those intersections barely meet, the two cells share at most one
      point.
    """
    violations: List[dict] = []

    for cell in ball.precells:
        verts = cell.vertices
        if len(set(verts)) != 2 * ball.n:
            violations.append(
                {"check": "embedded-boundary", "cell": cell.tip, "detail": "repeated vertex"}
            )

    by_vertex: Dict[str, List[int]] = {}
    for idx, cell in enumerate(ball.precells):
        for v in cell.vertices:
            by_vertex.setdefault(v, []).append(idx)

    pair_indices = sorted(
        {
            (i, j)
            for members in by_vertex.values()
            for i in members
            for j in members
            if i < j
        }
    )

    inter_cache: Dict[Tuple[int, int], PrecellIntersection] = {}
    edge_partners: Dict[int, List[int]] = {}
    histogram: Dict[int, int] = {}
    signature_owner: Dict[Tuple[str, Tuple[frozenset, ...]], str] = {}

    for i, j in pair_indices:
        c1, c2 = ball.precells[i], ball.precells[j]
        inter = precell_intersection(c1, c2)
        inter_cache[(i, j)] = inter
        histogram[inter.edge_count] = histogram.get(inter.edge_count, 0) + 1
        if inter.kind == "other":
            violations.append(
                {
                    "check": "connected-path-shape",
                    "cells": [c1.tip, c2.tip],
                    "detail": f"intersection is not empty/vertex/path: {inter.shared_vertices}",
                }
            )
            continue
        if inter.edge_count == 0:
            continue

        edge_partners.setdefault(i, []).append(j)
        edge_partners.setdefault(j, []).append(i)

        if inter.halves[0] is None or inter.halves[1] is None or not inter.proper:
            violations.append(
                {
                    "check": "single-half-proper",
                    "cells": [c1.tip, c2.tip],
                    "detail": f"halves={inter.halves} edges={inter.edge_count}",
                }
            )
        tips_ok = False
        if len(inter.endpoints) == 2:
            x, y = inter.endpoints
            for e1, e2 in ((x, y), (y, x)):
                t1, t2 = c1.tip_kind(e1), c2.tip_kind(e2)
                if t1 and t2 and {t1, t2} == {"left", "right"}:
                    tips_ok = True
        if not tips_ok:
            violations.append(
                {
                    "check": "tip-to-tip",
                    "cells": [c1.tip, c2.tip],
                    "detail": f"endpoints {inter.endpoints} miss the tip pattern",
                }
            )

        for owner, member in ((c1, c2), (c2, c1)):
            sig = (owner.tip, inter.shared_edges)
            prev = signature_owner.get(sig)
            if prev is not None and prev != member.tip:
                violations.append(
                    {
                        "check": "unique-partner",
                        "cells": [owner.tip, prev, member.tip],
                        "detail": "two cells share the same edge-intersection with a third",
                    }
                )
            signature_owner[sig] = member.tip

    triples = 0
    for i, partners in sorted(edge_partners.items()):
        for x in range(len(partners)):
            for y in range(x + 1, len(partners)):
                j, k = partners[x], partners[y]
                inter_ij = inter_cache[(min(i, j), max(i, j))]
                inter_ik = inter_cache[(min(i, k), max(i, k))]
                overlap = set(inter_ij.shared_vertices) & set(inter_ik.shared_vertices)
                if len(overlap) > 1:
                    continue
                triples += 1
                c2, c3 = ball.precells[j], ball.precells[k]
                shared_e = c2.edge_pairs() & c3.edge_pairs()
                shared_v = set(c2.vertices) & set(c3.vertices)
                if shared_e or len(shared_v) > 1:
                    violations.append(
                        {
                            "check": "triple-small-intersection",
                            "cells": [ball.precells[i].tip, c2.tip, c3.tip],
                            "detail": f"side cells share {len(shared_e)} edges, "
                            f"{len(shared_v)} vertices",
                        }
                    )

    return PrecellAudit(
        ok=not violations,
        violations=violations,
        pairs_checked=len(pair_indices),
        triples_checked=triples,
        edge_count_histogram=dict(sorted(histogram.items())),
    )


# ---------------------------------------------------------------------------
# Distance bounds from the tree-times-line model.

_AB_POWER_CACHE: Dict[Tuple[int, int], NormalForm] = {}


def _ab_power(n: int, k: int) -> NormalForm:
    cached = _AB_POWER_CACHE.get((n, k))
    if cached is None:
        cached = normal_form(n, "ab" * k if k >= 0 else "BA" * (-k))
        _AB_POWER_CACHE[(n, k)] = cached
    return cached


def in_translation_cyclic(x: NormalForm) -> bool:
    """Membership in the cyclic subgroup generated by ``ab``."""
    h = x.exponent_sum
    if h % 2 != 0:
        return False
    return equal(x, _ab_power(x.n, h // 2))


def coset_key(x: NormalForm) -> str:
    """Canonical key of the left coset ``x<ab>``.

    Right multiplication by ``(ab)^k`` shifts the exponent sum by 2k,
    so each coset holds exactly one element with exponent sum 0 or 1;
    that element's normal-form key is the coset key.
    """
    h = x.exponent_sum
    k = ((h % 2) - h) // 2
    return multiply(x, _ab_power(x.n, k)).key


def same_coset(x: NormalForm, y: NormalForm) -> bool:
    return coset_key(x) == coset_key(y)


@dataclass(frozen=True)
class WiseBounds:
    lower: int
    upper: int
    height: int
    tree_distance: int

    def __iter__(self):
        return iter((self.lower, self.upper))


def coset_tree_period(n: int) -> int:
    """Length of the neighbor family ``g (ab)^k s <ab>`` modulo repeats.

    The conjugate of a generator by ``(ab)^k`` first returns to the
    same coset family when ``(ab)^k`` is central, so the period is the
    exponent of the first central power of ``ab``.
    """
    return n if n % 2 == 1 else n // 2


def coset_neighbors(rep: NormalForm) -> Dict[str, NormalForm]:
    """Adjacent cosets of ``rep <ab>``, keyed canonically.

    Neighbors are found by one generator step from any element of the
    coset; elements ``rep (ab)^k`` for ``k`` over one period suffice.
    """
    n = rep.n
    out: Dict[str, NormalForm] = {}
    own = coset_key(rep)
    for k in range(coset_tree_period(n)):
        base = multiply(rep, _ab_power(n, k))
        for letter, sign in _GEN_ORDER:
            cand = multiply_letter(base, letter, sign)
            key = coset_key(cand)
            if key != own:
                out.setdefault(key, cand)
    return out


def _tree_distance(g: NormalForm, depth_cap: int) -> int:
    """BFS distance from the identity coset to ``g <ab>``.

    Every generator step moves an element to an adjacent coset, so
    this graph distance lower-bounds word length.
    """
    target = coset_key(g)
    start = identity(g.n)
    if coset_key(start) == target:
        return 0
    seen = {coset_key(start)}
    frontier: List[NormalForm] = [start]
    depth = 0
    while frontier and depth < depth_cap:
        depth += 1
        nxt: List[NormalForm] = []
        for rep in frontier:
            for key, cand in sorted(coset_neighbors(rep).items()):
                if key == target:
                    return depth
                if key not in seen:
                    seen.add(key)
                    nxt.append(cand)
        frontier = nxt
    raise AssertionError("tree distance search exceeded its cap")


def wise_model_distance_bounds(n: int, g) -> WiseBounds:
    """Word-length bounds for ``g`` from the square-complex model.

    The model fibers the group over a locally finite tree (cosets of
    the ``ab`` translation subgroup) with a height function (exponent
    sum).  Every generator changes the height by exactly one and moves
    the fiber by at most one tree edge, hence the maximum of the two is
    a lower bound for word length.  The defining spelling length of the
    normal form is the returned upper bound.
    """
    nf = g if isinstance(g, NormalForm) else normal_form(n, g)
    height = nf.exponent_sum
    cap = nf.positive_length + 2
    tree_dist = _tree_distance(nf, depth_cap=max(cap, 2))
    lower = max(abs(height), tree_dist)
    upper = nf.positive_length
    return WiseBounds(lower=lower, upper=upper, height=height, tree_distance=tree_dist)
