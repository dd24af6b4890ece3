import math
import os
import random
import sys
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

sys.path.insert(0, os.path.dirname(__file__))

from coxeter_oracle import chamber_of_word, oracle_distance

from artin_atlas import coxeter as cx
from artin_atlas.graphs import DefiningGraph


# ---------------------------------------------------------------------------
# Triple scan.


def test_euclidean_triples_exact_list():
    assert cx.euclidean_triples(100) == [(2, 3, 6), (2, 4, 4), (3, 3, 3)]


def test_euclidean_triples_small_limit():
    assert cx.euclidean_triples(2) == []
    assert cx.euclidean_triples(3) == [(3, 3, 3)]
    assert cx.euclidean_triples(5) == [(2, 4, 4), (3, 3, 3)]
    assert cx.euclidean_triples(6) == [(2, 3, 6), (2, 4, 4), (3, 3, 3)]


def test_triangle_for_normalizes_order():
    tri = cx.triangle_for((6, 2, 3), names=("x", "y", "z"))
    assert tri.labels == (2, 3, 6)
    assert tri.names == ("y", "z", "x")
    # the label between two reflections is the third slot
    assert tri.label_between("y", "z") == 6
    assert tri.label_between("y", "x") == 3
    assert tri.label_between("z", "x") == 2


def test_triangle_rejects_non_flat_labels():
    with pytest.raises(ValueError):
        cx.triangle_for((3, 3, 4))
    with pytest.raises(ValueError):
        cx.triangle_for((2, 2, 4))


def test_triangle_from_graph():
    g = DefiningGraph(
        vertices=("p", "q", "r"),
        edges=(("p", "q", 6), ("p", "r", 3), ("q", "r", 2)),
    )
    tri = cx.triangle_from_graph(g, ("p", "q", "r"))
    assert tri.labels == (2, 3, 6)
    assert tri.label_between("p", "q") == 6
    assert tri.label_between("p", "r") == 3
    assert tri.label_between("q", "r") == 2


# ---------------------------------------------------------------------------
# Patches.

TRIPLES = [(3, 3, 3), (2, 4, 4), (2, 3, 6)]


@pytest.fixture(scope="module")
def patches():
    return {
        labels: cx.build_davis_patch(cx.triangle_for(labels), 6)
        for labels in TRIPLES
    }


def test_radius_zero_is_single_chamber():
    patch = cx.build_davis_patch(cx.triangle_for((3, 3, 3)), 0)
    assert len(patch.chambers) == 1
    assert len(patch.edges) == 0
    assert len(patch.cells) == 0


@pytest.mark.parametrize(
    "labels,sizes",
    [((3, 3, 3), {6}), ((2, 4, 4), {4, 8}), ((2, 3, 6), {4, 6, 12})],
)
def test_cell_sizes_per_triple(patches, labels, sizes):
    patch = patches[labels]
    assert {cell.sides for cell in patch.cells.values()} == sizes
    for cell in patch.cells.values():
        assert cell.sides == 2 * patch.triple.labels[cell.corner_index]


def test_chamber_cap_enforced():
    with pytest.raises(cx.PatchTooLarge):
        cx.build_davis_patch(cx.triangle_for((3, 3, 3)), 30, max_chambers=100)


def test_labels_alternate_around_every_cell(patches):
    for patch in patches.values():
        for cell in patch.cells.values():
            cyc = cell.chambers
            ring = [
                patch.edges[frozenset((cyc[t], cyc[(t + 1) % len(cyc)]))].generator
                for t in range(len(cyc))
            ]
            expected = {t for t in range(3) if t != cell.corner_index}
            assert set(ring) == expected
            for t in range(len(ring)):
                assert ring[t] != ring[(t + 1) % len(ring)]


def _cells_by_center(patch):
    return {
        (c.center[0].rational, c.center[0].radical,
         c.center[1].rational, c.center[1].radical): c
        for c in patch.cells.values()
    }


def _corner_angle_at(patch, cell, key):
    cyc = cell.chambers
    i = cyc.index(key)
    p = patch.chambers[key].point
    prev = patch.chambers[cyc[i - 1]].point
    nxt = patch.chambers[cyc[(i + 1) % len(cyc)]].point
    v1 = (float(prev[0] - p[0]), float(prev[1] - p[1]))
    v2 = (float(nxt[0] - p[0]), float(nxt[1] - p[1]))
    dot = v1[0] * v2[0] + v1[1] * v2[1]
    n1 = math.hypot(*v1)
    n2 = math.hypot(*v2)
    return math.acos(max(-1.0, min(1.0, dot / (n1 * n2))))


@pytest.mark.parametrize("labels", TRIPLES)
def test_interior_angle_sum_is_two_pi(patches, labels):
    # symbolic route: corner angles of regular 2m-gons sum via the label
    # reciprocals, so the sum is 2 pi exactly when 1/m0+1/m1+1/m2 = 1
    assert sum(Fraction(m - 1, m) for m in labels) == 2

    # numeric route on every chamber whose three cells are all present
    patch = patches[labels]
    by_center = _cells_by_center(patch)
    checked = 0
    for key, chamber in patch.chambers.items():
        cells = []
        for k in range(3):
            center = chamber.isometry.apply(patch.base_corners[k])
            ck = (center[0].rational, center[0].radical,
                  center[1].rational, center[1].radical)
            if ck not in by_center:
                break
            cells.append(by_center[ck])
        else:
            total = sum(_corner_angle_at(patch, cell, key) for cell in cells)
            assert abs(total - 2 * math.pi) < 1e-9
            checked += 1
    assert checked >= 3


def test_every_wall_separates(patches):
    for patch in patches.values():
        carriers = cx.walls(patch)
        assert carriers
        assert all(w.separates for w in carriers)
        assert all(w.side_counts[0] > 0 and w.side_counts[1] > 0 for w in carriers)


def test_base_chamber_edges_lie_on_three_walls(patches):
    for patch in patches.values():
        lines = cx.base_wall_lines(patch)
        assert len(set(lines)) == 3
        carrier_lines = {w.line for w in cx.walls(patch)}
        for line in lines:
            assert line in carrier_lines


def test_2_3_6_square_wall_carrier_alternates():
    patch = cx.build_davis_patch(cx.triangle_for((2, 3, 6)), 8)
    line = cx.base_wall_lines(patch)[1]
    carrier = [w for w in cx.walls(patch) if w.line == line][0]
    assert len(carrier.pattern) >= 4
    assert set(carrier.pattern) == {4, 12}
    for t in range(len(carrier.pattern) - 1):
        assert carrier.pattern[t] != carrier.pattern[t + 1]


def test_2_3_6_mixed_wall_carrier_period():
    patch = cx.build_davis_patch(cx.triangle_for((2, 3, 6)), 8)
    line = cx.base_wall_lines(patch)[2]
    carrier = [w for w in cx.walls(patch) if w.line == line][0]
    assert set(carrier.pattern) == {4, 6, 12}
    # squares and 12-gons alternate between hexagons along this family
    for t in range(len(carrier.pattern) - 1):
        pair = {carrier.pattern[t], carrier.pattern[t + 1]}
        assert pair in ({4, 6}, {6, 12})


# ---------------------------------------------------------------------------
# Strips.


@pytest.mark.parametrize("labels", TRIPLES)
@pytest.mark.parametrize("wall", [0, 1, 2])
def test_strip_orientation_valid(labels, wall):
    tri = cx.triangle_for(labels)
    strip = cx.coxeter_line_template(tri, wall, 2)
    assert len(strip.cells) == 3
    assert cx.validate_strip(strip) == []


def test_strip_length_zero_single_cell():
    tri = cx.triangle_for((2, 3, 6))
    strip = cx.coxeter_line_template(tri, 1, 0)
    assert len(strip.cells) == 1
    assert cx.validate_strip(strip) == []


def test_strip_flipped_edge_rejected():
    tri = cx.triangle_for((2, 3, 6))
    strip = cx.coxeter_line_template(tri, 1, 2)
    ek = frozenset((strip.plus_path[0], strip.plus_path[1]))
    tail, head = strip.orientation[ek]
    strip.orientation[ek] = (head, tail)
    assert cx.validate_strip(strip) != []


def test_strip_cells_read_as_relator_cells():
    tri = cx.triangle_for((2, 4, 4))
    strip = cx.coxeter_line_template(tri, 0, 2)
    for cell in strip.cells:
        ring = strip.cell_edges[cell.id]
        outdeg = {k: 0 for k in cell.chambers}
        indeg = {k: 0 for k in cell.chambers}
        for ek in ring:
            tail, head = strip.orientation[ek]
            outdeg[tail] += 1
            indeg[head] += 1
        sources = [k for k in cell.chambers if outdeg[k] == 2]
        sinks = [k for k in cell.chambers if indeg[k] == 2]
        assert len(sources) == 1 and len(sinks) == 1
        # both directed boundary halves run source -> sink in m steps
        m = cell.sides // 2
        succ = {}
        for ek in ring:
            tail, head = strip.orientation[ek]
            succ.setdefault(tail, []).append(head)
        for first in succ[sources[0]]:
            steps, node = 1, first
            while node != sinks[0]:
                nxts = succ.get(node, [])
                assert len(nxts) == 1
                node = nxts[0]
                steps += 1
            assert steps == m


def test_strip_dual_edges_interior_count():
    tri = cx.triangle_for((3, 3, 3))
    strip = cx.coxeter_line_template(tri, 0, 3)
    # four cells in a row are crossed by the wall through five dual edges
    assert len(strip.dual_edges) == 5


# ---------------------------------------------------------------------------
# Flat orientation check.


def test_orient_patch_is_coherent(patches):
    for patch in patches.values():
        ori = cx.orient_patch(patch)
        assert cx.coxeter_flat_orientation_check(patch, ori).coherent


def test_orient_patch_cells_have_single_source_and_sink(patches):
    patch = patches[(2, 3, 6)]
    ori = cx.orient_patch(patch)
    for cell in patch.cells.values():
        cyc = cell.chambers
        indeg = {k: 0 for k in cyc}
        outdeg = {k: 0 for k in cyc}
        for t in range(len(cyc)):
            ek = frozenset((cyc[t], cyc[(t + 1) % len(cyc)]))
            tail, head = ori[ek]
            outdeg[tail] += 1
            indeg[head] += 1
        assert sum(1 for k in cyc if outdeg[k] == 2) == 1
        assert sum(1 for k in cyc if indeg[k] == 2) == 1


def test_flat_check_flip_produces_wall_witness(patches):
    patch = patches[(2, 4, 4)]
    ori = cx.orient_patch(patch)
    rng = random.Random(11)
    ek = rng.choice(sorted(ori, key=lambda e: sorted(map(str, e))))
    tail, head = ori[ek]
    ori[ek] = (head, tail)
    report = cx.coxeter_flat_orientation_check(patch, ori)
    assert not report.coherent
    w1, w2 = report.witness
    assert w1 != w2
    # the witness walls are parallel: same normalised direction part
    assert w1[:2] == w2[:2]


# ---------------------------------------------------------------------------
# Distances.


def test_distance_identities():
    tri = cx.triangle_for((2, 3, 6))
    assert cx.coxeter_distance(tri, [], [tri.names[0]]) == 1
    m = tri.pair_label(0, 1)
    power = [tri.names[0], tri.names[1]] * m
    assert cx.coxeter_distance(tri, [], power) == 0
    assert cx.coxeter_distance(tri, [tri.names[0]], [tri.names[0], tri.names[1]]) == 1


def test_distance_matches_patch_bfs_oracle():
    tri = cx.triangle_for((2, 3, 6))
    patch = cx.build_davis_patch(tri, 12)
    rng = random.Random(2026)
    for _ in range(50):
        word = [rng.choice(tri.names) for _ in range(rng.randint(0, 8))]
        assert cx.coxeter_distance(tri, [], word) == oracle_distance(patch, [], word)


def test_distance_between_two_words_matches_oracle():
    tri = cx.triangle_for((2, 4, 4))
    patch = cx.build_davis_patch(tri, 12)
    rng = random.Random(5)
    for _ in range(10):
        w1 = [rng.choice(tri.names) for _ in range(rng.randint(0, 5))]
        w2 = [rng.choice(tri.names) for _ in range(rng.randint(0, 5))]
        assert cx.coxeter_distance(tri, w1, w2) == oracle_distance(patch, w1, w2)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.sampled_from(["s", "t", "u"]), max_size=7))
def test_distance_bounded_by_length_with_matching_parity(word):
    tri = cx.triangle_for((3, 3, 3))
    d = cx.coxeter_distance(tri, [], word)
    assert d <= len(word)
    assert (d - len(word)) % 2 == 0


def test_word_walk_agrees_with_isometry_chamber():
    tri = cx.triangle_for((3, 3, 3))
    patch = cx.build_davis_patch(tri, 10)
    rng = random.Random(3)
    for _ in range(20):
        word = [rng.choice(tri.names) for _ in range(rng.randint(0, 8))]
        walked = chamber_of_word(patch, word)
        g = patch.chambers[patch.base_key].isometry
        for name in word:
            g = g.compose(patch.reflections[tri.names.index(name)])
        direct = cx._chamber_key(tuple(g.apply(p) for p in patch.base_corners))
        assert walked == direct


# ---------------------------------------------------------------------------
# Exports.


def test_json_export_mentions_cells_and_generators(patches):
    text = cx.patch_to_json(patches[(2, 3, 6)])
    assert '"triple"' in text
    assert '"cells"' in text
    assert '"generator"' in text


def test_svg_export_has_polygons(patches):
    svg = cx.patch_to_svg(patches[(3, 3, 3)])
    assert svg.startswith("<svg")
    assert "<polygon" in svg


def test_wall_dot_export(patches):
    dot = cx.wall_adjacency_dot(patches[(2, 4, 4)])
    assert dot.startswith("graph walls {")
    assert "--" in dot
