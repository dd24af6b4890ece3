"""Normal forms, balls, cells and distance bounds in dihedral groups."""

import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import dihedral_oracle as oracle
from artin_atlas import dihedral as dh


def random_word(rng, length):
    return "".join(rng.choice("abAB") for _ in range(length))


def nf_of(n, word):
    return dh.normal_form(n, word)


# ---------------------------------------------------------------------------
# Normal form versus the independent invariant.


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_normal_form_matches_oracle_exhaustively(n):
    """Two words get the same key exactly when the oracle agrees."""
    length = 6 if n <= 4 else 5
    seen = {}
    for L in range(length + 1):
        for combo in itertools.product("abAB", repeat=L):
            word = "".join(combo)
            key = nf_of(n, word).key
            canon = oracle.canonical(n, word)
            if canon in seen:
                assert seen[canon] == key, (word, canon)
            else:
                seen[canon] = key
    # distinct canonical forms must have distinct keys
    assert len(set(seen.values())) == len(seen)


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6, 7])
def test_normal_form_matches_oracle_random_long(n):
    rng = random.Random(1000 + n)
    buckets = {}
    for _ in range(400):
        word = random_word(rng, rng.randint(0, 40))
        key = nf_of(n, word).key
        canon = oracle.canonical(n, word)
        buckets.setdefault(canon, set()).add(key)
    for canon, keys in buckets.items():
        assert len(keys) == 1, canon
    rev = {}
    for canon, keys in buckets.items():
        key = next(iter(keys))
        assert rev.setdefault(key, canon) == canon, key


@pytest.mark.parametrize("n", [2, 3, 4, 6])
def test_identity_words_normalize_to_identity(n):
    rng = random.Random(77 + n)
    for _ in range(150):
        w = random_word(rng, rng.randint(0, 12))
        trivial = w + _invert(w)
        assert nf_of(n, trivial).is_identity
        assert oracle.is_identity(n, trivial)


def _invert(word):
    return "".join(c.swapcase() for c in reversed(word))


def test_relator_and_delta():
    for n in range(2, 8):
        lhs = dh.alternating_word("a", n)
        rhs = dh.alternating_word("b", n)
        d = nf_of(n, lhs)
        assert dh.equal(d, nf_of(n, rhs))
        assert d.delta_power == 1 and not d.factors
        # the square of the Garside element is the full twist (ab)^n
        assert dh.equal(dh.power(d, 2), nf_of(n, "ab" * n))


def test_delta_conjugation_swaps_letters_when_odd():
    for n in range(2, 7):
        d = dh.delta(n)
        for s in "ab":
            conj = dh.multiply(dh.multiply(d, nf_of(n, s)), dh.inverse(d))
            expected = dh.other(s) if n % 2 == 1 else s
            assert dh.equal(conj, nf_of(n, expected))


@settings(max_examples=120, deadline=None)
@given(
    st.integers(min_value=2, max_value=6),
    st.text(alphabet="abAB", max_size=14),
    st.text(alphabet="abAB", max_size=14),
    st.text(alphabet="abAB", max_size=14),
)
def test_multiply_is_associative_and_matches_concat(n, u, v, w):
    x, y, z = nf_of(n, u), nf_of(n, v), nf_of(n, w)
    assert dh.equal(dh.multiply(x, y), nf_of(n, u + v))
    assert dh.equal(
        dh.multiply(dh.multiply(x, y), z), dh.multiply(x, dh.multiply(y, z))
    )


@settings(max_examples=120, deadline=None)
@given(st.integers(min_value=2, max_value=6), st.text(alphabet="abAB", max_size=16))
def test_inverse_cancels(n, w):
    x = nf_of(n, w)
    assert dh.multiply(x, dh.inverse(x)).is_identity
    assert dh.multiply(dh.inverse(x), x).is_identity


@settings(max_examples=100, deadline=None)
@given(st.integers(min_value=2, max_value=6), st.text(alphabet="ab", max_size=16))
def test_positive_words_keep_their_length(n, w):
    x = nf_of(n, w)
    assert x.exponent_sum == len(w)
    assert x.positive_length == len(w)
    assert x.delta_power >= 0


def test_factor_shapes_are_normalized():
    rng = random.Random(5)
    for n in range(2, 7):
        for _ in range(200):
            x = nf_of(n, random_word(rng, rng.randint(0, 25)))
            for start, length in x.factors:
                assert 1 <= length <= n - 1
            for f1, f2 in zip(x.factors, x.factors[1:]):
                # junction letters agree: pair is left-weighted
                assert f2[0] == dh._last_letter(f1)


def test_word_parsing_variants():
    assert dh.parse_word("abA") == (("a", 1), ("b", 1), ("a", -1))
    assert dh.parse_word("a b^-2") == (("a", 1), ("b", -1), ("b", -1))
    assert dh.parse_word("b^3") == (("b", 1),) * 3
    with pytest.raises(ValueError):
        dh.parse_word("ac")


# ---------------------------------------------------------------------------
# Cayley balls.


def test_ball_z2_radius2_is_diamond():
    ball = dh.build_ball(2, 2)
    assert len(ball.elements) == 13  # 1 + 4 + 8 lattice points
    assert ball.distance[dh.identity(2).key] == 0
    assert all(d <= 2 for d in ball.distance.values())


def test_ball_distances_agree_with_direct_bfs():
    """Distances recomputed from the edge set plus boundary letters."""
    for n in (2, 3, 4):
        ball = dh.build_ball(n, 4)
        # symmetric: distance of inverse equals distance
        for key, nf in ball.elements.items():
            inv = dh.inverse(nf)
            if inv.key in ball.distance:
                assert ball.distance[inv.key] == ball.distance[key]
        # one-step consistency along positive edges
        for u, v, _ in ball.edges:
            assert abs(ball.distance[u] - ball.distance[v]) <= 1


def test_ball_is_monotone_in_radius():
    small = dh.build_ball(3, 3)
    big = dh.build_ball(3, 4)
    assert set(small.elements) <= set(big.elements)
    for k, d in small.distance.items():
        assert big.distance[k] == d


def test_ball_vertex_counts_frozen():
    # computed once from this implementation and pinned down
    sizes = {}
    for n in (2, 3, 4):
        for radius in (1, 2, 3):
            sizes[(n, radius)] = len(dh.build_ball(n, radius).elements)
    assert sizes == {
        (2, 1): 5,
        (2, 2): 13,
        (2, 3): 25,
        (3, 1): 5,
        (3, 2): 17,
        (3, 3): 47,  # matches the count of distinct oracle invariants
        (4, 1): 5,
        (4, 2): 17,
        (4, 3): 53,
    }


def test_ball_cap_guard():
    with pytest.raises(dh.BallTooLarge):
        dh.build_ball(3, 6, max_vertices=30)


def test_ball_radius_cap_defaults_to_eight_n():
    with pytest.raises(dh.BallTooLarge):
        dh.build_ball(2, 17)
    ball = dh.build_ball(2, 17, radius_cap=17)
    assert ball.radius == 17


# ---------------------------------------------------------------------------
# Cells.


def test_precell_boundaries_close_and_embed():
    for n in (2, 3, 4):
        ball = dh.build_ball(n, 2 * n + 2)
        assert ball.precells, "expected interior cells"
        for cell in ball.precells:
            assert cell.upper[0] == cell.lower[0] == cell.tip
            assert cell.upper[-1] == cell.lower[-1]
            assert len(cell.vertices) == 2 * n
            assert len(set(cell.vertices)) == 2 * n
        # the cell at the identity tip follows the two relator spellings
        e = dh.identity(n).key
        cell = ball.cells_by_tip[e]
        for path, start in ((cell.upper, "a"), (cell.lower, "b")):
            for i, key in enumerate(path):
                word = dh.alternating_word(start, i)
                assert key == dh.normal_form(n, word).key


def test_precell_edge_letters():
    ball = dh.build_ball(3, 7)
    cell = ball.cells_by_tip[dh.identity(3).key]
    letters = [letter for _, _, letter in cell.oriented_edges()]
    assert letters == ["a", "b", "a", "b", "a", "b"]


def test_cells_at_interior_vertex_complete():
    for n in (2, 3):
        ball = dh.build_ball(n, 2 * n + 1)
        at = dh.precells_at(ball, dh.identity(n).key)
        assert at.complete and at.warning is None
        assert len(at.cells) == 2 * n
        halves = sorted((half, idx) for half, idx, _ in at.cells)
        expected = sorted(
            [("upper", i) for i in range(n + 1)] + [("lower", i) for i in range(1, n)]
        )
        assert halves == expected


def test_cells_at_boundary_vertex_warns():
    ball = dh.build_ball(3, 3)
    far = max(ball.distance, key=lambda k: (ball.distance[k], k))
    at = dh.precells_at(ball, far)
    assert not at.complete
    assert at.warning is not None


def test_cells_at_unknown_vertex_raises():
    ball = dh.build_ball(2, 2)
    with pytest.raises(KeyError):
        dh.precells_at(ball, "99|zz")


# ---------------------------------------------------------------------------
# Intersection lemmas.


@pytest.mark.parametrize("n,radius", [(2, 6), (3, 8), (4, 10)])
def test_cell_intersection_audit_clean(n, radius):
    ball = dh.build_ball(n, radius)
    audit = dh.verify_precell_lemmas(ball)
    assert audit.ok, audit.violations[:5]
    assert audit.pairs_checked > 0
    assert audit.triples_checked > 0
    # no two distinct cells share n or more edges
    assert all(k < n for k in audit.edge_count_histogram)


def test_neighbour_cell_intersections_are_tip_paths():
    n = 3
    ball = dh.build_ball(n, 9)
    e = dh.identity(n).key
    base = ball.cells_by_tip[e]
    # the cell whose left tip is a shares the path a..delta with base
    shifted = ball.cells_by_tip[dh.normal_form(n, "a").key]
    inter = dh.precell_intersection(base, shifted)
    assert inter.kind == "path"
    assert inter.edge_count == n - 1
    # upper half of the base cell, lower half of the shifted one
    assert inter.halves == ("upper", "lower")
    d = dh.delta(n).key
    assert set(inter.endpoints) == {dh.normal_form(n, "a").key, d}
    # one endpoint is the right tip of base, the other the left tip of shifted
    assert base.tip_kind(d) == "right"
    assert shifted.tip_kind(dh.normal_form(n, "a").key) == "left"


def test_disjoint_cells_report_empty():
    ball = dh.build_ball(3, 8)
    c1 = ball.cells_by_tip[dh.identity(3).key]
    c2 = ball.cells_by_tip[dh.normal_form(3, "abab").key]
    inter = dh.precell_intersection(c1, c2)
    assert inter.kind == "empty"


def test_intersection_requires_distinct_cells():
    ball = dh.build_ball(3, 8)
    cell = ball.cells_by_tip[dh.identity(3).key]
    with pytest.raises(ValueError):
        dh.precell_intersection(cell, cell)


def test_audit_detects_tampered_cell():
    ball = dh.build_ball(3, 8)
    cells = list(ball.precells)
    victim = cells[0]
    # corrupt the upper path by repeating a vertex
    bad_upper = list(victim.upper)
    bad_upper[2] = bad_upper[1]
    cells[0] = dh.Precell(n=victim.n, tip=victim.tip, upper=tuple(bad_upper), lower=victim.lower)
    tampered = dh.Ball(
        n=ball.n,
        radius=ball.radius,
        elements=ball.elements,
        distance=ball.distance,
        edges=ball.edges,
        precells=cells,
    )
    audit = dh.verify_precell_lemmas(tampered)
    assert not audit.ok
    assert any(v["check"] == "embedded-boundary" for v in audit.violations)


def test_audit_detects_shifted_cell():
    """A fabricated overlapping cell breaks the uniqueness lemma."""
    ball = dh.build_ball(3, 8)
    base = ball.cells_by_tip[dh.identity(3).key]
    fake = dh.Precell(n=3, tip="fake", upper=base.upper, lower=base.lower)
    tampered = dh.Ball(
        n=ball.n,
        radius=ball.radius,
        elements=ball.elements,
        distance=ball.distance,
        edges=ball.edges,
        precells=list(ball.precells) + [fake],
    )
    audit = dh.verify_precell_lemmas(tampered)
    assert not audit.ok


# ---------------------------------------------------------------------------
# Distance bounds.


def test_wise_bounds_z2_are_exact():
    for p, q in [(1, 0), (2, 3), (-1, 4), (-3, -2), (5, -5)]:
        word = ("a" * p if p >= 0 else "A" * -p) + ("b" * q if q >= 0 else "B" * -q)
        bounds = dh.wise_model_distance_bounds(2, word)
        assert bounds.lower == abs(p) + abs(q)
        assert bounds.lower <= bounds.upper
        assert bounds.height == p + q


def test_wise_bounds_small_cases():
    b = dh.wise_model_distance_bounds(3, "aba")
    assert (b.lower, b.upper) == (3, 3)
    assert b.height == 3 and b.tree_distance == 1
    b = dh.wise_model_distance_bounds(3, "aB")
    assert b.lower == 2 and b.height == 0 and b.tree_distance == 2
    b = dh.wise_model_distance_bounds(4, "")
    assert b.lower == 0 and b.upper == 0


def test_wise_lower_bound_is_sound():
    """The lower bound never exceeds the true BFS distance."""
    for n in (2, 3, 4):
        ball = dh.build_ball(n, 4)
        for key, nf in sorted(ball.elements.items()):
            bounds = dh.wise_model_distance_bounds(n, nf)
            assert bounds.lower <= ball.distance[key] <= bounds.upper


def test_wise_bounds_unpack_as_tuple():
    lower, upper = dh.wise_model_distance_bounds(3, "abAB")
    assert lower <= upper


def test_translation_subgroup_membership():
    n = 3
    assert dh.in_translation_cyclic(dh.normal_form(n, "ababab"))
    assert dh.in_translation_cyclic(dh.normal_form(n, "BABA"))
    assert not dh.in_translation_cyclic(dh.normal_form(n, "a"))
    assert not dh.in_translation_cyclic(dh.normal_form(n, "ba"))
    assert dh.in_translation_cyclic(dh.identity(n))


# ---------------------------------------------------------------------------
# Agreement with the brute-force rewriting oracle.


@pytest.mark.parametrize("n,max_word", [(3, 6), (4, 5)])
def test_normal_form_equality_matches_rewriting_oracle(n, max_word):
    """Word equality via normal forms equals equality by bounded rewriting.

    Every word up to the length bound is keyed by its normal form; for
    each class, the rewriting closure of the shortest member must reach
    every member (same key implies rewritable into each other) and must
    contain no short word with a different key (rewritable implies same
    key).  The closure budget is two letters above the word bound, and
    reaching every member proves the budget sufficient.
    """
    import rewrite_oracle as ro

    key_of = {}
    classes = {}
    for length in range(max_word + 1):
        for word in ro.all_words(length):
            key = dh.normal_form(n, ro.to_letters(word)).key
            key_of[word] = key
            classes.setdefault(key, []).append(word)

    budget = max_word + 2
    for key, members in sorted(classes.items()):
        representative = min(members, key=lambda w: (len(w), w))
        closure = ro.equivalence_class(n, representative, budget)
        missing = [w for w in members if w not in closure]
        assert not missing, (key, representative, missing[:3])
        for word in closure:
            if word in key_of:
                assert key_of[word] == key, (representative, word)


def test_rewriting_oracle_knows_the_relator():
    import rewrite_oracle as ro

    for n in (2, 3, 4):
        relator = tuple(ro._alternating(ro.A, n)) + tuple(
            -x for x in reversed(ro._alternating(ro.B, n))
        )
        assert ro.is_identity(n, relator)
        assert not ro.is_identity(n, (ro.A,))
        assert ro.free_reduce((ro.A, -ro.A, ro.B)) == (ro.B,)
