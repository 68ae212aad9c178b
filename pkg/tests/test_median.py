"""Tests for the median/center machinery on finite labelled trees."""

from itertools import combinations, permutations, product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dendro.errors import LimitExceeded, NotPositiveType, UnknownVertex
from dendro.median import (
    INF,
    REGULAR,
    BetweennessRel,
    FiniteTree,
    _all_tree_shapes_upto,
    canonical_code,
    count_orbit_types,
    iso_labeled,
    realize_tree,
    verify_positive_type,
)


# -- oracles -------------------------------------------------------------------

def brute_center(tree, x, y, z):
    """Independent oracle: intersect the three path sets."""
    common = set(tree.path(x, y)) & set(tree.path(y, z)) & set(tree.path(z, x))
    assert len(common) == 1
    return common.pop()


def brute_c_closure(tree, ys):
    """Iterate the center map to an honest fixed point."""
    out = set(ys)
    while True:
        add = set()
        for a, b, c in product(out, repeat=3):
            add.add(brute_center(tree, a, b, c))
        if add <= out:
            return out
        out |= add


def brute_iso(t1, t2):
    """Exhaustive search for a label- and adjacency-preserving bijection."""
    v1, v2 = sorted(t1.labels), sorted(t2.labels)
    if len(v1) != len(v2):
        return None
    e1 = {frozenset(e) for e in t1.edges()}
    for perm in permutations(v2):
        m = dict(zip(v1, perm))
        if any(t1.labels[v] != t2.labels[m[v]] for v in v1):
            continue
        if {frozenset((m[a], m[b])) for a, b in e1} == {frozenset(e) for e in t2.edges()}:
            return m
    return None


def all_shapes(max_n):
    shapes = []
    for n in range(1, max_n + 1):
        shapes.extend(_all_tree_shapes_upto(n)[n])
    return shapes


# -- fixtures -------------------------------------------------------------------

def path_tree(n, label=INF):
    return FiniteTree.from_edges({i: label for i in range(n)}, [(i, i + 1) for i in range(n - 1)])


def star_tree(k, label=INF):
    """Hub 0 with leaves 1..k."""
    return FiniteTree.from_edges({i: label for i in range(k + 1)}, [(0, i) for i in range(1, k + 1)])


class TestCenter:
    def test_middle_of_path(self):
        t = path_tree(3)
        assert t.center(0, 1, 2) == 1

    def test_endpoint_on_path(self):
        # center(x, y, z) = z whenever z lies on the x-y path
        t = path_tree(5)
        for x, y in combinations(range(5), 2):
            for z in range(5):
                if t.between(z, x, y):
                    assert t.center(x, y, z) == z
                else:
                    assert t.center(x, y, z) != z

    def test_three_leaves_of_star(self):
        t = star_tree(3)
        assert t.center(1, 2, 3) == 0
        assert t.center(1, 2, 3) == brute_center(t, 1, 2, 3)

    def test_symmetry_exhaustive_small(self):
        for t in all_shapes(6):
            vs = sorted(t.labels)
            for x, y, z in combinations(vs, 3):
                m = t.center(x, y, z)
                for p in permutations((x, y, z)):
                    assert t.center(*p) == m

    def test_unknown_vertex(self):
        t = path_tree(3)
        with pytest.raises(UnknownVertex):
            t.center(0, 1, 99)


class TestCClosure:
    def test_two_points(self):
        t = star_tree(3)
        assert t.c_closure({1, 2}) == {1, 2}

    def test_star_leaves(self):
        t = star_tree(3)
        assert t.c_closure({1, 2, 3}) == {0, 1, 2, 3}

    def test_points_on_one_path(self):
        t = path_tree(6)
        assert t.c_closure({0, 2, 5}) == {0, 2, 5}

    def test_matches_brute_force(self):
        for t in all_shapes(6):
            vs = sorted(t.labels)
            for r in range(1, min(4, len(vs)) + 1):
                for sub in combinations(vs, r):
                    assert t.c_closure(sub) == brute_c_closure(t, sub)

    def test_idempotent_and_monotone(self):
        for t in all_shapes(6):
            vs = sorted(t.labels)
            for r in range(1, min(4, len(vs)) + 1):
                for sub in combinations(vs, r):
                    cl = t.c_closure(sub)
                    assert t.c_closure(cl) == cl
                    bigger = t.c_closure(set(sub) | {vs[0]})
                    assert t.c_closure(set(sub)) <= bigger


class TestPositiveType:
    def test_tree_betweenness_is_positive(self):
        for t in all_shapes(6):
            assert verify_positive_type(BetweennessRel.from_tree(t))

    def test_restriction_to_subset_is_positive(self):
        t = star_tree(3)
        b = BetweennessRel.from_tree(t, carrier={1, 2, 3})
        assert verify_positive_type(b)

    def test_empty_carrier(self):
        b = BetweennessRel.from_triples([], [])
        assert verify_positive_type(b)

    def test_four_cycle_rejected(self):
        # shortest-path betweenness of a 4-cycle a-b-c-d: both b and d lie
        # between a and c, which no tree can realize
        pts = [0, 1, 2, 3]
        triples = []
        for z, x, y in product(pts, repeat=3):
            dist = lambda u, v: min((u - v) % 4, (v - u) % 4)
            if dist(x, z) + dist(z, y) == dist(x, y):
                triples.append((z, x, y))
        b = BetweennessRel.from_triples(pts, triples)
        report = verify_positive_type(b)
        assert not report
        assert report.witness is not None

    def test_realize_three_isolated_points_gives_star(self):
        b = BetweennessRel.from_triples([10, 11, 12], [])
        t = realize_tree(b)
        assert len(t.labels) == 4
        hub = [v for v in t.labels if t.degree(v) == 3]
        assert len(hub) == 1
        assert set(t.labels) - {hub[0]} == {10, 11, 12}

    def test_realize_chain(self):
        src = path_tree(3)
        t = realize_tree(BetweennessRel.from_tree(src))
        assert iso_labeled(src, t) is not None
        assert set(t.labels) == {0, 1, 2}

    def test_realize_c_closed_carrier_adds_nothing(self):
        t = star_tree(3)
        carrier = {0, 1, 2, 3}
        assert t.c_closure(carrier) == carrier
        out = realize_tree(BetweennessRel.from_tree(t, carrier))
        assert set(out.labels) == carrier

    def test_realize_roundtrip_exhaustive(self):
        # realize(path betweenness of t) is isomorphic to t for every shape
        for t in all_shapes(7):
            out = realize_tree(BetweennessRel.from_tree(t))
            assert iso_labeled(t, out) is not None, f"shape {sorted(t.edges())}"

    def test_realize_rejects_non_tree(self):
        pts = [0, 1, 2, 3]
        dist = lambda u, v: min((u - v) % 4, (v - u) % 4)
        triples = [
            (z, x, y)
            for z, x, y in product(pts, repeat=3)
            if dist(x, z) + dist(z, y) == dist(x, y)
        ]
        with pytest.raises(NotPositiveType):
            realize_tree(BetweennessRel.from_triples(pts, triples))


class TestIsoLabeled:
    def test_identity(self):
        t = path_tree(4)
        m = iso_labeled(t, t)
        assert m is not None

    def test_different_sizes(self):
        assert iso_labeled(path_tree(2), path_tree(3)) is None

    def test_permuted_star(self):
        t1 = star_tree(3)
        t2 = FiniteTree.from_edges({10: INF, 11: INF, 12: INF, 13: INF},
                                   [(13, 10), (13, 11), (13, 12)])
        m = iso_labeled(t1, t2)
        assert m is not None
        assert m[0] == 13

    def test_labels_respected(self):
        t1 = FiniteTree.from_edges({0: INF, 1: 3}, [(0, 1)])
        t2 = FiniteTree.from_edges({0: INF, 1: INF}, [(0, 1)])
        assert iso_labeled(t1, t2) is None

    def test_agrees_with_brute_force(self):
        shapes = all_shapes(6)
        # same-shape pairs with relabelled ids and varying labels
        for t in shapes:
            vs = sorted(t.labels)
            relabel = {v: v + 100 for v in vs}
            t2 = FiniteTree.from_edges(
                {relabel[v]: t.labels[v] for v in vs},
                [(relabel[a], relabel[b]) for a, b in t.edges()],
            )
            got = iso_labeled(t, t2)
            want = brute_iso(t, t2)
            assert (got is None) == (want is None)
            if got is not None:
                assert all(t.labels[v] == t2.labels[got[v]] for v in vs)
                e2 = {frozenset(e) for e in t2.edges()}
                assert {frozenset((got[a], got[b])) for a, b in t.edges()} == e2

    def test_mixed_label_disagreement_detected(self):
        # same shape, different label multiset
        t1 = FiniteTree.from_edges({0: 3, 1: INF, 2: INF}, [(0, 1), (1, 2)])
        t2 = FiniteTree.from_edges({0: INF, 1: 3, 2: INF}, [(0, 1), (1, 2)])
        assert (iso_labeled(t1, t2) is None) == (brute_iso(t1, t2) is None)


@st.composite
def random_tree(draw, max_n=8):
    n = draw(st.integers(min_value=1, max_value=max_n))
    labels = {}
    edges = []
    for i in range(n):
        labels[i] = draw(st.sampled_from([INF, 3, 4]))
        if i > 0:
            edges.append((draw(st.integers(min_value=0, max_value=i - 1)), i))
    return FiniteTree.from_edges(labels, edges)


class TestPropertyBased:
    @given(random_tree())
    @settings(max_examples=60, deadline=None)
    def test_center_symmetric(self, t):
        vs = sorted(t.labels)
        if len(vs) < 3:
            return
        x, y, z = vs[0], vs[len(vs) // 2], vs[-1]
        m = t.center(x, y, z)
        for p in permutations((x, y, z)):
            assert t.center(*p) == m

    @given(random_tree())
    @settings(max_examples=60, deadline=None)
    def test_c_closure_closed_under_center(self, t):
        vs = sorted(t.labels)
        cl = t.c_closure(vs[: max(1, len(vs) // 2)])
        for a, b, c in combinations(sorted(cl), 3):
            assert t.center(a, b, c) in cl

    @given(random_tree())
    @settings(max_examples=40, deadline=None)
    def test_canonical_code_invariant_under_relabel(self, t):
        vs = sorted(t.labels)
        relabel = {v: v * 7 + 13 for v in vs}
        t2 = FiniteTree.from_edges(
            {relabel[v]: t.labels[v] for v in vs},
            [(relabel[a], relabel[b]) for a, b in t.edges()],
        )
        assert canonical_code(t) == canonical_code(t2)


class TestOrbitCounting:
    def test_k1(self):
        assert count_orbit_types(1, {INF}) == 1

    def test_k2(self):
        assert count_orbit_types(2, {INF}) == 1

    def test_k3(self):
        # 3 path types (by which entry is the middle) plus the tripod
        assert count_orbit_types(3, {INF}) == 4

    def test_limit(self):
        with pytest.raises(LimitExceeded):
            count_orbit_types(7, {INF})

    def test_finite_orders_change_count(self):
        # an order-3 hub cannot carry four arms, and hub labels multiply types
        assert count_orbit_types(3, {3}) == 4
        assert count_orbit_types(3, {3, 4}) > count_orbit_types(3, {4})
