"""Separator search, the halving sweep, and separator trees."""

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from forestef.fixtures import (complete_graph, cycle_graph, grid_graph,
                               path_graph, random_connected_graph)
from forestef.graphs import Graph, bits, connected_components, make_graph
from forestef.separators import (SeparatorError, SeparatorResult, bag_sequence,
                                 build_separator_tree, find_separator_exact,
                                 find_separator_heuristic, halve_separator,
                                 normalize_bags, separator_tree_from_text,
                                 validate_bag_sequence, validate_separator)

HALF = Fraction(1, 2)
TWO_THIRDS = Fraction(2, 3)


def brute_is_valid(g, sep, alpha):
    """Independent validity check, straight from the definition."""
    full = g.full_vertex_mask()
    if sep.x | sep.part_a | sep.part_b != full:
        return False
    if sep.x & sep.part_a or sep.x & sep.part_b or sep.part_a & sep.part_b:
        return False
    for u, v in g.edges:
        in_a = ((sep.part_a >> u) & 1, (sep.part_a >> v) & 1)
        in_b = ((sep.part_b >> u) & 1, (sep.part_b >> v) & 1)
        if (in_a[0] and in_b[1]) or (in_b[0] and in_a[1]):
            return False
    return max(sep.part_a.bit_count(), sep.part_b.bit_count()) <= alpha * g.n


def brute_min_separator_size(g, alpha):
    """Exhaustive minimum over all subsets and all component packings."""
    from itertools import combinations
    for size in range(g.n + 1):
        for combo in combinations(range(g.n), size):
            xmask = sum(1 << v for v in combo)
            comps = connected_components(g, g.full_vertex_mask() & ~xmask)
            total = g.n - size
            for assign in range(1 << len(comps)):
                a = sum(comps[i] for i in range(len(comps)) if (assign >> i) & 1)
                abits = bin(a).count("1")
                if abits <= alpha * g.n and (total - abits) <= alpha * g.n:
                    return size
    return None


class TestExactSearch:
    def test_path3_middle(self):
        r = find_separator_exact(path_graph(3), HALF)
        assert (r.x, r.part_a, r.part_b) == (0b010, 0b001, 0b100)

    def test_k4_needs_two(self):
        r = find_separator_exact(complete_graph(4), HALF)
        assert r.x.bit_count() == 2
        assert brute_is_valid(complete_graph(4), r, HALF)

    def test_star_center(self):
        star = make_graph(5, [(0, i) for i in range(1, 5)])
        r = find_separator_exact(star, HALF)
        assert r.x == 0b00001

    @pytest.mark.parametrize("g", [path_graph(5), cycle_graph(6),
                                   complete_graph(5), grid_graph(3)])
    def test_minimality(self, g):
        r = find_separator_exact(g, HALF)
        assert r.x.bit_count() == brute_min_separator_size(g, HALF)
        assert brute_is_valid(g, r, HALF)


class TestHeuristic:
    @pytest.mark.parametrize("k", [2, 3, 4, 5, 6])
    def test_grid_levels(self, k):
        g = grid_graph(k)
        r = find_separator_heuristic(g, HALF)
        assert r.x.bit_count() <= k
        assert brute_is_valid(g, r, HALF)

    def test_tree_centroid(self):
        t = make_graph(7, [(0, 1), (0, 2), (1, 3), (1, 4), (2, 5), (2, 6)])
        r = find_separator_heuristic(t, HALF)
        assert r.x.bit_count() == 1
        assert brute_is_valid(t, r, HALF)

    def test_k2(self):
        r = find_separator_heuristic(make_graph(2, [(0, 1)]), HALF)
        assert r.x.bit_count() == 1
        assert r.part_a.bit_count() == 1 and r.part_b == 0

    @given(st.integers(0, 10 ** 6))
    @settings(max_examples=30, deadline=None)
    def test_always_valid_on_random_graphs(self, seed):
        import random
        g = random_connected_graph(random.Random(seed), n_min=2, n_max=8)
        r = find_separator_heuristic(g, HALF)
        assert brute_is_valid(g, r, HALF)


class TestHalving:
    def test_path8_sides_at_most_four(self):
        r = halve_separator(path_graph(8), TWO_THIRDS, find_separator_exact)
        assert max(r.part_a.bit_count(), r.part_b.bit_count()) <= 4
        assert brute_is_valid(path_graph(8), r, HALF)

    def test_output_valid_when_oracle_already_half_balanced(self):
        g = cycle_graph(6)
        r = halve_separator(g, HALF, find_separator_exact)
        assert brute_is_valid(g, r, HALF)

    def test_k1_base_case(self):
        r = halve_separator(path_graph(1), TWO_THIRDS, find_separator_exact)
        assert r.x == 1 and r.part_a == 0 and r.part_b == 0

    def test_broken_oracle_detected(self):
        def bad(sub, alpha):
            # claims the whole vertex set is one side
            return SeparatorResult(0, sub.full_vertex_mask(), 0)

        with pytest.raises(SeparatorError):
            halve_separator(complete_graph(4), TWO_THIRDS, bad)

    def test_size_bound_with_observed_oracle_max(self):
        # returned separator <= ceil(s_max / (1 - alpha)) with alpha = 2/3
        for g in (path_graph(8), grid_graph(3), complete_graph(5)):
            sizes = []

            def rec(sub, alpha):
                r = find_separator_exact(sub, alpha)
                sizes.append(r.x.bit_count())
                return r

            out = halve_separator(g, TWO_THIRDS, rec)
            assert out.x.bit_count() <= 3 * max(sizes)


class TestBagSequence:
    @pytest.mark.parametrize("g", [path_graph(8), cycle_graph(7),
                                   grid_graph(3), complete_graph(5)])
    def test_normalized_properties(self, g):
        bags = normalize_bags(bag_sequence(g, TWO_THIRDS, find_separator_exact))
        validate_bag_sequence(g, bags)

    def test_normalize_single_step_differences(self):
        bags = [0b00111, 0b11100]
        out = normalize_bags(bags)
        validate_bag_sequence(Graph(5, ()), out, normalized=True)
        assert out[0] == 0b00111 and out[-1] == 0b11100


class TestSeparatorTree:
    def test_path8_structure(self):
        tree = build_separator_tree(path_graph(8), Fraction(2), HALF, 2,
                                    find_separator_exact)
        nodes = tree.nodes()
        assert all(n.sep.bit_count() <= 1 for n in nodes)
        assert max(tree_depths(tree)) + 1 == 3  # three levels

    def test_leaf_only(self):
        tree = build_separator_tree(path_graph(2), Fraction(2), HALF, 4)
        assert tree.root.is_leaf and tree.root.sep == 0

    def test_grid4_root_line(self):
        tree = build_separator_tree(grid_graph(4), Fraction(4), HALF, None,
                                    find_separator_heuristic)
        assert tree.root.sep.bit_count() <= 4
        tree.validate(grid_graph(4))

    def test_determinism(self):
        a = build_separator_tree(grid_graph(3), Fraction(4), HALF, 4,
                                 find_separator_exact)
        b = build_separator_tree(grid_graph(3), Fraction(4), HALF, 4,
                                 find_separator_exact)
        assert a.to_text() == b.to_text()

    def test_serialization_roundtrip(self):
        g = grid_graph(3)
        tree = build_separator_tree(g, Fraction(4), HALF, 4, find_separator_exact)
        back = separator_tree_from_text(tree.to_text(), g, Fraction(4), HALF, 4)
        assert back.to_text() == tree.to_text()

    def test_size_contract_enforced(self):
        # c so small that no valid separator of K5 can satisfy it
        with pytest.raises(SeparatorError):
            build_separator_tree(complete_graph(5), Fraction(1, 10), HALF, 2,
                                 find_separator_exact)

    def test_children_halve_and_depth_bounded(self):
        import math
        g = grid_graph(4)
        tree = build_separator_tree(g, Fraction(4), HALF, 2,
                                    find_separator_heuristic)
        for node in tree.nodes():
            if not node.is_leaf:
                half = -(-node.host.bit_count() // 2)
                assert node.left.host.bit_count() <= half
                assert node.right.host.bit_count() <= half
        assert max(tree_depths(tree)) <= math.ceil(math.log2(g.n / 2)) + 1


def tree_depths(tree):
    out = []

    def walk(node, d):
        out.append(d)
        if not node.is_leaf:
            walk(node.left, d + 1)
            walk(node.right, d + 1)

    walk(tree.root, 0)
    return out
