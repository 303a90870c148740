"""Classical and separator-tree protocols: exact expectations and bits."""

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from forestef.fixtures import (complete_graph, cycle_graph, grid_graph,
                               path_graph, random_connected_graph)
from forestef.graphs import (GraphError, connected_vertex_subsets,
                             enumerate_forests, slack_value)
from forestef.protocols import (KAPPA, classical_bits_bound,
                                classical_protocol, max_host_density,
                                protocol_sweep, separator_protocol)
from forestef.separators import build_separator_tree, find_separator_exact

F = Fraction
HALF = F(1, 2)


class TestClassical:
    def test_path3_split_pair(self):
        run = classical_protocol(path_graph(3), 0b101, 0b11)
        assert run.expectation == 1
        payouts = sorted(out for _, _, out in run.outcomes)
        assert payouts == [0, 0, 3]  # one arc pays |V(G+)| - 1 = 3

    def test_path3_adjacent_pair(self):
        run = classical_protocol(path_graph(3), 0b011, 0b11)
        assert run.expectation == 0

    def test_singleton_always_zero(self):
        for g in (path_graph(3), complete_graph(4)):
            for v in range(g.n):
                for f in enumerate_forests(g):
                    assert classical_protocol(g, 1 << v, f).expectation == 0

    def test_probabilities_sum_to_one(self):
        run = classical_protocol(complete_graph(4), 0b0110, 0b000011)
        assert sum(p for p, _, _ in run.outcomes) == 1

    def test_full_set_allowed_and_zero(self):
        # needed by the planar protocol's dual branch
        g = cycle_graph(4)
        for t in (0b0111, 0b1011):
            run = classical_protocol(g, g.full_vertex_mask(), t)
            assert run.expectation == 0

    def test_invalid_inputs(self):
        g = path_graph(3)
        with pytest.raises(GraphError):
            classical_protocol(g, 0, 0)
        with pytest.raises(GraphError):
            classical_protocol(g, 0b001, 0b11, alice_vertex=2)

    def test_bits_accounting(self):
        g = complete_graph(5)
        run = classical_protocol(g, 0b00011, 0)
        assert run.max_bits == classical_bits_bound(g)

    @given(st.integers(0, 10 ** 6))
    @settings(max_examples=25, deadline=None)
    def test_expectation_equals_slack_randomized(self, seed):
        rng = random.Random(seed)
        g = random_connected_graph(rng, n_min=2, n_max=6)
        forests = enumerate_forests(g)
        u = rng.randrange(1, g.full_vertex_mask())
        f = forests[rng.randrange(len(forests))]
        assert classical_protocol(g, u, f).expectation == slack_value(g, u, f)


class TestSeparatorProtocol:
    def path8_tree(self):
        return build_separator_tree(path_graph(8), F(2), HALF, 2,
                                    find_separator_exact)

    def test_deep_leaf_descends_two_levels(self):
        g = path_graph(8)
        tree = self.path8_tree()
        run, budget = separator_protocol(g, tree, 0b11000000, g.full_edge_mask())
        assert run.expectation == slack_value(g, 0b11000000, g.full_edge_mask()) == 0
        assert budget.routing_bits == 2 + 1  # two descents plus the stop signal

    def test_root_hit_degenerates_to_classical(self):
        g = path_graph(8)
        tree = self.path8_tree()
        u = tree.root.sep | (tree.root.sep << 1)  # contains the root separator
        run, budget = separator_protocol(g, tree, u, 0)
        assert budget.routing_bits == 1
        classical = classical_protocol(g, u, 0,
                                       alice_vertex=(u & tree.root.sep).bit_length() - 1)
        assert run.expectation == classical.expectation

    def test_singleton_in_separator(self):
        g = path_graph(8)
        tree = self.path8_tree()
        v = tree.root.sep
        run, _ = separator_protocol(g, tree, v, 0b1010)
        assert run.expectation == 0

    def test_pick_invariance(self):
        g = grid_graph(3)
        tree = build_separator_tree(g, F(4), HALF, 4, find_separator_exact)
        for u in connected_vertex_subsets(g, include_full=False):
            for f in (0, 0b110011, g.full_edge_mask() & 0b0101010101):
                lo, _ = separator_protocol(g, tree, u, f, pick="min")
                hi, _ = separator_protocol(g, tree, u, f, pick="max")
                assert lo.expectation == hi.expectation

    def test_disconnected_u_rejected(self):
        g = path_graph(4)
        tree = build_separator_tree(g, F(2), HALF, 2, find_separator_exact)
        with pytest.raises(GraphError):
            separator_protocol(g, tree, 0b1001, 0)

    def test_tree_graph_mismatch(self):
        tree = build_separator_tree(path_graph(4), F(2), HALF, 2,
                                    find_separator_exact)
        with pytest.raises(GraphError):
            separator_protocol(path_graph(5), tree, 0b11, 0)

    def test_bit_budget_parts_sum(self):
        g = path_graph(8)
        tree = self.path8_tree()
        run, budget = separator_protocol(g, tree, 0b11000000, 0)
        assert budget.total == run.max_bits
        assert budget.total <= budget.bound_value


class TestSweeps:
    def test_k3_classical(self):
        rep = protocol_sweep(complete_graph(3))
        assert rep.all_pass
        assert sum(1 for l in rep.lines if l.startswith("PASS classical ")) == 6 * 7

    def test_path4_separator(self):
        g = path_graph(4)
        tree = build_separator_tree(g, F(2), HALF, 2, find_separator_exact)
        rep = protocol_sweep(g, tree)
        assert rep.all_pass

    def test_k1_vacuous(self):
        rep = protocol_sweep(path_graph(1))
        assert rep.all_pass
        assert not any(l.startswith("PASS classical ") for l in rep.lines)

    def test_report_line_format(self):
        rep = protocol_sweep(complete_graph(3))
        line = next(l for l in rep.lines if l.startswith("PASS classical "))
        parts = line.split()
        assert parts[4].startswith("exp=") and parts[5].startswith("slack=") \
            and parts[6].startswith("bits=")

    def test_density_parameter(self):
        g = cycle_graph(6)
        tree = build_separator_tree(g, F(4), HALF, 4, find_separator_exact)
        assert max_host_density(g, tree) <= F(1)
        rep = protocol_sweep(g, tree, d=F(2))
        assert rep.all_pass
