"""Exact LP, the greedy oracle, and two-sided verification."""

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from forestef.exactlp import (INFEASIBLE, OPTIMAL, UNBOUNDED, max_weight_forest,
                              random_objective, simplex_max,
                              structured_objectives, verify_ef)
from forestef.fixtures import (bowtie_graph, complete_graph, cycle_graph,
                               grid_graph, path_graph, random_connected_graph)
from forestef.formulations import (LinearSystem, edmonds_system, martin_q,
                                   parse_linear_system, product_compose,
                                   recursive_ef, stp_from_fp)
from forestef.graphs import blocks
from forestef.separators import build_separator_tree, find_separator_exact

F = Fraction
HALF = F(1, 2)


def ones(m):
    return {e: F(1) for e in range(m)}


class TestSimplex:
    def test_k3_all_ones(self):
        res = simplex_max(edmonds_system(complete_graph(3)), ones(3))
        assert res.status == OPTIMAL and res.value == 2

    def test_zero_objective(self):
        res = simplex_max(edmonds_system(complete_graph(3)), {})
        assert res.status == OPTIMAL and res.value == 0

    def test_mixed_signs(self):
        res = simplex_max(edmonds_system(complete_graph(3)),
                          {0: F(1), 1: F(1), 2: F(-1)})
        assert res.status == OPTIMAL and res.value == 2

    def test_unbounded(self):
        sys = LinearSystem(1, ["x"])
        sys.add_ineq({0: F(-1)}, F(0))
        assert simplex_max(sys, {0: F(1)}).status == UNBOUNDED

    def test_infeasible(self):
        sys = LinearSystem(1, ["x"])
        sys.add_ineq({0: F(1)}, F(-1))
        sys.add_ineq({0: F(-1)}, F(0))
        assert simplex_max(sys, {0: F(1)}).status == INFEASIBLE

    def test_infeasible_by_equalities(self):
        sys = LinearSystem(1, ["x"])
        sys.add_eq({0: F(1)}, F(1))
        sys.add_eq({0: F(2)}, F(3))
        assert simplex_max(sys, {0: F(1)}).status == INFEASIBLE

    def test_point_satisfies_all_rows(self):
        sys = edmonds_system(grid_graph(2))
        res = simplex_max(sys, ones(4))
        assert sys.point_violation(res.point) is None

    def test_row_permutation_invariance(self):
        g = complete_graph(4)
        base = edmonds_system(g)
        rng = random.Random(3)
        obj = random_objective(rng, g.m)
        want = simplex_max(base, obj).value
        for seed in range(5):
            perm = LinearSystem(base.num_orig, list(base.orig_tags),
                                list(base.aux_tags), list(base.ineqs),
                                list(base.eqs))
            random.Random(seed).shuffle(perm.ineqs)
            assert simplex_max(perm, obj).value == want

    def test_objective_restricted_to_originals(self):
        q = martin_q(complete_graph(3), 0)
        with pytest.raises(ValueError):
            simplex_max(q, {q.num_orig + 1: F(1)})


class TestGreedy:
    def test_k3_decreasing(self):
        g = complete_graph(3)
        assert max_weight_forest(g, {0: F(3), 1: F(2), 2: F(1)}) == 5

    def test_all_negative_empty_forest(self):
        g = complete_graph(3)
        assert max_weight_forest(g, {0: F(-1), 1: F(-2), 2: F(-3)}) == 0

    def test_path_takes_everything(self):
        assert max_weight_forest(path_graph(3), {0: F(1), 1: F(1)}) == 2

    @given(st.integers(0, 10 ** 6))
    @settings(max_examples=20, deadline=None)
    def test_matches_brute_force_maximum(self, seed):
        from forestef.graphs import bits, enumerate_forests
        rng = random.Random(seed)
        g = random_connected_graph(rng, n_min=3, n_max=5)
        w = random_objective(rng, g.m)
        best = max(sum((w.get(e, F(0)) for e in bits(f)), F(0))
                   for f in enumerate_forests(g))
        assert max_weight_forest(g, w) == best


OBJECTIVE_BATTERY_GRAPHS = [
    path_graph(4), cycle_graph(5), complete_graph(4), bowtie_graph(),
]


class TestLPAgainstGreedy:
    @pytest.mark.parametrize("g", OBJECTIVE_BATTERY_GRAPHS)
    def test_edmonds_route(self, g):
        sys = edmonds_system(g)
        rng = random.Random(11)
        for _ in range(40):
            obj = random_objective(rng, g.m)
            assert simplex_max(sys, obj).value == max_weight_forest(g, obj)

    @pytest.mark.parametrize("g", OBJECTIVE_BATTERY_GRAPHS)
    def test_block_product_route(self, g):
        pieces = blocks(g)
        sys = product_compose([edmonds_system(p.graph) for p in pieces],
                              [p.edge_map for p in pieces], g)
        rng = random.Random(12)
        for _ in range(25):
            obj = random_objective(rng, g.m)
            assert simplex_max(sys, obj).value == max_weight_forest(g, obj)

    @pytest.mark.parametrize("g", OBJECTIVE_BATTERY_GRAPHS)
    def test_recursive_route(self, g):
        tree = build_separator_tree(g, F(4), HALF, 2, find_separator_exact)
        sys, _ = recursive_ef(g, tree)
        rng = random.Random(13)
        for _ in range(25):
            obj = random_objective(rng, g.m)
            assert simplex_max(sys, obj).value == max_weight_forest(g, obj)

    def test_recursive_equals_edmonds_value(self):
        g = bowtie_graph()
        tree = build_separator_tree(g, F(4), HALF, 2, find_separator_exact)
        rec, _ = recursive_ef(g, tree)
        edm = edmonds_system(g)
        rng = random.Random(14)
        for _ in range(20):
            obj = random_objective(rng, g.m)
            assert simplex_max(rec, obj).value == simplex_max(edm, obj).value


class TestStpLP:
    def test_k3_max_unchanged(self):
        g = complete_graph(3)
        before = simplex_max(edmonds_system(g), ones(3)).value
        after = simplex_max(stp_from_fp(edmonds_system(g), g), ones(3)).value
        assert before == after == 2

    def test_path3_unique_point(self):
        g = path_graph(3)
        sys = stp_from_fp(edmonds_system(g), g)
        for e in range(2):
            hi = simplex_max(sys, {e: F(1)})
            lo = simplex_max(sys, {e: F(-1)})
            assert hi.value == 1 and lo.value == -1  # x_e pinned to 1


class TestVerifyEF:
    def test_k3_passes(self):
        rep = verify_ef(complete_graph(3), edmonds_system(complete_graph(3)),
                        trials=50, seed=9)
        assert rep.all_pass

    def test_missing_full_row_caught_with_witness(self):
        g = complete_graph(3)
        rep = verify_ef(g, edmonds_system(g, include_full=False),
                        trials=50, seed=9)
        assert not rep.all_pass
        fails = [l for l in rep.lines if l.startswith("FAIL")]
        assert any("obj=(1,1,1)" in l and "lp=3" in l and "greedy=2" in l
                   for l in fails)

    def test_k1_vacuous(self):
        g = path_graph(1)
        rep = verify_ef(g, edmonds_system(g), trials=1, seed=0)
        assert rep.all_pass

    def test_structured_battery_shape(self):
        objs = structured_objectives(3)
        assert {0: F(1), 1: F(1), 2: F(1)} in objs
        assert {} in objs
        assert len(objs) == 27  # all {-1,0,1}^3 vectors (ones/zeros deduped)

    def test_file_roundtrip_uses_feasibility_lp(self):
        g = path_graph(3)
        sys = parse_linear_system(edmonds_system(g).to_text())
        assert not sys.witness_complete
        rep = verify_ef(g, sys, trials=10, seed=1)
        assert rep.all_pass

    def test_report_format(self):
        rep = verify_ef(complete_graph(3), edmonds_system(complete_graph(3)),
                        trials=2, seed=3)
        for line in rep.lines:
            assert line.split()[0] in ("PASS", "FAIL", "INFO")
