import math

import networkx as nx
import pytest

from src.conflict_graph import ConflictGraph, build_geometric, is_independent
from src.exceptions import CycleDetected, IncompatibleAlgorithm
from src.generator import generate
from src.models import AxisRect, Family, make_instance
from src.rectangles import (
    ChainColoring, chain_color, choose_t, crosses, crossing_order, depth_bound, derandomized_rectangle_mwis,
    heaviest_class, max_depth, rectangle_mwis, split_edges,
)
from src.rounding import RoundingConfig


def rect_instance(shapes, weights=None):
    return make_instance(shapes, weights, family=Family.rectangles())


class TestSplit:
    def test_disjoint_pair_has_no_edge(self):
        split = split_edges(rect_instance([AxisRect(0.0, 0.0, 1.0, 1.0), AxisRect(2.0, 2.5, 3.0, 3.5)]))
        assert split.all_edges == ()

    def test_corner_overlap_is_g1(self):
        split = split_edges(rect_instance([AxisRect(0.0, 0.0, 2.0, 2.0), AxisRect(1.0, 1.5, 3.0, 3.5)]))
        assert split.g1_edges == ((0, 1),)
        assert split.g2_edges == ()

    def test_nesting_is_g1(self):
        split = split_edges(rect_instance([AxisRect(0.0, 0.0, 4.0, 4.0), AxisRect(1.0, 1.5, 2.0, 2.5)]))
        assert split.g1_edges == ((0, 1),)

    def test_plus_sign_is_g2(self, plus_pair):
        split = split_edges(rect_instance(plus_pair))
        assert split.g2_edges == ((0, 1),)
        assert split.g1_edges == ()

    def test_g2_matches_interval_predicate(self):
        instance = generate("rects", 40, 3.0, seed=5)
        split = split_edges(instance)
        rects = instance.shapes
        for i, j in split.g2_edges:
            assert crosses(rects[i], rects[j])
        for i, j in split.g1_edges:
            assert not crosses(rects[i], rects[j])

    def test_needs_rectangles_family(self, crossing_disks):
        with pytest.raises(IncompatibleAlgorithm):
            split_edges(crossing_disks)


class TestChainColoring:
    def test_crossing_order_direction(self, plus_pair):
        tall, wide = plus_pair
        assert crossing_order(tall, wide)
        assert not crossing_order(wide, tall)

    def test_no_g2_edges_single_color(self):
        instance = rect_instance([AxisRect(0.0, 0.0, 1.0, 1.0), AxisRect(2.0, 2.5, 3.0, 3.5)])
        coloring = chain_color(instance, [0, 1], [])
        assert coloring.color == {0: 1, 1: 1}
        assert coloring.num_colors == 1

    def test_two_crossing(self, plus_pair):
        coloring = chain_color(rect_instance(plus_pair), [0, 1], [(0, 1)])
        assert coloring.color == {0: 1, 1: 2}

    def test_telescoping_chain(self, telescoping_rects):
        instance = rect_instance(telescoping_rects)
        coloring = chain_color(instance, [0, 1, 2], split_edges(instance).g2_edges)
        assert coloring.color == {0: 1, 1: 2, 2: 3}
        assert max_depth(instance, [0, 1, 2]) == 3

    def test_edges_outside_ids_are_ignored(self, telescoping_rects):
        instance = rect_instance(telescoping_rects)
        coloring = chain_color(instance, [0, 2], split_edges(instance).g2_edges)
        assert coloring.color == {0: 1, 2: 2}

    def test_incomparable_pair(self):
        instance = rect_instance([AxisRect(0.0, 0.0, 1.0, 1.0), AxisRect(2.0, 2.5, 3.0, 3.5)])
        with pytest.raises(CycleDetected):
            chain_color(instance, [0, 1], [(0, 1)])

    def test_colors_equal_largest_crossing_clique(self):
        for seed in range(4):
            instance = generate("rects", 30, 4.0, seed=seed)
            split = split_edges(instance)
            coloring = chain_color(instance, range(instance.n), split.g2_edges)
            g2 = ConflictGraph.from_edges(instance.n, split.g2_edges).to_networkx()
            largest = max(len(c) for c in nx.find_cliques(g2))
            assert coloring.num_colors == largest
            for i, j in split.g2_edges:
                assert coloring.color[i] != coloring.color[j]

    def test_heaviest_class_tie_goes_to_smaller_color(self):
        coloring = ChainColoring(color={0: 1, 1: 2}, num_colors=2)
        assert heaviest_class(coloring, [1.0, 1.0]) == (1, (0,), {1: 1.0, 2: 1.0})
        assert heaviest_class(coloring, [1.0, 3.0])[:2] == (2, (1,))

    def test_empty_coloring(self):
        assert heaviest_class(ChainColoring(color={}, num_colors=0), []) == (0, (), {})


class TestDepth:
    def test_disjoint(self):
        instance = rect_instance([AxisRect(0.0, 0.0, 1.0, 1.0), AxisRect(2.0, 2.5, 3.0, 3.5)])
        assert max_depth(instance, [0, 1]) == 1
        assert max_depth(instance, []) == 0

    def test_matches_brute_force_on_arrangement_points(self):
        instance = generate("rects", 25, 4.0, seed=8)
        rects = instance.shapes
        xs = sorted({r.x0 for r in rects})
        ys = sorted({r.y0 for r in rects})
        brute = max(
            sum(1 for r in rects if r.x0 <= x <= r.x1 and r.y0 <= y <= r.y1)
            for x in xs for y in ys
        )
        assert max_depth(instance, range(instance.n)) == brute

    def test_depth_bound(self):
        assert depth_bound(2) == 2.0
        assert depth_bound(100) == pytest.approx(2 * math.log(100) / math.log(math.log(100)) + 3)

    @pytest.mark.parametrize("n, vertices, expected", [(1, 4, 4), (2, 10, 5)])
    def test_choose_t(self, n, vertices, expected):
        t = choose_t(n, vertices)
        assert t == expected
        assert (math.e / t) ** t * vertices <= 1.0 / n
        assert (math.e / (t - 1)) ** (t - 1) * vertices > 1.0 / n


class TestPipeline:
    def test_disjoint_rectangles_all_kept(self):
        shapes = [AxisRect(3.0 * k, 0.0, 3.0 * k + 1.0, 1.0) for k in range(3)]
        result = rectangle_mwis(rect_instance(shapes), RoundingConfig(tau=1.0))
        assert result.chosen == (0, 1, 2)
        assert result.trace["delta"] == 1

    def test_heavier_of_crossing_pair(self, plus_pair):
        result = rectangle_mwis(rect_instance(plus_pair, [5.0, 1.0]), RoundingConfig(tau=1.0))
        assert result.chosen == (0,)
        assert result.total_weight == 5.0
        assert result.trace["lp_value"] == pytest.approx(5.0)

    def test_disks_are_rejected(self, crossing_disks):
        with pytest.raises(IncompatibleAlgorithm):
            rectangle_mwis(crossing_disks, RoundingConfig(tau=1.0))

    def test_output_is_independent_and_depth_matches(self):
        for seed in range(4):
            instance = generate("rects", 40, 3.0, seed=30 + seed)
            graph = build_geometric(instance)
            result = rectangle_mwis(instance, RoundingConfig(tau=2.0, seed=seed))
            assert is_independent(graph, result.chosen)
            assert max_depth(instance, result.trace["sample"]) == result.trace["delta"]

    def test_sample_depth_stays_small(self):
        instance = generate("rects", 60, 3.0, seed=2)
        result = rectangle_mwis(instance, RoundingConfig(seed=1))
        assert result.trace["tau"] == 104.0
        assert max_depth(instance, result.trace["sample"]) <= depth_bound(instance.n)

    def test_weight_fraction_of_lp(self):
        n = 40
        factor = math.log(math.log(n)) / math.log(n)
        for seed in range(5):
            instance = generate("rects", n, 3.0, seed=50 + seed)
            result = rectangle_mwis(instance, RoundingConfig(tau=3.0, seed=seed))
            assert result.total_weight >= 0.05 * factor * result.trace["lp_value"]


class TestDerandomized:
    def test_single_rectangle(self):
        result = derandomized_rectangle_mwis(rect_instance([AxisRect(0.0, 0.0, 1.0, 1.0)]), RoundingConfig())
        assert result.chosen == (0,)
        assert result.trace["t"] == 4
        assert result.trace["z"] <= result.total_weight

    def test_two_disjoint(self):
        instance = rect_instance([AxisRect(0.0, 0.0, 1.0, 1.0), AxisRect(2.0, 2.5, 3.0, 3.5)])
        result = derandomized_rectangle_mwis(instance, RoundingConfig())
        assert result.chosen == (0, 1)

    def test_corner_pair_keeps_one(self):
        instance = rect_instance([AxisRect(0.0, 0.0, 2.0, 2.0), AxisRect(1.0, 1.5, 3.0, 3.5)])
        result = rectangle_mwis(instance, RoundingConfig(tau=1.0, derandomize=True))
        assert len(result.chosen) == 1
        assert result.trace["rounding"]["algorithm"] == "lp-round-derand"

    def test_z_bounds_weight(self):
        for seed in range(3):
            instance = generate("rects", 30, 3.0, seed=70 + seed)
            result = derandomized_rectangle_mwis(instance, RoundingConfig(tau=3.0))
            assert is_independent(build_geometric(instance), result.chosen)
            assert result.trace["z"] <= result.total_weight + 1e-9


def test_g1_pair_energy_is_linear():
    from src.lp import build_independent_set_lp, g1_pair_energy, solve_packing_lp

    for seed in range(4):
        instance = generate("rects", 40, 3.0, seed=90 + seed)
        x = solve_packing_lp(build_independent_set_lp(instance))
        assert g1_pair_energy(split_edges(instance).g1_edges, x.x) <= 8.0 * x.energy
