import pytest

from src.conflict_graph import ConflictGraph, build_geometric, is_independent
from src.exceptions import InvalidParameters, NotIndependent
from src.generator import generate
from src.local_search import LocalSearchConfig, local_search, verify_locally_optimal
from src.models import Family


def test_edgeless_graph_takes_everything():
    result = local_search(ConflictGraph.from_edges(4, []), LocalSearchConfig(b=1))
    assert result.chosen == (0, 1, 2, 3)
    assert result.total_weight == 4


def test_star_swaps_center_for_leaves(star_graph):
    result = local_search(star_graph, LocalSearchConfig(b=1))
    assert result.chosen == (1, 2, 3)


def test_five_cycle(five_cycle):
    result = local_search(five_cycle, LocalSearchConfig(b=2))
    assert len(result.chosen) == 2
    assert is_independent(five_cycle, result.chosen)
    assert verify_locally_optimal(five_cycle, result.chosen, 2) is None


def test_trace_records_exchanges(star_graph):
    trace = local_search(star_graph, LocalSearchConfig(b=1)).trace
    assert trace["algorithm"] == "local-search"
    assert trace["truncated"] is False
    assert trace["exchanges"] == len(trace["history"])
    assert trace["history"][-1]["size"] == 3


def test_exchange_cap_truncates(star_graph):
    result = local_search(star_graph, LocalSearchConfig(b=1, max_exchanges=1))
    assert result.trace["truncated"] is True
    assert result.trace["exchanges"] == 1


class TestVerify:
    def test_center_of_star_is_improvable(self, star_graph):
        assert verify_locally_optimal(star_graph, [0], 1) == ((1, 2), (0,))

    def test_maximum_set_of_five_cycle(self, five_cycle):
        assert verify_locally_optimal(five_cycle, [0, 2], 3) is None

    def test_rejects_dependent_set(self, path_graph):
        with pytest.raises(NotIndependent):
            verify_locally_optimal(path_graph, [0, 1], 1)


class TestConfig:
    def test_b_must_be_positive(self):
        with pytest.raises(InvalidParameters):
            LocalSearchConfig(b=0)

    def test_radius_from_accuracy(self):
        assert LocalSearchConfig.for_family(Family.pseudo_disks(), eps=0.5).b == 4

    def test_radius_from_union_constant(self):
        family = Family.pseudo_disks()
        expected = -(-int(family.union_constant) // 2)
        assert LocalSearchConfig.for_family(family).b == expected


def test_randomized_order_is_reproducible():
    graph = build_geometric(generate("disks", 25, 3.0, seed=11, unit=True))
    first = local_search(graph, LocalSearchConfig(b=1, deterministic=False, seed=5))
    second = local_search(graph, LocalSearchConfig(b=1, deterministic=False, seed=5))
    assert first.chosen == second.chosen
    assert is_independent(graph, first.chosen)


def test_larger_radius_never_hurts():
    for seed in range(8):
        graph = build_geometric(generate("disks", 20, 3.0, seed=seed, unit=True))
        sizes = [len(local_search(graph, LocalSearchConfig(b=b)).chosen) for b in (1, 2, 3)]
        assert sizes == sorted(sizes)
