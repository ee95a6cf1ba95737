import json

import numpy as np
import pytest

from src.conflict_graph import ConflictGraph, build_geometric, is_independent
from src.exceptions import InvalidParameters, NoUnionBound
from src.generator import generate
from src.lp import build_independent_set_lp, solve_packing_lp
from src.models import Family
from src.oracle import exhaustive_rounding_expectation
from src.rounding import (
    ContentionEstimator, RoundingConfig, auto_tau, coin_probabilities, derandomized_round, export_trace,
    randomized_round, resistance, resistance_permutation, simulate_rounding, survival_rates,
)


@pytest.fixture
def single_edge():
    return ConflictGraph.from_edges(2, [(0, 1)])


@pytest.fixture
def rounded_instances():
    """(graph, weights, x) triples for LP-rounded pseudo-disk instances."""
    triples = []
    for seed in range(4):
        instance = generate("disks", 30, 3.0, seed=20 + seed)
        x = solve_packing_lp(build_independent_set_lp(instance))
        triples.append((build_geometric(instance), instance.weights, x))
    return triples


class TestResistance:
    def test_path(self, path_graph):
        x = [0.3, 0.5, 0.2]
        assert resistance(0, {0, 1, 2}, x, path_graph) == pytest.approx(0.5)
        assert resistance(1, {1, 2}, x, path_graph) == pytest.approx(0.2)

    def test_isolated_object(self):
        assert resistance(0, {0}, [0.7], ConflictGraph.from_edges(1, [])) == 0.0

    def test_edgeless_permutation_is_id_order(self):
        perm = resistance_permutation(ConflictGraph.from_edges(3, []), [0.5, 0.5, 0.5])
        assert perm.order == (0, 1, 2)
        assert perm.scan_order == (2, 1, 0)

    def test_star_extracts_a_leaf_first(self, star_graph):
        perm = resistance_permutation(star_graph, [1.0, 1.0, 1.0, 1.0])
        assert perm.order[0] == 1
        assert perm.etas[0] == 1.0

    def test_path_extracts_an_end_first(self, path_graph):
        assert resistance_permutation(path_graph, [1.0, 1.0, 1.0]).order[0] == 0

    def test_extracted_resistance_is_bounded(self, rounded_instances):
        # every object has a neighbor set of bounded LP mass at extraction time
        for graph, _, x in rounded_instances:
            perm = resistance_permutation(graph, x)
            assert sorted(perm.order) == list(range(graph.n))
            assert max(perm.etas) <= 2 * 6.0 + 1e-9


class TestTau:
    def test_family_constants(self):
        assert auto_tau(Family.pseudo_disks()) == 78.0
        assert auto_tau(Family.admissible(4)) == 156.0
        assert auto_tau(Family.rectangles()) == 104.0

    def test_generic_family_has_no_bound(self):
        with pytest.raises(NoUnionBound):
            auto_tau(Family.generic())

    def test_explicit_tau_needs_no_family(self, single_edge):
        with pytest.raises(NoUnionBound):
            randomized_round(single_edge, [1.0, 1.0], RoundingConfig())
        assert randomized_round(single_edge, [1.0, 1.0], RoundingConfig(tau=2.0)).trace["tau"] == 2.0

    @pytest.mark.parametrize("kwargs", [{"tau": 0.0}, {"tau": -1.0}, {"c_tau": 0.0}])
    def test_invalid_config(self, kwargs):
        with pytest.raises(InvalidParameters):
            RoundingConfig(**kwargs)

    def test_clamped_probabilities(self):
        probs, clamped = coin_probabilities([0.5, 3.0], 2.0)
        assert probs.tolist() == [0.25, 1.0]
        assert clamped == [1]


class TestRandomizedRound:
    def test_edgeless_full_mass_takes_all(self):
        graph = ConflictGraph.from_edges(3, [])
        result = randomized_round(graph, [1.0, 1.0, 1.0], RoundingConfig(tau=1.0))
        assert result.chosen == (0, 1, 2)

    def test_zero_mass_takes_nothing(self):
        graph = ConflictGraph.from_edges(3, [])
        result = randomized_round(graph, [0.0, 0.0, 0.0], RoundingConfig(tau=1.0))
        assert result.chosen == ()

    def test_output_is_independent_and_reproducible(self, rounded_instances):
        for graph, weights, x in rounded_instances:
            cfg = RoundingConfig(tau=3.0, seed=4)
            first = randomized_round(graph, x, cfg, weights)
            assert is_independent(graph, first.chosen)
            assert randomized_round(graph, x, cfg, weights) == first

    def test_trace_decisions(self, single_edge):
        trace = randomized_round(single_edge, [1.0, 1.0], RoundingConfig(tau=1.0)).trace
        assert trace["algorithm"] == "lp-round"
        assert [d["id"] for d in trace["decisions"]] == [1, 0]
        assert [d["in_I"] for d in trace["decisions"]] == [True, False]
        assert all(d["in_C"] for d in trace["decisions"])

    def test_export_trace_is_json(self, single_edge):
        text = export_trace(randomized_round(single_edge, [1.0, 1.0], RoundingConfig(tau=2.0)))
        data = json.loads(text)
        assert data["algorithm"] == "lp-round"
        assert list(data) == sorted(data)


class TestDerandomizedRound:
    def test_single_edge(self, single_edge):
        result = derandomized_round(single_edge, [1.0, 1.0], RoundingConfig(tau=2.0))
        assert len(result.chosen) == 1
        assert result.total_weight == 1.0

    def test_zero_mass_objects_stay_out(self):
        graph = ConflictGraph.from_edges(3, [])
        result = derandomized_round(graph, [0.5, 0.0, 0.5], RoundingConfig(tau=1.0))
        assert result.chosen == (0, 2)

    def test_weighted_star_keeps_center(self, star_graph):
        weights = [10.0, 1.0, 1.0, 1.0]
        result = derandomized_round(star_graph, [1.0, 0.0, 0.0, 0.0], RoundingConfig(tau=2.0), weights)
        assert result.chosen == (0,)

    def test_estimator_never_decreases(self, rounded_instances):
        for graph, weights, x in rounded_instances:
            result = derandomized_round(graph, x, RoundingConfig(tau=3.0), weights)
            phi = result.trace["phi"]
            assert all(after >= before - 1e-9 for before, after in zip(phi, phi[1:]))
            assert phi[-1] == pytest.approx(result.total_weight)
            assert is_independent(graph, result.chosen)

    def test_weight_meets_guarantee(self, rounded_instances):
        family = Family.pseudo_disks()
        for graph, weights, x in rounded_instances:
            result = derandomized_round(graph, x, RoundingConfig(), weights, family=family)
            tau = result.trace["tau"]
            bound = float(np.dot(weights, x.x)) / (2.0 * tau)
            assert result.total_weight >= bound - 1e-9

    def test_estimator_starts_at_expected_value_lower_bound(self, single_edge):
        probs = np.array([0.5, 0.5])
        estimator = ContentionEstimator(single_edge, probs, [1.0, 1.0], scan_order=(1, 0))
        assert estimator.value == pytest.approx(0.75)


class TestSimulation:
    def test_first_trial_matches_single_run(self, rounded_instances):
        for graph, weights, x in rounded_instances:
            sim = simulate_rounding(graph, x, tau=3.0, trials=5, seed=9)
            single = randomized_round(graph, x, RoundingConfig(tau=3.0, seed=9), weights)
            assert tuple(np.flatnonzero(sim.selected[0]).tolist()) == single.chosen

    def test_single_edge_expectation(self, single_edge):
        x = [1.0, 1.0]
        assert exhaustive_rounding_expectation(single_edge, x, tau=2.0) == pytest.approx(0.75)
        sim = simulate_rounding(single_edge, x, tau=2.0, trials=100_000, seed=1)
        sizes = sim.weights([1.0, 1.0])
        stderr = sizes.std() / np.sqrt(len(sizes))
        assert abs(sizes.mean() - 0.75) <= 4 * stderr

    def test_trials_must_be_positive(self, single_edge):
        with pytest.raises(InvalidParameters):
            simulate_rounding(single_edge, [1.0, 1.0], tau=2.0, trials=0)

    @pytest.mark.slow
    def test_survival_at_least_half(self, rounded_instances):
        family = Family.pseudo_disks()
        tau = auto_tau(family)
        for graph, _, x in rounded_instances:
            rates = survival_rates(simulate_rounding(graph, x, tau=tau, trials=20_000, seed=3))
            sampled = rates.count > 0
            assert np.all(rates.rate[sampled] >= 0.5 - 3 * rates.stderr[sampled] - 1e-12)

    @pytest.mark.slow
    def test_monte_carlo_matches_exhaustive(self):
        for seed in range(3):
            instance = generate("disks", 10, 2.0, seed=40 + seed)
            graph = build_geometric(instance)
            x = solve_packing_lp(build_independent_set_lp(instance))
            exact = exhaustive_rounding_expectation(graph, x, tau=2.0, weights=instance.weights)
            totals = simulate_rounding(graph, x, tau=2.0, trials=20_000, seed=seed).weights(instance.weights)
            stderr = totals.std() / np.sqrt(len(totals))
            assert abs(totals.mean() - exact) <= 4 * stderr + 1e-9

    @pytest.mark.slow
    def test_mean_weight_above_guarantee(self, rounded_instances):
        tau = auto_tau(Family.pseudo_disks())
        for graph, weights, x in rounded_instances:
            totals = simulate_rounding(graph, x, tau=tau, trials=5_000, seed=0).weights(weights)
            bound = float(np.dot(weights, x.x)) / (2.0 * tau)
            assert totals.mean() >= 0.95 * bound


def test_derandomized_start_is_a_pessimistic_estimate():
    for seed in range(4):
        instance = generate("disks", 10, 2.5, seed=60 + seed)
        graph = build_geometric(instance)
        x = solve_packing_lp(build_independent_set_lp(instance))
        result = derandomized_round(graph, x, RoundingConfig(tau=2.0), instance.weights)
        exact = exhaustive_rounding_expectation(graph, x, tau=2.0, weights=instance.weights)
        start = result.trace["phi"][0]
        assert start <= exact + 1e-9
        assert result.total_weight >= start - 1e-9
