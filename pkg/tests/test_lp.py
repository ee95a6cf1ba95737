from types import SimpleNamespace

import pytest

from src.conflict_graph import GraphMode
from src.exceptions import InvalidParameters, MissingPoints
from src.generator import generate
from src.geometry import enumerate_arrangement
from src.lp import (
    PackingLP, RowKind, RowProvenance, build_independent_set_lp, build_piercing_lp, containment_rows,
    iteration_bound, pair_energy, solve_covering_lp, solve_packing_lp,
)
from src.models import Disk, Family, make_instance, strip_contained


def packing(n, rows, weights=None):
    return PackingLP(
        n=n,
        rows=tuple(tuple(r) for r in rows),
        provenance=tuple(RowProvenance(RowKind.VERTEX) for _ in rows),
        weights=tuple(weights or [1.0] * n),
    )


TRIANGLE = [(0, 1), (0, 2), (1, 2)]


class TestPackingLP:
    def test_no_rows_takes_every_object(self):
        solution = solve_packing_lp(packing(2, [], [3.0, 4.0]))
        assert solution.x == (1.0, 1.0)
        assert solution.value == 7.0

    def test_single_row(self):
        solution = solve_packing_lp(packing(2, [(0, 1)]))
        assert solution.value == pytest.approx(1.0)
        assert solution.max_row_violation <= 1e-9

    def test_triangle(self):
        assert solve_packing_lp(packing(3, TRIANGLE)).value == pytest.approx(1.5)

    @pytest.mark.parametrize("rows, optimum", [([(0, 1)], 2.0), (TRIANGLE, 1.5)])
    def test_mwu_within_accuracy(self, rows, optimum):
        eps = 0.1
        solution = solve_packing_lp(packing(3, rows), eps=eps, method="mwu")
        assert solution.method == "mwu"
        assert solution.max_row_violation <= 1e-12
        assert (1.0 - eps) * optimum <= solution.value <= optimum + 1e-9

    def test_weighted_mwu_is_feasible(self):
        lp = packing(3, TRIANGLE, [5.0, 1.0, 1.0])
        solution = solve_packing_lp(lp, eps=0.1, method="mwu")
        assert max(lp.row_loads(solution.x)) <= 1.0 + 1e-12
        assert solution.value >= 0.9 * 5.0

    @pytest.mark.parametrize("eps", [1e-3, 1e-4])
    def test_mwu_at_fine_accuracy(self, eps):
        solution = solve_packing_lp(packing(2, [(0, 1)]), eps=eps, method="mwu")
        assert not solution.truncated
        assert solution.max_row_violation <= 1e-12
        assert (1.0 - eps) <= solution.value <= 1.0 + 1e-9

    def test_capped_mwu_keeps_best_feasible_point(self):
        solution = solve_packing_lp(packing(2, [(0, 1)]), eps=1e-2, method="mwu", max_iterations=50)
        assert solution.truncated
        assert solution.iterations == 50
        assert solution.max_row_violation <= 1e-12
        assert solution.value == pytest.approx(1.0)

    def test_iteration_bound_is_finite_at_small_steps(self):
        assert 0 < iteration_bound(3, 1e-4 / 3) < 10**12

    def test_highs_without_a_point(self, monkeypatch):
        monkeypatch.setattr("src.lp.linprog", lambda *args, **kwargs: SimpleNamespace(
            status=1, x=None, message="iteration limit reached", nit=10))
        solution = solve_packing_lp(packing(2, [(0, 1)]))
        assert solution.truncated
        assert solution.x == (0.0, 0.0)
        assert solution.value == 0.0

    @pytest.mark.parametrize("eps", [0.0, 0.5, 1.0])
    def test_eps_range(self, eps):
        with pytest.raises(InvalidParameters):
            solve_packing_lp(packing(2, [(0, 1)]), eps=eps)

    def test_unknown_method(self):
        with pytest.raises(ValueError, match="Unknown LP method"):
            solve_packing_lp(packing(2, [(0, 1)]), method="simplex")

    def test_export_text(self):
        assert packing(2, [(0, 1)], [1.0, 2.0]).export_text() == "max: 1.0 2.0\n≤ 1 : 0 1\n"


class TestBuilders:
    def test_crossing_disks_one_row(self, crossing_disks):
        lp = build_independent_set_lp(crossing_disks)
        assert lp.rows == ((0, 1),)
        assert lp.provenance[0].kind == RowKind.VERTEX

    def test_disjoint_disks_no_rows(self, disjoint_disks):
        assert build_independent_set_lp(disjoint_disks).rows == ()

    def test_containment_row(self):
        instance = make_instance([Disk(0.0, 0.0, 2.0), Disk(0.5, 0.0, 1.0)])
        rows = containment_rows(instance)
        assert list(rows) == [(0, 1)]
        assert rows[(0, 1)].object_id == 1
        lp = build_independent_set_lp(instance)
        assert solve_packing_lp(lp).value == pytest.approx(1.0)

    def test_discrete_rows(self, crossing_disks):
        instance = make_instance(crossing_disks.shapes, points=[(0.5, 0.0), (-0.5, 0.0)])
        lp = build_independent_set_lp(instance, GraphMode.DISCRETE)
        assert lp.rows == ((0, 1),)
        assert lp.provenance[0].kind == RowKind.DISCRETE_POINT

    def test_discrete_needs_points(self, crossing_disks):
        with pytest.raises(MissingPoints):
            build_independent_set_lp(crossing_disks, GraphMode.DISCRETE)


class TestPiercing:
    def test_lone_disk(self):
        lp = build_piercing_lp(make_instance([Disk(0.0, 0.0, 1.0)], family=Family.pseudo_disks()))
        assert lp.synthetic == (True,)
        assert solve_covering_lp(lp).value == pytest.approx(1.0)

    def test_crossing_disks(self, crossing_disks):
        lp = build_piercing_lp(crossing_disks)
        assert lp.synthetic == (False, False)
        assert all(cover == (0, 1) for cover in lp.covering)
        assert solve_covering_lp(lp).value == pytest.approx(1.0)

    def test_mwu_covering_is_feasible_and_close(self, crossing_disks):
        lp = build_piercing_lp(make_instance(
            crossing_disks.shapes + [Disk(5.0, 0.0, 1.0)], family=Family.pseudo_disks()))
        solution = solve_covering_lp(lp, eps=0.1, method="mwu")
        assert solution.max_row_violation <= 1e-9
        assert 2.0 - 1e-9 <= solution.value <= 2.0 / 0.9

    @pytest.mark.parametrize("eps", [1e-3, 1e-4])
    def test_mwu_covering_at_fine_accuracy(self, disjoint_disks, eps):
        solution = solve_covering_lp(build_piercing_lp(disjoint_disks), eps=eps, method="mwu")
        assert not solution.truncated
        assert solution.max_row_violation <= 1e-12
        assert solution.value == pytest.approx(2.0)

    def test_highs_without_a_point(self, crossing_disks, monkeypatch):
        monkeypatch.setattr("src.lp.linprog", lambda *args, **kwargs: SimpleNamespace(
            status=1, x=None, message="iteration limit reached", nit=10))
        solution = solve_covering_lp(build_piercing_lp(crossing_disks))
        assert solution.truncated
        assert solution.max_row_violation == 0.0
        assert solution.value == 2.0

    def test_covering_matches_packing(self):
        for seed in range(5):
            instance, _ = strip_contained(generate("disks", 12, 2.0, seed=seed, unit=True))
            piercing = build_piercing_lp(instance)
            cover = solve_covering_lp(piercing).value
            pack = solve_packing_lp(piercing.packing_dual()).value
            fractional_is = solve_packing_lp(build_independent_set_lp(instance)).value
            assert cover == pytest.approx(pack, rel=1e-6)
            assert pack == pytest.approx(fractional_is, rel=1e-6)


def test_lp_bounds_every_independent_set(weighted_disk_corpus):
    from src.conflict_graph import build_geometric
    from src.oracle import exact_mwis

    for instance in weighted_disk_corpus:
        lp_value = solve_packing_lp(build_independent_set_lp(instance)).value
        _, best = exact_mwis(build_geometric(instance), instance.weights)
        assert best <= lp_value + 1e-7


def test_pair_energy_is_linear_in_lp_energy():
    for seed in range(5):
        instance = generate("disks", 30, 3.0, seed=seed, unit=True)
        solution = solve_packing_lp(build_independent_set_lp(instance))
        vertices = enumerate_arrangement(instance).vertices
        assert pair_energy(vertices, solution.x) <= 8 * 6 * solution.energy
