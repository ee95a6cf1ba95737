import pytest

from src.conflict_graph import ConflictGraph
from src.generator import generate
from src.models import AxisRect, Disk, Family, make_instance


@pytest.fixture
def crossing_disks():
    return make_instance([Disk(0.0, 0.0, 1.0), Disk(1.0, 0.0, 1.0)], family=Family.pseudo_disks())


@pytest.fixture
def disjoint_disks():
    return make_instance([Disk(0.0, 0.0, 1.0), Disk(5.0, 0.0, 1.0)], family=Family.pseudo_disks())


@pytest.fixture
def path_graph():
    return ConflictGraph.from_edges(3, [(0, 1), (1, 2)])


@pytest.fixture
def star_graph():
    # center 0, leaves 1..3
    return ConflictGraph.from_edges(4, [(0, 1), (0, 2), (0, 3)])


@pytest.fixture
def five_cycle():
    return ConflictGraph.from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)])


@pytest.fixture
def plus_pair():
    """A tall thin and a short wide rectangle crossing like a plus sign."""
    return [AxisRect(0.45, 0.0, 0.55, 1.0), AxisRect(0.0, 0.45, 1.0, 0.55)]


@pytest.fixture
def telescoping_rects():
    """Three mutually crossing rectangles forming a chain in the crossing order."""
    return [
        AxisRect(0.45, 0.0, 0.55, 1.0),
        AxisRect(0.30, 0.2, 0.70, 0.8),
        AxisRect(0.10, 0.35, 0.90, 0.65),
    ]


@pytest.fixture
def small_disk_corpus():
    """Unit-weight pseudo-disk instances small enough for the exact oracles."""
    return [generate("disks", 8 + seed % 5, 2.0, seed, unit=True) for seed in range(12)]


@pytest.fixture
def weighted_disk_corpus():
    return [generate("disks", 10, 2.5, 100 + seed) for seed in range(6)]
