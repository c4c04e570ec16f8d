import random
from fractions import Fraction

import pytest

from partdist.errors import InvalidArgumentError, InvalidPartitionError
from partdist.graph import grid_graph
from partdist.partition import (
    MassDistribution,
    component_distribution,
    from_labels,
    load_ensemble,
    load_partition_csv,
    load_vertex_weights,
    same_partition,
    save_ensemble,
    save_partition_csv,
)

from conftest import random_labels


def test_from_labels_two_halves():
    g = grid_graph(2, 2)
    p = from_labels(g, [0, 0, 1, 1], 2)
    assert p.component_sizes() == (2, 2)
    assert p.components == ((0, 1), (2, 3))


def test_from_labels_missing_component():
    g = grid_graph(2, 2)
    with pytest.raises(InvalidPartitionError):
        from_labels(g, [0, 0, 0, 0], 2)


def test_from_labels_out_of_range():
    g = grid_graph(2, 2)
    with pytest.raises(InvalidArgumentError):
        from_labels(g, [0, 0, 1, 2], 2)


def test_from_labels_wrong_length():
    g = grid_graph(2, 2)
    with pytest.raises(InvalidArgumentError):
        from_labels(g, [0, 1], 2)


def test_column_labels_give_vertical_stripes():
    g = grid_graph(3, 3)
    p = from_labels(g, [c for _ in range(3) for c in range(3)], 3)
    assert p.components == ((0, 3, 6), (1, 4, 7), (2, 5, 8))
    assert p.connected


def test_uniform_distribution_thirds():
    g = grid_graph(1, 3)
    p = from_labels(g, [0, 0, 0], 1)
    d = component_distribution(p, 0)
    assert d.masses == (Fraction(1, 3),) * 3
    assert d.total == 1


def test_weighted_distribution_normalizes():
    g = grid_graph(1, 3)
    p = from_labels(g, [0, 0, 0], 1, representation="weighted", vertex_weights=(2, 1, 1))
    d = component_distribution(p, 0)
    assert d.masses == (Fraction(1, 2), Fraction(1, 4), Fraction(1, 4))


def test_unbalanced_distribution_raw_mass():
    g = grid_graph(1, 5)
    p = from_labels(g, [0] * 5, 1, representation="unbalanced")
    d = component_distribution(p, 0)
    assert d.total == 5
    assert set(d.masses) == {Fraction(1)}


def test_component_index_out_of_range():
    g = grid_graph(2, 2)
    p = from_labels(g, [0, 0, 1, 1], 2)
    with pytest.raises(InvalidArgumentError):
        component_distribution(p, 2)


def test_distributions_cover_weight_vector():
    g = grid_graph(3, 3)
    rng = random.Random(5)
    weights = tuple(Fraction(rng.randint(1, 5)) for _ in range(9))
    for rep in ("uniform", "weighted", "unbalanced"):
        p = from_labels(g, random_labels(9, 3, rng), 3, representation=rep, vertex_weights=weights)
        stacked = [Fraction(0)] * 9
        for i in range(3):
            for v, m in enumerate(component_distribution(p, i).masses):
                stacked[v] += m
        if rep == "unbalanced":
            assert tuple(stacked) == weights
        else:
            # per-component piles are disjoint, so each vertex carries its
            # own component's share and every component sums to exactly 1
            for i in range(3):
                assert component_distribution(p, i).total == 1
            for v in range(9):
                assert stacked[v] > 0


def test_connectivity_flag():
    g = grid_graph(1, 4)
    assert from_labels(g, [0, 0, 1, 1], 2).connected
    assert not from_labels(g, [0, 1, 0, 1], 2).connected


def test_require_connected_raises():
    g = grid_graph(1, 4)
    with pytest.raises(InvalidPartitionError):
        from_labels(g, [0, 1, 0, 1], 2, require_connected=True)


def test_negative_mass_rejected():
    with pytest.raises(InvalidArgumentError):
        MassDistribution((Fraction(-1), Fraction(1)))


def test_nonpositive_vertex_weight_rejected():
    g = grid_graph(1, 2)
    with pytest.raises(InvalidArgumentError):
        from_labels(g, [0, 1], 2, vertex_weights=(0, 1))


def test_same_partition_up_to_relabeling():
    g = grid_graph(2, 2)
    a = from_labels(g, [0, 0, 1, 1], 2)
    b = from_labels(g, [1, 1, 0, 0], 2)
    c = from_labels(g, [0, 1, 0, 1], 2)
    assert same_partition(a, b)
    assert not same_partition(a, c)


def test_partition_csv_round_trip(tmp_path):
    g = grid_graph(2, 3)
    p = from_labels(g, [0, 1, 2, 0, 1, 2], 3)
    path = tmp_path / "p.csv"
    save_partition_csv(p, path)
    q = load_partition_csv(path, g)
    assert q.components == p.components


def test_partition_csv_header_optional(tmp_path):
    g = grid_graph(1, 2)
    path = tmp_path / "p.csv"
    path.write_text("0,0\n1,1\n")
    q = load_partition_csv(path, g)
    assert q.k == 2


def test_partition_csv_incomplete_rejected(tmp_path):
    g = grid_graph(1, 3)
    path = tmp_path / "p.csv"
    path.write_text("vertex_id,label\n0,0\n1,1\n")
    with pytest.raises(InvalidArgumentError):
        load_partition_csv(path, g)


def test_ensemble_round_trip(tmp_path):
    g = grid_graph(2, 2)
    parts = [from_labels(g, lab, 2) for lab in ([0, 0, 1, 1], [0, 1, 0, 1])]
    path = tmp_path / "ens.jsonl"
    save_ensemble(parts, path)
    loaded = load_ensemble(path, g)
    assert [p.components for p in loaded] == [p.components for p in parts]


def test_vertex_weights_csv(tmp_path):
    g = grid_graph(1, 3)
    path = tmp_path / "w.csv"
    path.write_text("vertex_id,weight\n0,2\n1,1/2\n2,1\n")
    w = load_vertex_weights(path, g)
    assert w == (Fraction(2), Fraction(1, 2), Fraction(1))
