import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from paretoflow.pareto import (
    PointSet,
    dominates,
    nondominated_sort,
    pareto_front,
    pareto_mask,
    read_points_csv,
    write_points_csv,
)

from .helpers import brute_front_mask, random_sets

vec = st.integers(1, 4).flatmap(lambda d: st.tuples(*[arrays(float, d, elements=st.integers(0, 3))] * 3))


def test_dominates_examples():
    assert dominates((3, 1.4), (2, 1.2))
    assert not dominates((1, 2), (1, 2))
    assert not dominates((2, 1.2), (1.5, 2)) and not dominates((1.5, 2), (2, 1.2))


def test_dominates_dimension_mismatch():
    with pytest.raises(ValueError):
        dominates((1, 2), (1, 2, 3))


@given(vec)
def test_dominance_order_properties(abc):
    a, b, c = abc
    assert not dominates(a, a)
    if dominates(a, b):
        assert not dominates(b, a)
    if dominates(a, b) and dominates(b, c):
        assert dominates(a, c)


def test_front_examples(dilemma_set):
    assert pareto_front(dilemma_set).front_indices == {3, 4}
    assert pareto_front(dilemma_set).dominated_indices == {1, 2}
    assert pareto_front(PointSet(np.array([[5.0, 1.0]]))).front_indices == {0}
    assert pareto_front(PointSet(np.array([[1.0], [2.0], [3.0]]))).front_indices == {2}


def test_front_keeps_duplicates():
    F = np.array([[1.0, 0.0], [1.0, 0.0], [0.0, 1.0], [0.0, 0.0]])
    assert pareto_front(F).front_indices == {0, 1, 2}


def test_front_rejects_empty():
    with pytest.raises(ValueError):
        pareto_front(np.zeros((0, 2)))


def test_pointset_validation():
    with pytest.raises(ValueError):
        PointSet(np.array([[np.nan, 1.0]]))
    with pytest.raises(ValueError):
        PointSet(np.array([[1.0], [2.0]]), np.array([3, 3]))


def test_front_matches_brute_force():
    rng = np.random.default_rng(0)
    for F in random_sets(rng, 60):
        assert np.array_equal(pareto_mask(F), brute_front_mask(F))


def test_front_result_partition():
    rng = np.random.default_rng(1)
    for F in random_sets(rng, 20):
        fr = pareto_front(F)
        assert fr.front_indices | fr.dominated_indices == set(range(len(F)))
        assert not fr.front_indices & fr.dominated_indices


def test_sort_examples(dilemma_set):
    layers = nondominated_sort(dilemma_set)
    assert [l.front_indices for l in layers] == [{3, 4}, {2}, {1}]
    inc = nondominated_sort(np.array([[0.0, 2.0], [1.0, 1.0], [2.0, 0.0]]))
    assert len(inc) == 1 and inc[0].front_indices == {0, 1, 2}
    chain = PointSet(np.array([[1.0], [2.0], [3.0]]), np.array([1, 2, 3]))
    layers = nondominated_sort(chain, max_fronts=2)
    assert [l.front_indices for l in layers] == [{3}, {2}, {1}]
    assert [l.trimmed for l in layers] == [False, False, True]


def test_sort_layers_are_successive_fronts():
    rng = np.random.default_rng(2)
    for F in random_sets(rng, 30, max_n=80):
        remaining = list(range(len(F)))
        seen = []
        for k, layer in enumerate(nondominated_sort(F)):
            expect = {remaining[i] for i in np.nonzero(brute_front_mask(F[remaining]))[0]}
            assert layer.front_indices == expect
            if k:
                for i in layer.front_indices:
                    assert any(dominates(F[j], F[i]) for j in seen)
            seen += sorted(expect)
            remaining = [i for i in remaining if i not in expect]
        assert not remaining


def test_points_csv_roundtrip(tmp_path):
    F = np.random.default_rng(3).random((5, 3))
    write_points_csv(tmp_path / "p.csv", F, header=["a", "b", "c"])
    back = read_points_csv(tmp_path / "p.csv")
    assert np.array_equal(back.points, F)
    assert back.ids.tolist() == list(range(5))
    (tmp_path / "q.csv").write_text("id,f1,f2\n7,1,2\n9,3,4\n")
    q = read_points_csv(tmp_path / "q.csv")
    assert q.ids.tolist() == [7, 9] and q.points.tolist() == [[1, 2], [3, 4]]
