import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import brute_force_index_set
from polytransport.multiindex import (
    MultiIndexSet,
    _Counter,
    build_tail_partition,
    construct_anisotropic,
    full_box,
    is_downward_closed,
    total_degree,
)


def as_set(lam):
    return set(lam)


def test_construct_examples():
    assert as_set(construct_anisotropic((1, 1), 2)) == {(0, 0), (1, 0), (0, 1)}
    assert as_set(construct_anisotropic((1,), 1)) == {(0,)}
    # |{nu in N^3 : |nu|_1 <= 3}| = C(6, 3) = 20; the two-dimensional count is 10
    assert len(construct_anisotropic((1, 1, 1), 3.5)) == 20 == len(brute_force_index_set((1, 1, 1), 3.5))
    assert len(construct_anisotropic((1, 1), 3.5)) == 10


def test_strict_inequality_at_ties():
    lam = construct_anisotropic((0.5, 1.0), 2.0)
    assert (4, 0) not in lam and (3, 0) in lam and (0, 1) in lam and (0, 2) not in lam


@pytest.mark.parametrize("weights,level", [((0, 1), 2), ((-1, 1), 2), ((1, 1), 0), ((1, 1), -3)])
def test_construct_rejects_bad_input(weights, level):
    with pytest.raises(ValueError):
        construct_anisotropic(weights, level)


@given(
    st.integers(1, 4).flatmap(
        lambda d: st.tuples(st.lists(st.floats(0.5, 3.0), min_size=d, max_size=d), st.floats(1.0, 8.0))
    )
)
def test_matches_brute_force(args):
    k, level = args
    if len(k) == 4 and level / min(k) > 6:
        level = 6 * min(k)
    lam = construct_anisotropic(k, level)
    assert np.array_equal(lam.indices, brute_force_index_set(k, level))
    assert is_downward_closed(lam)
    assert (0,) * len(k) in lam


@given(st.lists(st.floats(0.5, 3.0), min_size=1, max_size=4), st.floats(1.0, 8.0))
def test_recursion_cost_is_linear(k, level):
    counter = _Counter()
    lam = construct_anisotropic(k, level, counter=counter)
    assert counter.calls <= (len(k) + 1) * len(lam)


def test_downward_closed_examples():
    assert not is_downward_closed(MultiIndexSet.from_indices([(0, 0), (1, 1)]))
    assert is_downward_closed(MultiIndexSet.from_indices([(0,)]))
    assert is_downward_closed(full_box((2, 3, 1)))


def test_multiindex_set_sorted_and_deduplicated():
    lam = MultiIndexSet.from_indices([(1, 0), (0, 1), (0, 0), (1, 0)])
    assert lam.indices.tolist() == [[0, 0], [0, 1], [1, 0]]
    assert lam.position((1, 0)) == 2
    assert lam == MultiIndexSet.from_indices([(0, 0), (1, 0), (0, 1)])


def test_negative_indices_rejected():
    with pytest.raises(ValueError):
        MultiIndexSet.from_indices([(0, -1)])


def test_total_degree_and_box():
    assert len(total_degree(2, 3.5)) == 10
    assert len(full_box((8, 8))) == 81


def test_tail_partition_hand_example():
    tp = build_tail_partition(MultiIndexSet.from_indices([(0, 0), (1, 0), (0, 1)]))
    last, first = tp.levels[1], tp.levels[0]
    assert last.tails.tolist() == [[0], [1]]
    assert [g.tolist() for g in last.groups()] == [[0, 1]]
    groups = {tuple(first.tails[first.group_ptr[g]][1:]): sorted(grp.tolist()) for g, grp in enumerate(first.groups())}
    assert groups == {(0,): [0, 1], (1,): [0]}


def test_tail_partition_trivial():
    tp = build_tail_partition(MultiIndexSet.from_indices([(0,)]))
    assert [g.tolist() for g in tp.levels[0].groups()] == [[0]]


def test_tail_partition_counting_identity():
    lam = construct_anisotropic((1, 1), 4)
    tp = build_tail_partition(lam)
    assert sum(len(g) for g in tp.levels[0].groups()) == len(lam)


def test_tail_partition_rejects_non_downward_closed():
    with pytest.raises(ValueError):
        build_tail_partition(MultiIndexSet.from_indices([(0, 0), (2, 0)]))
    with pytest.raises(ValueError):
        build_tail_partition(MultiIndexSet.from_indices([], dim=2))


@given(st.lists(st.floats(0.5, 3.0), min_size=1, max_size=4), st.floats(1.0, 7.0))
def test_tail_partition_structure(k, level):
    lam = construct_anisotropic(k, level)
    tp = build_tail_partition(lam)
    d = lam.dim
    assert tp.stored_items() <= d * len(lam)
    for j, lv in enumerate(tp.levels):
        # groups disjoint and covering the unique tails of length d - j
        assert {tuple(r) for r in lv.tails.tolist()} == {tuple(r) for r in lam.indices[:, j:].tolist()}
        assert len(lv.tails) == len({tuple(r) for r in lv.tails.tolist()})
        for g in range(lv.n_groups):
            block = lv.tails[lv.group_ptr[g] : lv.group_ptr[g + 1]]
            assert len({tuple(r[1:]) for r in block.tolist()}) == 1
    # every member reached through its chain of tails
    assert sorted(tp.order.tolist()) == list(range(len(lam)))
    assert np.array_equal(tp.levels[0].tails[tp.order], lam.indices)
