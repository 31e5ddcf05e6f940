"""Tree <-> permutation and tree <-> ordered partition maps."""

import itertools

import pytest
from hypothesis import given, settings, strategies as st

from rankedtrees import bijections as bj
from rankedtrees import oracle
from rankedtrees.formats import parse_newick, to_newick
from rankedtrees.tree import canonical_equal, validate


def test_base_cases():
    assert to_newick(bj.perm_to_tree((1, 2))) == "(x,x)1;"
    assert to_newick(bj.partition_to_tree([[1, 2]])) == "(x,x,x)1;"
    # element e sits in the block of the lowest common ancestor of leaves e, e+1
    assert to_newick(bj.partition_to_tree([[2], [1]])) == "((x,x)2,x)1;"
    assert to_newick(bj.partition_to_tree([[1], [2]])) == "(x,(x,x)2)1;"


def test_worked_permutation_example():
    t = bj.perm_to_tree((4, 1, 2, 5, 3, 8, 6, 7))
    assert to_newick(t) == "((x,x)2,x,(x,x,(x,x)4,x)3)1;"
    assert bj.tree_to_perm(t) == (4, 1, 2, 5, 3, 8, 6, 7)


def test_worked_partition_example():
    p = ((3, 4), (1, 5, 7), (2, 6))
    t = bj.partition_to_tree(p)
    assert to_newick(t) == "((x,(x,x)3)2,x,(x,(x,x)3,x)2)1;"
    assert bj.tree_to_partition(t) == p


def test_runs_and_normalize():
    assert bj.runs([1, 5, 7, 6]) == [(1,), (5, 6, 7)]
    with pytest.raises(ValueError):
        bj.runs([])
    assert bj.normalize([[7, 3], [10]]) == ((1, 2), (3,))


@pytest.mark.parametrize("sigma", [(2, 1), (3, 2, 1), (1, 1, 2), (1, 3), (0, 1), (1,), ()])
def test_perm_rejections(sigma):
    with pytest.raises(bj.ClassMembershipError):
        bj.perm_to_tree(sigma)


@pytest.mark.parametrize("p", [[[1], [3]], [[1, 2], [2]], [[1], []], [], [[0, 1]]])
def test_partition_rejections(p):
    with pytest.raises(bj.ClassMembershipError):
        bj.partition_to_tree(p)


def test_single_leaf_has_no_preimage():
    with pytest.raises(bj.ClassMembershipError):
        bj.tree_to_partition(parse_newick("x;"))
    with pytest.raises(bj.ClassMembershipError):
        bj.tree_to_perm(parse_newick("x;"))


def test_inverse_maps_refuse_wrong_model():
    with pytest.raises(bj.ClassMembershipError):
        bj.tree_to_perm(parse_newick("((x,x)2,(x,x)2)1;"))
    with pytest.raises(bj.ClassMembershipError):
        bj.tree_to_partition(parse_newick("((x,x)3,x)1;"))


def test_parse_and_format():
    assert bj.parse_permutation("4,1,2") == (4, 1, 2)
    assert bj.format_permutation((4, 1, 2)) == "4,1,2"
    assert bj.parse_partition("3,4|1,5,7|2,6") == ((3, 4), (1, 5, 7), (2, 6))
    assert bj.format_partition(((3, 4), (1, 5, 7), (2, 6))) == "3,4|1,5,7|2,6"
    with pytest.raises(ValueError):
        bj.parse_permutation("1,,2")
    with pytest.raises(ValueError):
        bj.parse_partition("1|a")


def test_enumerators_count():
    assert sum(1 for _ in bj.all_hp(6)) == 360
    assert sum(1 for _ in bj.all_ordered_partitions(5)) == 541
    assert all(bj.is_hp(s) for s in bj.all_hp(5))
    assert sum(1 for s in itertools.permutations(range(1, 6)) if bj.is_hp(s)) == 60


@pytest.mark.parametrize("n", range(2, 8))
def test_perm_map_is_bijection_onto_oracle(n):
    images = []
    for sigma in bj.all_hp(n):
        t = bj.perm_to_tree(sigma)
        assert validate(t, "strong").valid
        assert bj.tree_to_perm(t) == tuple(sigma)
        images.append(t.canonical().key())
    assert len(set(images)) == len(images)
    assert set(images) == {t.canonical().key() for t in oracle.exhaustive_strong(n)}


@pytest.mark.parametrize("m", range(1, 7))
def test_partition_map_is_bijection_onto_oracle(m):
    images = []
    for p in bj.all_ordered_partitions(m):
        t = bj.partition_to_tree(p)
        assert validate(t, "weak").valid
        assert bj.tree_to_partition(t) == p
        images.append(t.canonical().key())
    assert len(set(images)) == len(images)
    assert set(images) == {t.canonical().key() for t in oracle.exhaustive_weak(m + 1)}


def test_tree_to_perm_is_inverse_on_oracle():
    for t in oracle.exhaustive_strong(6):
        assert canonical_equal(bj.perm_to_tree(bj.tree_to_perm(t)), t)


@settings(max_examples=40, deadline=None)
@given(st.permutations(list(range(1, 40))))
def test_large_perm_round_trip(perm):
    sigma = list(perm)
    a, b = sigma.index(1), sigma.index(2)
    if a > b:
        sigma[a], sigma[b] = 2, 1
    t = bj.perm_to_tree(sigma)
    assert bj.tree_to_perm(t) == tuple(sigma)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(0, 5), min_size=1, max_size=30))
def test_large_partition_round_trip(block_of):
    # element e goes to block block_of[e-1]; empty blocks are dropped
    used = sorted(set(block_of))
    p = tuple(tuple(e + 1 for e, b in enumerate(block_of) if b == u) for u in used)
    t = bj.partition_to_tree(p)
    assert validate(t, "weak").valid
    assert bj.tree_to_partition(t) == p
