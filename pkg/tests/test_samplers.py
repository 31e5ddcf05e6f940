"""Strong growth sampler, compositions, and weak ranking/unranking."""

import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rankedtrees import bijections, kernels, oracle, samplers
from rankedtrees.exact import weak_count
from rankedtrees.formats import to_newick
from rankedtrees.rng import RngHandle
from rankedtrees.stats import chi_square_uniform, measure_param
from rankedtrees.tree import canonical_equal, max_label, validate


def draws_to_perm(draws, n):
    """Insert i at position k_i: the permutation whose tree the draws describe."""
    sigma = [1, 2]
    for i, k in zip(range(3, n + 1), draws):
        sigma.insert(k - 1, i)
    return sigma


def all_draws(n):
    return itertools.product(*(range(1, i + 1) for i in range(3, n + 1)))


# strong ----------------------------------------------------------------------------

def test_small_strong_trees():
    assert to_newick(samplers.sample_strong(1, RngHandle(0))) == "x;"
    assert to_newick(samplers.sample_strong(2, RngHandle(0))) == "(x,x)1;"
    assert to_newick(samplers.build_strong([3], 3)) == "(x,x,x)1;"
    assert to_newick(samplers.build_strong([1], 3)) == "((x,x)2,x)1;"
    assert to_newick(samplers.build_strong([2], 3)) == "(x,(x,x)2)1;"


@pytest.mark.parametrize("n", range(3, 8))
def test_builder_agrees_with_permutation_map(n):
    keys = set()
    for d in all_draws(n):
        t = samplers.build_strong(d, n)
        assert canonical_equal(t, bijections.perm_to_tree(draws_to_perm(d, n)))
        keys.add(t.key())
    assert keys == {t.canonical().key() for t in oracle.exhaustive_strong(n)}


@settings(max_examples=40, deadline=None)
@given(n=st.integers(3, 400), seed=st.integers(0, 2**31))
def test_builder_agrees_with_permutation_map_large(n, seed):
    d = RngHandle(seed).strong_draws(n, 1)[0]
    t = samplers.build_strong(d, n)
    assert canonical_equal(t, bijections.perm_to_tree(draws_to_perm(d.tolist(), n)))


@settings(max_examples=40, deadline=None)
@given(n=st.integers(3, 300), seed=st.integers(0, 2**31))
def test_parameter_kernels_match_built_trees(n, seed):
    d = RngHandle(seed).strong_draws(n, 4)
    full = kernels.strong_params(d, n)
    scan = kernels.strong_params_scan(d, n)
    assert np.array_equal(full, scan)
    for row, params in zip(d, full):
        t = samplers.build_strong(row, n)
        got = [measure_param(t, p, "strong")
               for p in ("internal-nodes", "root-arity", "root-leaves", "binary-nodes")]
        assert got == params.tolist()


def test_build_strong_rejects_bad_draws():
    with pytest.raises(ValueError):
        samplers.build_strong([4], 3)
    with pytest.raises(ValueError):
        samplers.build_strong([1, 1], 3)
    with pytest.raises(ValueError):
        samplers.build_strong([0], 3)


def test_sample_strong_draw_count():
    for n in (2, 3, 10, 1000):
        r = RngHandle(n)
        t = samplers.sample_strong(n, r)
        assert r.draws == max(n - 2, 0)
        assert validate(t, "strong").valid


def test_strong_sampler_uniform_n4():
    r = RngHandle(8)
    counts = {}
    for _ in range(6000):
        k = samplers.sample_strong(4, r).key()
        counts[k] = counts.get(k, 0) + 1
    assert len(counts) == 12
    assert chi_square_uniform(list(counts.values())).passed


# compositions ----------------------------------------------------------------------

@pytest.mark.parametrize("n", range(1, 11))
def test_composition_sweep(n):
    for k in range(1, n + 1):
        total = math.comb(n - 1, k - 1)
        seen = []
        for s in range(total):
            c = samplers.unrank_composition(n, k, s)
            assert c == samplers.unrank_composition_reference(n, k, s)
            assert sum(c) == n and len(c) == k and min(c) >= 1
            assert samplers.rank_composition(c) == s
            seen.append(c)
        assert len(set(seen)) == total


def test_composition_errors():
    with pytest.raises(samplers.RankError, match="0 <= composition rank < 4"):
        samplers.unrank_composition(5, 2, 4)
    with pytest.raises(ValueError):
        samplers.unrank_composition(3, 4, 0)
    with pytest.raises(ValueError):
        samplers.rank_composition([2, 0])


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(1, 9), min_size=1, max_size=40))
def test_composition_round_trip_large(parts):
    n, k = sum(parts), len(parts)
    s = samplers.rank_composition(parts)
    assert 0 <= s < math.comb(n - 1, k - 1)
    assert samplers.unrank_composition(n, k, s) == tuple(parts)


# weak ------------------------------------------------------------------------------

@pytest.mark.parametrize("n", range(1, 7))
def test_unrank_is_bijection_onto_oracle(n):
    g = weak_count(n)
    keys = []
    for s in range(g):
        t = samplers.unrank_weak(n, s)
        assert validate(t, "weak").valid
        assert samplers.rank_weak(t) == s
        keys.append(t.key())
    assert len(set(keys)) == g
    assert set(keys) == {t.canonical().key() for t in oracle.exhaustive_weak(n)}


def test_unrank_order_descending_predecessor_size():
    # first block: predecessor of size n-1; inside it composition rank 0 is (1, 2)
    assert samplers.unrank_composition(3, 2, 0) == (1, 2)
    assert to_newick(samplers.unrank_weak(3, 0)) == "(x,(x,x)2)1;"
    assert to_newick(samplers.unrank_weak(3, 1)) == "((x,x)2,x)1;"
    assert to_newick(samplers.unrank_weak(3, 2)) == "(x,x,x)1;"
    assert to_newick(samplers.unrank_weak(1, 0)) == "x;"


def test_unrank_range_errors():
    with pytest.raises(samplers.RankError) as err:
        samplers.unrank_weak(6, 541)
    assert err.value.bound == 541
    assert "541" in str(err.value)
    with pytest.raises(samplers.RankError):
        samplers.unrank_weak(6, -1)


def test_rank_unrank_big_ranks_n50():
    r = RngHandle(50)
    g = weak_count(50)
    for _ in range(100):
        s = r.rand_below(g)
        assert samplers.rank_weak(samplers.unrank_weak(50, s)) == s
    for s in (0, 1, g - 1):
        assert samplers.rank_weak(samplers.unrank_weak(50, s)) == s


@settings(max_examples=30, deadline=None)
@given(n=st.integers(1, 80), data=st.data())
def test_chain_length_is_max_label(n, data):
    s = data.draw(st.integers(0, weak_count(n) - 1))
    t = samplers.unrank_weak(n, s)
    assert samplers.weak_chain_length(n, s) == max_label(t)
    assert measure_param(t, "steps", "weak") == max_label(t)


def test_rank_rejects_invalid_trees():
    from rankedtrees.formats import parse_newick
    from rankedtrees.tree import InvalidTreeError
    with pytest.raises(InvalidTreeError):
        samplers.rank_weak(parse_newick("((x,x)3,x)1;"))


def test_weak_sampler_uniform_n4():
    r = RngHandle(9)
    counts = {}
    for _ in range(6500):
        k = samplers.sample_weak(4, r).key()
        counts[k] = counts.get(k, 0) + 1
    assert len(counts) == 13
    assert chi_square_uniform(list(counts.values())).passed


def test_sample_dispatch():
    r = RngHandle(1)
    assert validate(samplers.sample("strong", 20, r), "strong").valid
    assert validate(samplers.sample("weak", 20, r), "weak").valid
    with pytest.raises(ValueError):
        samplers.sample("medium", 5, r)
