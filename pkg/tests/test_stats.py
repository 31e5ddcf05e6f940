"""Cohort harness: measurement, reproducibility, theory and the fit tests."""

import json
import math
from fractions import Fraction

import numpy as np
import pytest
from scipy import stats as sps

from rankedtrees import exact, stats
from rankedtrees.formats import parse_newick


def test_measure_param_on_worked_tree():
    t = parse_newick("((x,x)2,x,(x,x,(x,x)4,x)3)1;")
    assert stats.measure_param(t, "internal-nodes") == 4
    assert stats.measure_param(t, "root-arity") == 3
    assert stats.measure_param(t, "root-leaves") == 1
    assert stats.measure_param(t, "binary-nodes") == 2
    assert stats.measure_param(t, "steps") == 4


def test_param_model_checks():
    with pytest.raises(ValueError, match="not defined for the weak model"):
        stats.check_param("weak", "root-arity")
    with pytest.raises(ValueError, match="unknown parameter"):
        stats.check_param("strong", "height")
    assert stats.check_param("strong", "STEPS")[1] is stats.ParamKind.STEPS


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6])
def test_cohort_pmf_close_to_exact_small(n):
    # a cohort at small n against the exact row by chi-square
    for model, param, dist in [("strong", "internal-nodes", exact.strong_internal_nodes_dist),
                               ("strong", "root-leaves", exact.strong_root_leaves_dist),
                               ("weak", "steps", exact.weak_steps_dist)]:
        vals, _ = stats.cohort_values(model, n, param, 4000, seed=n)
        row = dist(n)
        probs = dict(enumerate(row.probabilities()))
        hist = dict(zip(*np.unique(vals, return_counts=True)))
        hist = {int(k): int(v) for k, v in hist.items()}
        if sum(1 for p in probs.values() if p) > 1:
            assert stats.chi_square_histogram(hist, probs).passed, (model, param)
        else:
            assert set(hist) == {k for k, p in probs.items() if p}


def test_cohort_reproducible_and_worker_independent():
    a = stats.run_cohort("strong", 200, "binary-nodes", 2500, seed=3)
    b = stats.run_cohort("strong", 200, "binary-nodes", 2500, seed=3, workers=2)
    assert a.to_json() == b.to_json()
    w1 = stats.run_cohort("weak", 30, "weak-internal-nodes", 2100, seed=4)
    w2 = stats.run_cohort("weak", 30, "weak-internal-nodes", 2100, seed=4, workers=3)
    assert w1.to_json() == w2.to_json()


def test_cohort_is_prefix_of_larger_cohort():
    small, _ = stats.cohort_values("strong", 50, "root-arity", 1500, seed=1)
    big, _ = stats.cohort_values("strong", 50, "root-arity", 3000, seed=1)
    assert np.array_equal(small, big[:1500])


def test_weak_steps_shortcut_matches_trees():
    # the chain-length shortcut and explicit trees see the same ranks
    from rankedtrees.rng import RngHandle
    from rankedtrees.samplers import unrank_weak
    vals, _ = stats.cohort_values("weak", 25, "steps", 30, seed=6)
    rng = RngHandle(6, 0)
    g = exact.weak_count(25)
    direct = [stats.measure_param(unrank_weak(25, rng.rand_below(g)), "steps") for _ in range(30)]
    assert vals.tolist() == direct


def test_report_json_shape_and_rationals():
    rep = stats.run_cohort("strong", 10, "internal-nodes", 1200, seed=0)
    doc = json.loads(rep.to_json())
    assert doc["theory"]["exact_mean"] == "19079/2520"
    assert Fraction(doc["theory"]["exact_mean"]) == 10 - sum(Fraction(1, k) for k in range(1, 11)) \
        + Fraction(1, 2)
    assert sum(doc["histogram"].values()) == 1200
    assert doc["bits"]["total"] == rep.bits_total > 0
    assert rep.histogram_csv().startswith("value,count\n")


def test_weak_steps_theory_linear():
    th = stats.theory_for("weak", 2000, "steps")
    assert th.exact_mean is None
    assert th.asymptotic_mean == pytest.approx(2000 / (2 * math.log(2)))


def test_root_arity_theory_pmf_sums_to_one():
    th = stats.theory_for("strong", 40, "root-arity")
    assert sum(th.pmf.values(), Fraction(0)) == 1


def test_chi_square_basic():
    res = stats.chi_square_uniform([100, 100, 100, 100])
    assert res.statistic == 0 and res.passed and res.dof == 3
    assert res.threshold == pytest.approx(sps.chi2.ppf(0.99, 3))
    assert not stats.chi_square_uniform([400, 0, 0, 0]).passed


def test_chi_square_pools_small_cells():
    res = stats.chi_square([50, 48, 1, 1], [49, 49, 1, 1])
    assert res.dof == 2


def test_chi_square_histogram_outside_support_fails():
    res = stats.chi_square_histogram({0: 5, 9: 1}, {0: Fraction(1)})
    assert not res.passed


def _report_from(values, n=1000):
    values = np.asarray(values, dtype=np.int64)
    return stats.report_from_values("strong", n, "internal-nodes", 0, values, 0, with_theory=False)


def test_normality_accepts_rounded_gaussian():
    rng = np.random.default_rng(0)
    # sd 2.5: the lattice would fail an uncorrected KS test
    vals = np.rint(rng.normal(50, 2.5, 20000))
    rep = _report_from(vals)
    assert stats.normality_check(rep).passed
    assert stats.raw_ks(rep) > sps.kstwo.ppf(0.99, 20000)


def test_normality_rejects_skewed_law():
    rng = np.random.default_rng(1)
    vals = rng.poisson(3, 20000)
    assert not stats.normality_check(_report_from(vals)).passed


def test_normality_preconditions():
    with pytest.raises(ValueError, match="samples"):
        stats.normality_check(_report_from(np.arange(100)))
    with pytest.raises(ValueError, match="n >= 500"):
        stats.normality_check(_report_from(np.arange(20000), n=50))


def test_bit_accounting_rows():
    rows = stats.bit_accounting("strong", [64, 128], 200, seed=2)
    assert [r.n for r in rows] == [64, 128]
    assert all(0.5 < r.ratio < 1.5 for r in rows)
    assert stats.ratio_spread(rows) >= 0


_EXACT_SMALL = [
    ("strong", "internal-nodes", exact.strong_internal_nodes_dist),
    ("strong", "root-arity", exact.strong_root_arity_dist),
    ("strong", "root-leaves", exact.strong_root_leaves_dist),
    ("strong", "binary-nodes", exact.strong_binary_nodes_dist),
    ("weak", "steps", exact.weak_steps_dist),
    ("weak", "weak-internal-nodes", lambda n: exact.weak_internal_nodes_dist(n).row(n)),
]


@pytest.mark.slow
@pytest.mark.parametrize("model, param, dist", _EXACT_SMALL, ids=[f"{m}-{p}" for m, p, _ in _EXACT_SMALL])
def test_histograms_fit_exact_rows_n_le_6(model, param, dist):
    for n in range(1, 7):
        rep = stats.run_cohort(model, n, param, 100_000, seed=100 + n, with_theory=False)
        probs = dict(enumerate(dist(n).probabilities()))
        support = {k for k, p in probs.items() if p}
        if len(support) == 1:
            assert set(rep.histogram) == support
            continue
        res = stats.chi_square_histogram(rep.histogram, probs)
        assert res.passed, (n, res)


@pytest.mark.slow
def test_root_leaves_rare_event_mean():
    n = 1000
    rep = stats.run_cohort("strong", n, "root-leaves", 1_000_000, seed=11, with_theory=False)
    target = 2 * math.e / n
    assert 0.8 * target <= rep.mean <= 1.2 * target


def test_size_two_costs_no_bits():
    for model in ("strong", "weak"):
        param = "internal-nodes" if model == "strong" else "steps"
        _, bits = stats.cohort_values(model, 2, param, 500, seed=0)
        assert bits == 0


def test_weak_rank_bits_match_rejection_cost():
    # one rank draw of w = bit_length(g - 1) bits, accepted with probability g / 2^w > 1/2
    n = 512
    g = exact.weak_count(n)
    w = (g - 1).bit_length()
    _, bits = stats.cohort_values("weak", n, "steps", 2000, seed=5)
    per_tree = bits / 2000
    expected = w * 2**w / g
    assert w <= per_tree < 2 * w
    assert per_tree == pytest.approx(expected, rel=0.02)
