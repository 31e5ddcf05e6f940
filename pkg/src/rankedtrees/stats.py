"""Cohort sampling, parameter measurement and goodness-of-fit checks.

Cohorts are split into chunks of ``CHUNK`` samples; chunk ``c`` draws from
``RngHandle(seed, c)``.  A report therefore depends only on
(model, n, param, samples, seed): not on the worker count, and a cohort is
a prefix of any larger cohort with the same seed.

Significance is fixed at 0.01.  Critical values come from scipy
(``chi2.ppf`` and the exact one-sample ``kstwo.ppf``).
"""

from __future__ import annotations

import enum
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy import stats as sps

from . import exact, kernels
from .exact import E, EULER_GAMMA, LN2, PI2_OVER_6
from .rng import RngHandle
from .samplers import unrank_weak, weak_chain_length
from .tree import LabeledTree, ModelKind

CHUNK = 1000
ALPHA = 0.01


class ParamKind(enum.Enum):
    INTERNAL_NODES = "internal-nodes"
    ROOT_ARITY = "root-arity"
    ROOT_LEAVES = "root-leaves"
    BINARY_NODES = "binary-nodes"
    STEPS = "steps"
    WEAK_INTERNAL_NODES = "weak-internal-nodes"

    @classmethod
    def parse(cls, value) -> "ParamKind":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower().replace("_", "-"))
        except ValueError:
            names = ", ".join(p.value for p in cls)
            raise ValueError(f"unknown parameter {value!r}; expected one of {names}") from None


_STRONG_PARAMS = {ParamKind.INTERNAL_NODES, ParamKind.ROOT_ARITY, ParamKind.ROOT_LEAVES,
                  ParamKind.BINARY_NODES, ParamKind.STEPS}
_WEAK_PARAMS = {ParamKind.STEPS, ParamKind.WEAK_INTERNAL_NODES}


def check_param(model, param) -> tuple[ModelKind, ParamKind]:
    model = ModelKind.parse(model)
    param = ParamKind.parse(param)
    allowed = _STRONG_PARAMS if model is ModelKind.STRONG else _WEAK_PARAMS
    if param not in allowed:
        raise ValueError(f"parameter {param.value!r} is not defined for the {model.value} model")
    return model, param


def measure_param(tree: LabeledTree, param, model=None) -> int:
    param = ParamKind.parse(param)
    if model is not None:
        check_param(model, param)
    arity = tree.arity
    if param in (ParamKind.INTERNAL_NODES, ParamKind.WEAK_INTERNAL_NODES):
        return int(np.count_nonzero(arity))
    if param is ParamKind.STEPS:
        return int(tree.labels.max(initial=0))
    if param is ParamKind.BINARY_NODES:
        return int(np.count_nonzero(arity == 2))
    kids = tree.children(tree.root)
    if param is ParamKind.ROOT_ARITY:
        return int(kids.shape[0])
    return int(np.count_nonzero(arity[kids] == 0))


# cohorts -----------------------------------------------------------------------

_STRONG_COLUMN = {ParamKind.INTERNAL_NODES: 0, ParamKind.STEPS: 0, ParamKind.ROOT_ARITY: 1,
                  ParamKind.ROOT_LEAVES: 2, ParamKind.BINARY_NODES: 3}


def _strong_small(n: int, param: ParamKind) -> int:
    if n == 1:
        return 0
    return {ParamKind.ROOT_ARITY: 2, ParamKind.ROOT_LEAVES: 2}.get(param, 1)


def _chunk(model: str, n: int, param: str, seed: int, index: int, rows: int):
    """Values and bit count for one chunk; top-level so process pools can pickle it."""
    model_k, param_k = check_param(model, param)
    rng = RngHandle(seed, index)
    if model_k is ModelKind.STRONG:
        if n <= 2:
            return np.full(rows, _strong_small(n, param_k), dtype=np.int64), 0
        draws = rng.strong_draws(n, rows)
        # the scan reads the parameters off the draws; tests pin it to the built trees
        values = kernels.strong_params_scan(draws, n)[:, _STRONG_COLUMN[param_k]]
        return np.ascontiguousarray(values), rng.bits
    g = exact.weak_count(n)
    values = np.empty(rows, dtype=np.int64)
    for i in range(rows):
        r = rng.rand_below(g)
        if param_k is ParamKind.STEPS:
            # the max label is the length of the unranking chain
            values[i] = weak_chain_length(n, r)
        else:
            values[i] = measure_param(unrank_weak(n, r), param_k)
    return values, rng.bits


def cohort_values(model, n: int, param, samples: int, seed: int, workers: int = 1):
    """Concatenated per-sample values (chunk order) and total random bits."""
    model, param = check_param(model, param)
    if samples < 1:
        raise ValueError("samples must be at least 1")
    if n < 1:
        raise ValueError("size must be at least 1")
    jobs = [(model.value, n, param.value, seed, c, min(CHUNK, samples - c * CHUNK))
            for c in range(-(-samples // CHUNK))]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_chunk, *zip(*jobs)))
    else:
        results = [_chunk(*job) for job in jobs]
    values = np.concatenate([v for v, _ in results])
    return values, sum(b for _, b in results)


# theory ------------------------------------------------------------------------

EXACT_LIMITS = {
    ParamKind.INTERNAL_NODES: 2000,
    ParamKind.ROOT_ARITY: 2000,
    ParamKind.ROOT_LEAVES: 300,
    ParamKind.BINARY_NODES: 2000,
    ParamKind.STEPS: 600,
    ParamKind.WEAK_INTERNAL_NODES: 300,
}


@dataclass
class Theory:
    exact_mean: Fraction | None = None
    exact_variance: Fraction | None = None
    asymptotic_mean: float | None = None
    asymptotic_variance: float | None = None
    pmf: dict[int, Fraction] | None = None


def theory_for(model, n: int, param) -> Theory:
    model, param = check_param(model, param)
    th = Theory()
    limit = EXACT_LIMITS[param]
    if model is ModelKind.STRONG:
        if param in (ParamKind.INTERNAL_NODES, ParamKind.STEPS):
            if n >= 2:
                th.exact_mean = exact.strong_internal_mean(n)
                th.exact_variance = (exact.strong_internal_variance(n) if n <= limit
                                     else exact.strong_internal_variance_product(n))
                th.asymptotic_mean, th.asymptotic_variance = exact.strong_internal_asymptotics(n)
        elif param is ParamKind.ROOT_ARITY:
            if n >= 2:
                th.pmf = {k: exact.root_arity_probability(n, k) for k in range(2, n + 1)}
                if n <= limit:
                    row = exact.strong_root_arity_dist(n)
                    th.exact_mean, th.exact_variance = row.mean(), row.variance()
        elif param is ParamKind.ROOT_LEAVES:
            if n <= limit:
                row = exact.strong_root_leaves_dist(n)
                th.exact_mean, th.exact_variance = row.mean(), row.variance()
            th.asymptotic_mean, th.asymptotic_variance = exact.strong_root_leaves_asymptotics(n)
        elif param is ParamKind.BINARY_NODES:
            if n >= 3:
                th.exact_mean = exact.strong_binary_mean(n)
                if n <= limit:
                    th.exact_variance = exact.strong_binary_variance(n)
                th.asymptotic_mean, th.asymptotic_variance = exact.strong_binary_asymptotics(n)
        if n <= 2 and th.exact_mean is None:
            v = _strong_small(n, param)
            th.exact_mean, th.exact_variance = Fraction(v), Fraction(0)
        return th
    if param is ParamKind.STEPS:
        if n <= limit:
            row = exact.weak_steps_row_fast(n)
            th.exact_mean, th.exact_variance = row.mean(), row.variance()
        th.asymptotic_mean, th.asymptotic_variance = exact.weak_steps_asymptotics(n)
    else:
        if n <= limit:
            th.exact_mean = exact.weak_internal_mean(n)
            if n <= 60:
                th.exact_variance = exact.weak_internal_nodes_dist(n).row(n).variance()
        th.asymptotic_mean = exact.weak_internal_asymptotic_mean(n)
    return th


# reports -----------------------------------------------------------------------

def _rational(x: Fraction | None):
    return None if x is None else f"{x.numerator}/{x.denominator}"


@dataclass
class SampleReport:
    model: str
    n: int
    param: str
    samples: int
    seed: int
    mean: float
    variance: float
    skewness: float
    histogram: dict[int, int]
    bits_total: int
    theory: Theory = field(default_factory=Theory)

    @property
    def bits_per_tree(self) -> float:
        return self.bits_total / self.samples

    @property
    def std_error(self) -> float:
        return math.sqrt(self.variance / self.samples)

    def to_dict(self) -> dict:
        th = self.theory
        return {
            "model": self.model,
            "n": self.n,
            "param": self.param,
            "samples": self.samples,
            "seed": self.seed,
            "empirical": {"mean": self.mean, "variance": self.variance, "skewness": self.skewness},
            "histogram": {str(k): v for k, v in sorted(self.histogram.items())},
            "theory": {
                "exact_mean": _rational(th.exact_mean),
                "exact_variance": _rational(th.exact_variance),
                "asymptotic_mean": th.asymptotic_mean,
                "asymptotic_variance": th.asymptotic_variance,
                "pmf": None if th.pmf is None else {str(k): _rational(p) for k, p in th.pmf.items()},
            },
            "bits": {"total": self.bits_total, "per_tree": self.bits_per_tree},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def histogram_csv(self) -> str:
        return "value,count\n" + "".join(f"{k},{v}\n" for k, v in sorted(self.histogram.items()))


def summarize(values: np.ndarray) -> tuple[float, float, float, dict[int, int]]:
    vals, counts = np.unique(values, return_counts=True)
    mean = float(values.mean())
    var = float(values.var(ddof=1)) if values.shape[0] > 1 else 0.0
    centered = values - mean
    m2 = float(np.mean(centered ** 2))
    skew = float(np.mean(centered ** 3) / m2 ** 1.5) if m2 > 0 else 0.0
    return mean, var, skew, {int(v): int(c) for v, c in zip(vals, counts)}


def run_cohort(model, n: int, param, samples: int, seed: int, workers: int = 1,
               with_theory: bool = True) -> SampleReport:
    model, param = check_param(model, param)
    values, bits = cohort_values(model, n, param, samples, seed, workers)
    return report_from_values(model, n, param, seed, values, bits, with_theory)


def report_from_values(model, n, param, seed, values, bits, with_theory=True) -> SampleReport:
    model, param = check_param(model, param)
    mean, var, skew, hist = summarize(values)
    return SampleReport(model.value, n, param.value, int(values.shape[0]), seed, mean, var, skew,
                        hist, int(bits), theory_for(model, n, param) if with_theory else Theory())


# goodness of fit -----------------------------------------------------------------

@dataclass(frozen=True)
class GofResult:
    test: str  # "chi-square" or "kolmogorov-smirnov"
    statistic: float
    dof: int  # degrees of freedom (chi-square) or sample size (KS)
    threshold: float
    passed: bool


def chi_square(observed: Sequence[float], expected: Sequence[float]) -> GofResult:
    """Pearson statistic; cells with expected count below 5 are pooled into one."""
    obs = np.asarray(observed, dtype=float)
    exp = np.asarray(expected, dtype=float)
    small = exp < 5
    if small.any() and small.sum() < exp.shape[0]:
        obs = np.append(obs[~small], obs[small].sum())
        exp = np.append(exp[~small], exp[small].sum())
        if exp[-1] == 0:
            obs, exp = obs[:-1], exp[:-1]
    stat = float(np.sum((obs - exp) ** 2 / exp))
    dof = exp.shape[0] - 1
    threshold = float(sps.chi2.ppf(1 - ALPHA, dof))
    return GofResult("chi-square", stat, dof, threshold, stat < threshold)


def chi_square_uniform(counts: Sequence[int]) -> GofResult:
    counts = np.asarray(counts, dtype=float)
    return chi_square(counts, np.full(counts.shape[0], counts.sum() / counts.shape[0]))


def chi_square_histogram(hist: dict[int, int], probs: dict[int, Fraction | float]) -> GofResult:
    """Goodness of fit of a histogram against a pmf given on its full support."""
    total = sum(hist.values())
    stray = set(hist) - {k for k, p in probs.items() if p}
    if stray:
        return GofResult("chi-square", math.inf, 0, 0.0, False)
    keys = sorted(k for k, p in probs.items() if p)
    return chi_square([hist.get(k, 0) for k in keys], [total * float(probs[k]) for k in keys])


def _smoothed_ks(hist: dict[int, int], mean: float, sd: float) -> float:
    """sup |F - Phi((x-mean)/sd)| where F spreads each integer atom over [v-1/2, v+1/2]."""
    total = sum(hist.values())
    keys = sorted(hist)
    best = 0.0
    cdf = 0.0
    prev_right = None
    for v in keys:
        left, right = v - 0.5, v + 0.5
        if prev_right is not None and left > prev_right:
            # flat gap between atoms: check both ends
            for x in (prev_right, left):
                best = max(best, abs(cdf - sps.norm.cdf((x - mean) / sd)))
        slope = hist[v] / total
        pts = [left, right]
        # interior extremum where the normal density matches the slope
        arg = slope * sd * math.sqrt(2 * math.pi)
        if 0 < arg < 1:
            z = math.sqrt(-2 * math.log(arg))
            for x in (mean - z * sd, mean + z * sd):
                if left < x < right:
                    pts.append(x)
        for x in pts:
            f = cdf + slope * (x - left)
            best = max(best, abs(f - sps.norm.cdf((x - mean) / sd)))
        cdf += slope
        prev_right = right
    lo, hi = keys[0] - 0.5, keys[-1] + 0.5
    best = max(best, sps.norm.cdf((lo - mean) / sd), sps.norm.sf((hi - mean) / sd))
    return best


MIN_NORMAL_SAMPLES = 10_000
MIN_NORMAL_SIZE = 500


def normality_check(report: SampleReport) -> GofResult:
    """KS distance of the standardized cohort to N(0, 1).

    The cohort is standardized by its own mean and standard deviation.  An
    integer-valued sample is compared through its continuity-corrected
    CDF (each value's mass spread uniformly over a unit interval, which
    adds 1/12 to the variance); otherwise the lattice alone would put the
    KS distance near 1/(sd sqrt(2 pi)) however Gaussian the shape is.
    """
    if report.samples < MIN_NORMAL_SAMPLES:
        raise ValueError(f"normality check needs at least {MIN_NORMAL_SAMPLES} samples")
    if report.n < MIN_NORMAL_SIZE:
        raise ValueError(f"normality check needs n >= {MIN_NORMAL_SIZE}")
    N = report.samples
    pop_var = report.variance * (N - 1) / N
    if pop_var <= 0:
        raise ValueError("degenerate cohort (point mass)")
    sd = math.sqrt(pop_var + 1.0 / 12.0)
    stat = _smoothed_ks(report.histogram, report.mean, sd)
    threshold = float(sps.kstwo.ppf(1 - ALPHA, N))
    return GofResult("kolmogorov-smirnov", stat, N, threshold, stat < threshold)


def raw_ks(report: SampleReport) -> float:
    """Uncorrected KS distance of the standardized lattice sample, for comparison."""
    N = report.samples
    sd = math.sqrt(report.variance * (N - 1) / N)
    best = 0.0
    cdf = 0.0
    for v in sorted(report.histogram):
        z = (v - report.mean) / sd
        phi = sps.norm.cdf(z)
        best = max(best, abs(cdf - phi))
        cdf += report.histogram[v] / N
        best = max(best, abs(cdf - phi))
    return best


# bit accounting ------------------------------------------------------------------

@dataclass(frozen=True)
class BitRow:
    n: int
    mean_bits: float
    ratio: float | None  # mean bits / (n log2 n)


def bit_accounting(model, n_list: Sequence[int], samples: int, seed: int) -> list[BitRow]:
    model = ModelKind.parse(model)
    if not n_list:
        raise ValueError("n_list must not be empty")
    param = ParamKind.INTERNAL_NODES if model is ModelKind.STRONG else ParamKind.STEPS
    rows = []
    for n in n_list:
        _, bits = cohort_values(model, n, param, samples, seed)
        mean_bits = bits / samples
        ratio = mean_bits / (n * math.log2(n)) if n > 1 else None
        rows.append(BitRow(n, mean_bits, ratio))
    return rows


def ratio_spread(rows: Sequence[BitRow]) -> float:
    """max/min - 1 over the fitted ratios."""
    ratios = [r.ratio for r in rows if r.ratio]
    return max(ratios) / min(ratios) - 1.0


__all__ = [
    "ParamKind", "SampleReport", "GofResult", "Theory", "BitRow", "measure_param", "run_cohort",
    "cohort_values", "theory_for", "normality_check", "chi_square", "chi_square_uniform",
    "chi_square_histogram", "bit_accounting", "ratio_spread", "raw_ks", "check_param",
    "report_from_values", "E", "EULER_GAMMA", "LN2", "PI2_OVER_6",
]
