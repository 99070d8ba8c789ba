"""Limit objects for the largest percolation clusters, plus fit statistics.

Three intensity measures describe the ranked non-root cluster sizes in the
supercritical regime, depending on the step law of -ln V_1:

* :class:`ContinuousX2`   lam * x^{-2} dx on (0, inf); the non-lattice case.
  The reciprocals of the ranked atoms then have i.i.d. Exp(lam) spacings.
* :class:`LatticeXi`      scale * Xi(dx) where Xi puts geometric mass on the
  grid {exp(a*(phase - m)) : m integer}, span a, phase in [0, 1):
  Xi([x, inf)) = a/(1 - e^{-a}) * exp(a*floor(phase - ln(x)/a) - a*phase).
* :class:`LatticeLambda`  scale * Lambda(dx) on the grid {d^{phase - m}}:
  Lambda([x, inf)) = d^{-phase + floor(phase - log_d x) + 1} / (d - 1).

``tail(x)`` is the intensity of [x, inf).  Ranked atoms are sampled by
inversion: with E_1, E_2, ... i.i.d. standard exponentials and T the tail,
x_i = T^{-1}(E_1 + ... + E_i), where T^{-1} is the generalized inverse
sup{x : T(x) >= y} (a closed-form grid point for the lattice laws, so equal
atoms repeat as they should).

The goodness-of-fit helpers are self-contained: a one-sample
Kolmogorov-Smirnov distance with the asymptotic Kolmogorov p-value series,
and a chi-square test of count matrices against Poisson marginals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np
from scipy import stats as _scipy_stats


def exponential_rate(c: float, mu: float, alpha: float = 1.0) -> float:
    """Spacing rate lam = c * alpha * mu^{-1} * e^{-c/mu} of the reciprocal atoms."""
    if c <= 0 or mu <= 0 or alpha <= 0:
        raise ValueError("c, mu, alpha must all be positive")
    return c * alpha * math.exp(-c / mu) / mu


def _check_positive_x(x):
    if np.any(np.asarray(x) <= 0.0):
        raise ValueError("tail is defined for x > 0 only")


@dataclass(frozen=True)
class ContinuousX2:
    """Intensity rate * x^{-2} dx."""

    rate: float

    def __post_init__(self):
        if self.rate <= 0:
            raise ValueError("rate must be positive")

    def tail(self, x):
        _check_positive_x(x)
        return self.rate / np.asarray(x, dtype=np.float64)

    def inverse_tail(self, y):
        return self.rate / np.asarray(y, dtype=np.float64)


@dataclass(frozen=True)
class LatticeXi:
    """scale * Xi_phase on the grid {exp(span*(phase - m)) : m in Z}."""

    scale: float
    span: float
    phase: float

    def __post_init__(self):
        if self.scale <= 0 or self.span <= 0:
            raise ValueError("scale and span must be positive")
        if not 0.0 <= self.phase < 1.0:
            raise ValueError("phase must lie in [0, 1)")

    @property
    def _front(self) -> float:
        return self.scale * self.span / (1.0 - math.exp(-self.span))

    def tail(self, x):
        _check_positive_x(x)
        x = np.asarray(x, dtype=np.float64)
        a, r = self.span, self.phase
        return self._front * np.exp(a * np.floor(r - np.log(x) / a) - a * r)

    def inverse_tail(self, y):
        # smallest integer m with tail(exp(a*(phase-m))) >= y
        y = np.asarray(y, dtype=np.float64)
        a, r = self.span, self.phase
        m = np.ceil(r + np.log(y / self._front) / a)
        return np.exp(a * (r - m))

    def grid_point(self, m: int) -> float:
        return math.exp(self.span * (self.phase - m))


@dataclass(frozen=True)
class LatticeLambda:
    """scale * Lambda_phase on the grid {d^{phase - m} : m in Z}."""

    scale: float
    d: int
    phase: float

    def __post_init__(self):
        if self.scale <= 0:
            raise ValueError("scale must be positive")
        if self.d < 2:
            raise ValueError("need d >= 2")
        if not 0.0 <= self.phase < 1.0:
            raise ValueError("phase must lie in [0, 1)")

    def tail(self, x):
        _check_positive_x(x)
        x = np.asarray(x, dtype=np.float64)
        r, d = self.phase, self.d
        log_d_x = np.log(x) / math.log(d)
        return self.scale * np.power(float(d), -r + np.floor(r - log_d_x) + 1) / (d - 1)

    def inverse_tail(self, y):
        y = np.asarray(y, dtype=np.float64)
        r, d = self.phase, self.d
        m = np.ceil(r - 1.0 + np.log(y * (d - 1) / self.scale) / math.log(d))
        return np.power(float(d), r - m)

    def grid_point(self, m: int) -> float:
        return float(self.d) ** (self.phase - m)


LimitLaw = Union[ContinuousX2, LatticeXi, LatticeLambda]


def sample_top_atoms(law: LimitLaw, k: int, rng: np.random.Generator) -> np.ndarray:
    """Largest k atoms of the Poisson process with the law's intensity.

    Inversion through the generalized inverse of the tail; for lattice laws
    the output is non-increasing with possible repeats (multiple atoms on
    one grid point).
    """
    if k < 1:
        raise ValueError("need k >= 1")
    arrivals = np.cumsum(rng.exponential(size=k))
    return np.asarray(law.inverse_tail(arrivals), dtype=np.float64)


def ks_statistic(sample, cdf: Callable) -> float:
    """One-sample Kolmogorov-Smirnov sup distance against a reference CDF."""
    x = np.sort(np.asarray(sample, dtype=np.float64))
    if x.size == 0:
        raise ValueError("empty sample")
    n = x.size
    f = np.asarray(cdf(x), dtype=np.float64)
    grid = np.arange(n, dtype=np.float64)
    d_plus = np.max((grid + 1.0) / n - f)
    d_minus = np.max(f - grid / n)
    return float(max(d_plus, d_minus))


def kolmogorov_pvalue(statistic: float, n: int, min_terms: int = 20) -> float:
    """Asymptotic P(D_n > statistic) from the Kolmogorov distribution series.

    Uses 2 * sum_{j>=1} (-1)^{j-1} exp(-2 j^2 t^2) with t = sqrt(n) * D,
    summing at least ``min_terms`` terms (more until they vanish).
    """
    t = math.sqrt(n) * statistic
    if t <= 0.0:
        return 1.0
    total = 0.0
    sign = 1.0
    j = 1
    while True:
        term = math.exp(-2.0 * (j * t) ** 2)
        total += sign * term
        if j >= min_terms and term < 1e-18:
            break
        sign = -sign
        j += 1
        if j > 10_000:
            break
    return float(min(1.0, max(0.0, 2.0 * total)))


def ks_test(sample, cdf: Callable) -> tuple[float, float]:
    """(D, asymptotic p-value) for a one-sample KS test."""
    d = ks_statistic(sample, cdf)
    return d, kolmogorov_pvalue(d, len(sample))


@dataclass(frozen=True)
class PoissonColumnResult:
    mean: float
    statistic: float
    dof: int
    pvalue: float
    n_cells: int


@dataclass(frozen=True)
class PoissonIncrementReport:
    columns: tuple[PoissonColumnResult, ...]
    covariance: np.ndarray

    @property
    def min_pvalue(self) -> float:
        return min(col.pvalue for col in self.columns)


def poisson_increment_test(counts, expected_means) -> PoissonIncrementReport:
    """Chi-square of each count column against a Poisson pmf of given mean.

    ``counts`` has one row per replication and one column per disjoint
    interval.  Cells are pooled from the right until every expected count is
    at least 5; the dof is (#cells - 1) since the means are given, not
    fitted.  The empirical column covariance is attached as an independence
    diagnostic.
    """
    counts = np.atleast_2d(np.asarray(counts, dtype=np.int64))
    means = np.asarray(expected_means, dtype=np.float64)
    if counts.size == 0 or counts.shape[1] != means.size:
        raise ValueError("counts must be R x len(expected_means), R >= 1")
    if counts.min() < 0 or np.any(means < 0):
        raise ValueError("counts and means must be non-negative")
    n_rep = counts.shape[0]
    columns = []
    for j, lam in enumerate(means):
        col = counts[:, j]
        if lam == 0.0:
            ok = not np.any(col)
            columns.append(PoissonColumnResult(
                mean=0.0, statistic=0.0 if ok else math.inf,
                dof=0, pvalue=1.0 if ok else 0.0, n_cells=1))
            continue
        kmax = int(max(col.max(), _scipy_stats.poisson.ppf(1.0 - 1e-9, lam))) + 1
        pmf = _scipy_stats.poisson.pmf(np.arange(kmax), lam)
        probs = np.append(pmf, max(0.0, 1.0 - pmf.sum()))  # open tail cell
        observed = np.bincount(col, minlength=probs.size).astype(np.float64)
        observed = observed[: probs.size]
        exp_counts = n_rep * probs
        obs_cells, exp_cells = _pool_cells(observed, exp_counts)
        stat = float(np.sum((obs_cells - exp_cells) ** 2 / exp_cells))
        dof = len(obs_cells) - 1
        pvalue = float(_scipy_stats.chi2.sf(stat, dof)) if dof > 0 else 1.0
        columns.append(PoissonColumnResult(
            mean=float(lam), statistic=stat, dof=dof,
            pvalue=pvalue, n_cells=len(obs_cells)))
    cov = np.cov(counts, rowvar=False) if n_rep > 1 else np.zeros((means.size, means.size))
    return PoissonIncrementReport(columns=tuple(columns), covariance=np.atleast_2d(cov))


def _pool_cells(observed, expected, min_expected: float = 5.0):
    """Greedy left-to-right pooling so every pooled cell has expected >= 5."""
    obs_groups, exp_groups = [], []
    acc_o = acc_e = 0.0
    for o, e in zip(observed, expected):
        acc_o += o
        acc_e += e
        if acc_e >= min_expected:
            obs_groups.append(acc_o)
            exp_groups.append(acc_e)
            acc_o = acc_e = 0.0
    if acc_e > 0.0:
        if exp_groups:
            obs_groups[-1] += acc_o
            exp_groups[-1] += acc_e
        else:
            obs_groups.append(acc_o)
            exp_groups.append(acc_e)
    return np.asarray(obs_groups), np.asarray(exp_groups)
