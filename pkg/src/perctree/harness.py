"""Seeded, replicated experiment driver with machine-readable reports.

Six experiment kinds reproduce the desk-scale limit statements:

* ``theorem1``   ball count of the giant root cluster and exponential
                 spacings of the ranked non-root clusters (non-lattice laws).
* ``theorem2``   the same on vertex counts, with the vertex-per-ball factor
                 alpha estimated from the largest grid point.
* ``theorem3``   complete d-ary trees: giant-cluster constant, lattice tail
                 of the largest non-root cluster, and the removed-height law.
* ``theorem4``   lattice split trees: giant-cluster constant plus the
                 geometric-grid tail of the largest non-root cluster.
* ``prop_m``     law of large numbers for the number of heavy subtrees.
* ``process_n``  Poisson limit of the removed-heavy-subtree counting process.

One replication = generate -> percolate -> extract clusters, reduced to a
small record.  A record is a pure function of (tree law, c, t-grid, top_k,
seed), with the per-replication seed derived from
(master_seed, grid value, replication index) via the documented splitmix64
chain, so records are memoized process-wide: experiments whose configs
overlap (same law, same grid point, same t-grid, lower replication count)
reuse each other's work and still produce byte-identical reports.
"""

from __future__ import annotations

import configparser
import csv
import io
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .rng import derive_seed, make_generator
from .split_vector import SplitVectorSpec, entropy_mu, lattice_span
from .split_tree import SplitTreeParams, generate, subtree_ball_counts, m_statistic
from .percolation import PercolationParams, percolate, clusters, counting_process
from .regular_tree import RegularParams, percolate_regular, tau_survival_exact
from .limit_laws import (LatticeXi, LatticeLambda,
                         exponential_rate, ks_test, poisson_increment_test)

EXPERIMENTS = ("theorem1", "theorem2", "theorem3", "theorem4", "prop_m", "process_n")

SCHEMA_VERSION = 1


class ConfigError(ValueError):
    """Invalid experiment configuration."""


def frac(x: float) -> float:
    """Fractional part in [0, 1)."""
    return x - math.floor(x)


# ---------------------------------------------------------------------------
# configuration


@dataclass(frozen=True)
class ExperimentConfig:
    """Full description of one replicated experiment.

    Split-tree experiments need ``vector_spec`` (+ bucket parameters s, s0,
    s1) and ``n_grid``; the regular-tree experiment needs ``d`` and
    ``h_grid``.  ``intervals`` (process_n only) selects the disjoint
    increment intervals; endpoints must be t_grid members, default is
    consecutive t_grid pairs.
    """

    experiment: str
    c: float
    replications: int
    master_seed: int
    vector_spec: Optional[SplitVectorSpec] = None
    s: int = 1
    s0: int = 1
    s1: int = 0
    n_grid: tuple = ()
    d: Optional[int] = None
    h_grid: tuple = ()
    t_grid: tuple = ()
    intervals: Optional[tuple] = None
    top_k: int = 10
    out: Optional[str] = None

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}")
        if self.replications < 1:
            raise ConfigError("need at least one replication")
        for grid, name in ((self.n_grid, "n_grid"), (self.h_grid, "h_grid")):
            if any(b <= a for a, b in zip(grid, grid[1:])):
                raise ConfigError(f"{name} must be strictly increasing")
        if any(t < 0 for t in self.t_grid) or \
                any(b < a for a, b in zip(self.t_grid, self.t_grid[1:])):
            raise ConfigError("t_grid must be non-negative and non-decreasing")
        if self.experiment == "theorem3":
            if self.d is None or not self.h_grid:
                raise ConfigError("theorem3 needs d and h_grid")
        else:
            if self.vector_spec is None or not self.n_grid:
                raise ConfigError(f"{self.experiment} needs vector_spec and n_grid")
        if self.intervals is not None:
            for lo, hi in self.intervals:
                if lo >= hi or lo not in self.t_grid or hi not in self.t_grid:
                    raise ConfigError("interval endpoints must be increasing t_grid members")

    # -- flat key-value config file round trip ------------------------------

    def to_file(self, path) -> None:
        ini = configparser.ConfigParser()
        ini["experiment"] = {
            "kind": self.experiment,
            "c": repr(float(self.c)),
            "replications": str(self.replications),
            "master_seed": str(self.master_seed),
            "t_grid": " ".join(repr(float(t)) for t in self.t_grid),
            "top_k": str(self.top_k),
        }
        if self.n_grid:
            ini["experiment"]["n_grid"] = " ".join(str(n) for n in self.n_grid)
        if self.h_grid:
            ini["experiment"]["h_grid"] = " ".join(str(h) for h in self.h_grid)
        if self.intervals:
            ini["experiment"]["intervals"] = " ".join(
                f"{repr(float(a))}:{repr(float(b))}" for a, b in self.intervals)
        if self.out:
            ini["experiment"]["out"] = self.out
        if self.vector_spec is not None:
            ini["split_vector"] = self.vector_spec.to_config()
            ini["split_tree"] = {"s": str(self.s), "s0": str(self.s0),
                                 "s1": str(self.s1)}
        if self.d is not None:
            ini["regular"] = {"d": str(self.d)}
        with open(path, "w") as fh:
            ini.write(fh)

    @classmethod
    def from_file(cls, path, **overrides) -> "ExperimentConfig":
        ini = configparser.ConfigParser()
        read = ini.read(path)
        if not read:
            raise ConfigError(f"cannot read config file {path}")
        exp = ini["experiment"]
        kwargs = {
            "experiment": exp.get("kind"),
            "c": float(exp.get("c")),
            "replications": int(exp.get("replications")),
            "master_seed": int(exp.get("master_seed", "0")),
            "t_grid": tuple(float(t) for t in exp.get("t_grid", "").split()),
            "top_k": int(exp.get("top_k", "10")),
            "out": exp.get("out", None),
        }
        if exp.get("n_grid"):
            kwargs["n_grid"] = tuple(int(n) for n in exp.get("n_grid").split())
        if exp.get("h_grid"):
            kwargs["h_grid"] = tuple(int(h) for h in exp.get("h_grid").split())
        if exp.get("intervals"):
            pairs = []
            for tok in exp.get("intervals").split():
                a, b = tok.split(":")
                pairs.append((float(a), float(b)))
            kwargs["intervals"] = tuple(pairs)
        if ini.has_section("split_vector"):
            kwargs["vector_spec"] = SplitVectorSpec.from_config(dict(ini["split_vector"]))
            tree = ini["split_tree"] if ini.has_section("split_tree") else {}
            kwargs["s"] = int(tree.get("s", "1"))
            kwargs["s0"] = int(tree.get("s0", "1"))
            kwargs["s1"] = int(tree.get("s1", "0"))
        if ini.has_section("regular"):
            kwargs["d"] = int(ini["regular"].get("d"))
        kwargs.update(overrides)
        try:
            return cls(**kwargs)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc

    def describe(self) -> dict:
        """JSON-ready echo of the configuration."""
        out = {
            "experiment": self.experiment,
            "c": float(self.c),
            "replications": self.replications,
            "master_seed": self.master_seed,
            "t_grid": [float(t) for t in self.t_grid],
            "top_k": self.top_k,
        }
        if self.n_grid:
            out["n_grid"] = list(self.n_grid)
        if self.h_grid:
            out["h_grid"] = list(self.h_grid)
        if self.intervals:
            out["intervals"] = [[float(a), float(b)] for a, b in self.intervals]
        if self.vector_spec is not None:
            out["split_vector"] = self.vector_spec.to_config()
            out["split_tree"] = {"s": self.s, "s0": self.s0, "s1": self.s1}
        if self.d is not None:
            out["d"] = self.d
        return out


# ---------------------------------------------------------------------------
# replication engine with memoized records


@dataclass(frozen=True)
class SplitRecord:
    seed: int
    n: int
    n_vertices: int
    root_balls: int
    root_vertices: int
    top_balls: tuple
    top_vertices: tuple
    tau_depths: tuple
    n_early: tuple
    counting: tuple
    m_stats: tuple

    def to_json_dict(self, c: float) -> dict:
        d = {"seed": self.seed, "n": self.n, "c": c,
             "C0": self.root_balls, "C0_hat": self.root_vertices,
             "C": list(self.top_balls), "C_hat": list(self.top_vertices),
             "tau_depths": list(self.tau_depths), "n_early": list(self.n_early),
             "N_vertices": self.n_vertices,
             "N_t": list(self.counting), "M_t": list(self.m_stats)}
        return d


@dataclass(frozen=True)
class RegularRecord:
    seed: int
    d: int
    h: int
    root_size: int
    top_sizes: tuple
    tau_first: tuple
    n_clusters: int
    total: int

    def to_json_dict(self, c: float) -> dict:
        return {"seed": self.seed, "d": self.d, "h": self.h, "c": c,
                "G0": self.root_size, "G": list(self.top_sizes),
                "tau": list(self.tau_first), "n_clusters": self.n_clusters}


_SPLIT_CACHE: dict = {}
_REGULAR_CACHE: dict = {}


def clear_caches() -> None:
    """Drop all memoized replication records (tests use this to force fresh runs)."""
    _SPLIT_CACHE.clear()
    _REGULAR_CACHE.clear()


def simulate_split_replication(spec: SplitVectorSpec, s: int, s0: int, s1: int,
                               n: int, c: float, t_grid: tuple, top_k: int,
                               seed: int) -> SplitRecord:
    """One generate -> percolate -> clusters replication, memoized by its key."""
    key = (spec.kind, spec.b, spec.multiset, s, s0, s1, n, c,
           tuple(t_grid), top_k, seed)
    hit = _SPLIT_CACHE.get(key)
    if hit is not None:
        return hit
    rng = make_generator(seed)
    params = SplitTreeParams(spec.b, s, s0, s1, spec, n)
    tree = generate(params, rng)
    sub = subtree_ball_counts(tree)
    m_stats = tuple(m_statistic(sub, n, t) for t in t_grid)
    mask = percolate(tree, PercolationParams.split_regime(c, n), rng)
    report = clusters(tree, mask, subtree_counts=sub)
    counting = tuple(int(x) for x in counting_process(report, n, t_grid))
    record = SplitRecord(
        seed=seed, n=n, n_vertices=tree.n_vertices,
        root_balls=report.root_balls, root_vertices=report.root_vertices,
        top_balls=tuple(int(x) for x in report.ranked_balls[:top_k]),
        top_vertices=tuple(int(x) for x in report.ranked_vertices[:top_k]),
        tau_depths=tuple(int(x) for x in report.removed_depths[:top_k]),
        n_early=tuple(int(x) for x in report.removed_subtree_balls[:top_k]),
        counting=counting, m_stats=m_stats)
    _SPLIT_CACHE[key] = record
    return record


def simulate_regular_replication(d: int, h: int, c: float, top_k: int,
                                 seed: int) -> RegularRecord:
    key = (d, h, c, top_k, seed)
    hit = _REGULAR_CACHE.get(key)
    if hit is not None:
        return hit
    params = RegularParams(d, h, c)
    rep = percolate_regular(params, make_generator(seed))
    record = RegularRecord(
        seed=seed, d=d, h=h, root_size=rep.root_size,
        top_sizes=tuple(int(x) for x in rep.ranked[:top_k]),
        tau_first=tuple(int(x) for x in rep.tau[:top_k]),
        n_clusters=1 + rep.tau.size, total=rep.total)
    _REGULAR_CACHE[key] = record
    return record


def _worker_count() -> int:
    raw = os.environ.get("PERCTREE_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _map_replications(fn, seeds) -> list:
    """Run one replication per seed, optionally on a thread pool.

    Results are folded in replication-index order, so the worker count never
    changes the output (records are pure functions of their seed).
    """
    workers = _worker_count()
    if workers == 1 or len(seeds) < 2:
        return [fn(seed) for seed in seeds]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, seeds))


def _split_records(config: ExperimentConfig, n: int) -> list:
    seeds = [derive_seed(config.master_seed, n, r)
             for r in range(config.replications)]
    return _map_replications(
        lambda seed: simulate_split_replication(
            config.vector_spec, config.s, config.s0, config.s1, n, config.c,
            config.t_grid, config.top_k, seed),
        seeds)


def _regular_records(config: ExperimentConfig, h: int) -> list:
    seeds = [derive_seed(config.master_seed, h, r)
             for r in range(config.replications)]
    return _map_replications(
        lambda seed: simulate_regular_replication(
            config.d, h, config.c, config.top_k, seed),
        seeds)


# ---------------------------------------------------------------------------
# report container


@dataclass
class ExperimentReport:
    experiment: str
    config: dict
    master_seed: int
    constants: dict = field(default_factory=dict)
    grid: list = field(default_factory=list)
    tests: list = field(default_factory=list)
    records: list = field(default_factory=list)
    schema_version: int = SCHEMA_VERSION

    def grid_entry(self, point) -> dict:
        for entry in self.grid:
            if entry.get("n", entry.get("h")) == point:
                return entry
        raise KeyError(f"no grid entry for {point}")

    def grid_values(self, stat: str) -> list:
        return [entry[stat] for entry in self.grid]

    def tests_named(self, name: str) -> list:
        return [t for t in self.tests if t["name"] == name]

    def to_json(self) -> str:
        payload = {
            "schema_version": self.schema_version,
            "experiment": self.experiment,
            "master_seed": self.master_seed,
            "config": self.config,
            "constants": self.constants,
            "grid": self.grid,
            "tests": self.tests,
            "records_file": "records.jsonl",
        }
        return json.dumps(payload, sort_keys=True, indent=2) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["experiment", "n_or_h", "stat", "value", "stderr",
                         "target", "p_value", "seed"])
        def fmt(value):
            return "" if value is None else repr(value)

        for entry in self.grid:
            point = entry.get("n", entry.get("h"))
            for stat in sorted(entry):
                if stat in ("n", "h") or not isinstance(entry[stat], (int, float)):
                    continue
                writer.writerow([self.experiment, point, stat, repr(entry[stat]),
                                 "", "", "", self.master_seed])
        for t in self.tests:
            writer.writerow([self.experiment, t.get("n", t.get("h", "")),
                             t["name"], fmt(t.get("statistic")),
                             fmt(t.get("stderr")), fmt(t.get("target")),
                             fmt(t.get("p_value")), self.master_seed])
        return buf.getvalue()

    def records_jsonl(self) -> str:
        return "".join(json.dumps(r, sort_keys=True) + "\n" for r in self.records)

    def write(self, out_dir) -> None:
        """Write report.json, report.csv, records.jsonl atomically."""
        os.makedirs(out_dir, exist_ok=True)
        for name, payload in (("report.json", self.to_json()),
                              ("report.csv", self.to_csv()),
                              ("records.jsonl", self.records_jsonl())):
            tmp = os.path.join(out_dir, name + ".tmp")
            with open(tmp, "w") as fh:
                fh.write(payload)
            os.replace(tmp, os.path.join(out_dir, name))


def _mean_stderr(values) -> tuple:
    arr = np.asarray(values, dtype=np.float64)
    se = float(arr.std(ddof=1) / math.sqrt(arr.size)) if arr.size > 1 else float("inf")
    return float(arr.mean()), se


_MU_SEED_TAG = 0x6D75  # distinguishes the mu-estimation stream
_MU_SAMPLES = 200_000


def _mu_constants(config: ExperimentConfig) -> dict:
    """Closed-form mu plus a seeded Monte Carlo estimate as a cross-check."""
    mu = entropy_mu(config.vector_spec)
    est = entropy_mu(config.vector_spec, mc_samples=_MU_SAMPLES,
                     rng=make_generator(derive_seed(config.master_seed,
                                                    _MU_SEED_TAG)))
    return {"mu": mu, "mu_mc": est.estimate, "mu_mc_stderr": est.stderr}


# ---------------------------------------------------------------------------
# experiment runners


def _require_non_lattice(config):
    if lattice_span(config.vector_spec) is not None:
        raise ConfigError(f"{config.experiment} needs a non-lattice split-vector law")


def _giant_cluster_points(config, attr, target, lam, scale_attr_top):
    """Shared theorem1/theorem2 per-grid-point analysis."""
    grid_entries, tests, records = [], [], []
    for n in config.n_grid:
        recs = _split_records(config, n)
        records.extend(r.to_json_dict(config.c) for r in recs)
        log_n = math.log(n)
        mean, se = _mean_stderr([getattr(r, attr) / n for r in recs])
        entry = {"n": n, "mean": mean, "stderr": se, "target": target,
                 "abs_error": abs(mean - target)}
        top1 = [n / (getattr(r, scale_attr_top)[0] * log_n)
                for r in recs if len(getattr(r, scale_attr_top)) >= 1]
        spacing = [n / (getattr(r, scale_attr_top)[1] * log_n)
                   - n / (getattr(r, scale_attr_top)[0] * log_n)
                   for r in recs if len(getattr(r, scale_attr_top)) >= 2]
        exp_cdf = lambda x: 1.0 - np.exp(-lam * np.asarray(x))
        if top1:
            d, p = ks_test(top1, exp_cdf)
            tests.append({"name": "ks_reciprocal_top1", "n": n, "statistic": d,
                          "p_value": p, "n_samples": len(top1), "target": lam})
        if spacing:
            d, p = ks_test(spacing, exp_cdf)
            tests.append({"name": "ks_spacing_top2", "n": n, "statistic": d,
                          "p_value": p, "n_samples": len(spacing), "target": lam})
        grid_entries.append(entry)
    return grid_entries, tests, records


def run_theorem1(config: ExperimentConfig) -> ExperimentReport:
    """Giant-cluster constant and ranked-cluster spacings, ball counts."""
    if config.experiment != "theorem1":
        raise ConfigError("config is not a theorem1 config")
    _require_non_lattice(config)
    constants = _mu_constants(config)
    mu = constants["mu"]
    target = math.exp(-config.c / mu)
    lam = exponential_rate(config.c, mu, 1.0)
    report = ExperimentReport("theorem1", config.describe(), config.master_seed)
    report.constants = dict(constants, target=target)
    report.constants["lambda"] = lam
    report.grid, report.tests, report.records = _giant_cluster_points(
        config, "root_balls", target, lam, "top_balls")
    if config.out:
        report.write(config.out)
    return report


def run_theorem2(config: ExperimentConfig) -> ExperimentReport:
    """Vertex-count variant; alpha estimated at the largest grid point."""
    if config.experiment != "theorem2":
        raise ConfigError("config is not a theorem2 config")
    _require_non_lattice(config)
    constants = _mu_constants(config)
    mu = constants["mu"]
    n_max = config.n_grid[-1]
    alpha_vals = [r.n_vertices / n_max for r in _split_records(config, n_max)]
    alpha_hat, alpha_se = _mean_stderr(alpha_vals)
    target = alpha_hat * math.exp(-config.c / mu)
    lam = exponential_rate(config.c, mu, alpha_hat)
    lam_se = lam / alpha_hat * alpha_se if alpha_hat > 0 else float("inf")
    report = ExperimentReport("theorem2", config.describe(), config.master_seed)
    report.constants = dict(constants, alpha_hat=alpha_hat,
                            alpha_stderr=alpha_se, target=target,
                            lambda_stderr=lam_se)
    report.constants["lambda"] = lam
    report.grid, report.tests, report.records = _giant_cluster_points(
        config, "root_vertices", target, lam, "top_vertices")
    if config.out:
        report.write(config.out)
    return report


_LATTICE_GRID_OFFSETS = range(-2, 4)


def _lattice_top1_rows(scaled_top1, law, grid_points):
    """Empirical P(x1 >= x) against 1 - exp(-tail(x)) at off-grid x values."""
    rows = []
    sample = np.asarray(scaled_top1)
    for x in grid_points:
        target = 1.0 - math.exp(-float(law.tail(x)))
        emp = float(np.mean(sample >= x)) if sample.size else float("nan")
        se = math.sqrt(max(target * (1 - target), 1e-12) / max(sample.size, 1))
        rows.append({"name": f"lattice_top1_tail[x={x:.6g}]", "x": float(x),
                     "target": target, "statistic": emp,
                     "stderr": se, "n_samples": int(sample.size)})
    return rows


def run_theorem4(config: ExperimentConfig) -> ExperimentReport:
    """Lattice split trees: giant cluster plus geometric-grid top-cluster law."""
    if config.experiment != "theorem4":
        raise ConfigError("config is not a theorem4 config")
    span = lattice_span(config.vector_spec)
    if span is None:
        raise ConfigError("theorem4 needs a lattice split-vector law")
    constants = _mu_constants(config)
    mu = constants["mu"]
    target = math.exp(-config.c / mu)
    scale = config.c / mu * math.exp(-config.c / mu)
    report = ExperimentReport("theorem4", config.describe(), config.master_seed)
    report.constants = dict(constants, span=span, target=target,
                            xi_scale=scale)
    for n in config.n_grid:
        recs = _split_records(config, n)
        report.records.extend(r.to_json_dict(config.c) for r in recs)
        log_n = math.log(n)
        phase = frac(math.log(log_n) / span)
        mean, se = _mean_stderr([r.root_balls / n for r in recs])
        entry = {"n": n, "mean": mean, "stderr": se, "target": target,
                 "abs_error": abs(mean - target), "varrho": phase}
        law = LatticeXi(scale=scale, span=span, phase=phase)
        scaled = [log_n / n * r.top_balls[0] for r in recs if r.top_balls]
        xs = [math.exp(span * (phase - m + 0.5)) for m in _LATTICE_GRID_OFFSETS]
        for row in _lattice_top1_rows(scaled, law, xs):
            row["n"] = n
            report.tests.append(row)
        report.grid.append(entry)
    if config.out:
        report.write(config.out)
    return report


def run_theorem3(config: ExperimentConfig) -> ExperimentReport:
    """Complete d-ary trees: giant cluster, top-cluster tail, removed heights."""
    if config.experiment != "theorem3":
        raise ConfigError("config is not a theorem3 config")
    d = config.d
    target = d * math.exp(-config.c) / (d - 1)
    scale = config.c * d * math.exp(-config.c) / (d - 1)
    report = ExperimentReport("theorem3", config.describe(), config.master_seed)
    report.constants = {"target": target, "lambda_scale": scale}
    for h in config.h_grid:
        recs = _regular_records(config, h)
        report.records.extend(r.to_json_dict(config.c) for r in recs)
        phase = frac(math.log(h) / math.log(d))
        scaled_g0 = [r.root_size * float(d) ** (-h) for r in recs]
        mean, se = _mean_stderr(scaled_g0)
        report.grid.append({"h": h, "mean": mean, "stderr": se,
                            "target": target, "abs_error": abs(mean - target),
                            "rho": phase})
        law = LatticeLambda(scale=scale, d=d, phase=phase)
        scaled = [h * float(d) ** (-h) * r.top_sizes[0] for r in recs if r.top_sizes]
        xs = [float(d) ** (phase - m + 0.5) for m in _LATTICE_GRID_OFFSETS]
        for row in _lattice_top1_rows(scaled, law, xs):
            row["h"] = h
            report.tests.append(row)
        params = RegularParams(d, h, config.c)
        for i in range(1, min(5, h) + 1):
            emp = float(np.mean([1.0 if (not r.tau_first or r.tau_first[0] > i)
                                 else 0.0 for r in recs]))
            exact = tau_survival_exact(params, i)
            se_tau = math.sqrt(max(exact * (1 - exact), 1e-12) / len(recs))
            report.tests.append({"name": "tau1_survival", "h": h, "i": i,
                                 "statistic": emp, "target": exact,
                                 "stderr": se_tau, "n_samples": len(recs)})
    if config.out:
        report.write(config.out)
    return report


def run_prop_m(config: ExperimentConfig) -> ExperimentReport:
    """Heavy-subtree counts: mean of M_n(t)/ln n against its linear target."""
    if config.experiment != "prop_m":
        raise ConfigError("config is not a prop_m config")
    constants = _mu_constants(config)
    mu = constants["mu"]
    span = lattice_span(config.vector_spec)
    report = ExperimentReport("prop_m", config.describe(), config.master_seed)
    report.constants = dict(constants, span=span)
    for n in config.n_grid:
        recs = _split_records(config, n)
        report.records.extend(r.to_json_dict(config.c) for r in recs)
        log_n = math.log(n)
        phase = frac(math.log(log_n) / span) if span is not None else None
        entry = {"n": n}
        if phase is not None:
            entry["varrho"] = phase
        report.grid.append(entry)
        for j, t in enumerate(config.t_grid):
            mean, se = _mean_stderr([r.m_stats[j] / log_n for r in recs])
            if t == 0.0:
                target = 0.0
            elif span is None:
                target = t / mu
            else:
                # image of the lattice tail under x -> 1/x, mass of (0, t]
                xi = LatticeXi(scale=1.0, span=span, phase=phase)
                target = float(xi.tail(1.0 / t)) / mu
            report.tests.append({"name": "m_lln", "n": n, "t": float(t),
                                 "statistic": mean, "stderr": se,
                                 "target": target,
                                 "abs_error": abs(mean - target),
                                 "n_samples": len(recs)})
    if config.out:
        report.write(config.out)
    return report


def run_process_n(config: ExperimentConfig) -> ExperimentReport:
    """Poisson limit of the removed-heavy-subtree counting process."""
    if config.experiment != "process_n":
        raise ConfigError("config is not a process_n config")
    _require_non_lattice(config)
    constants = _mu_constants(config)
    mu = constants["mu"]
    intervals = config.intervals
    if intervals is None:
        intervals = tuple(zip(config.t_grid, config.t_grid[1:]))
    if not intervals:
        raise ConfigError("process_n needs at least one interval")
    idx = {t: j for j, t in enumerate(config.t_grid)}
    report = ExperimentReport("process_n", config.describe(), config.master_seed)
    report.constants = dict(constants, rate=config.c / mu,
                            intervals=[[float(a), float(b)] for a, b in intervals])
    for n in config.n_grid:
        recs = _split_records(config, n)
        report.records.extend(r.to_json_dict(config.c) for r in recs)
        counts = np.array(
            [[(r.counting[idx[hi]] - (r.counting[idx[lo]] if lo > 0 else 0))
              for lo, hi in intervals] for r in recs], dtype=np.int64)
        means = [config.c / mu * (hi - lo) for lo, hi in intervals]
        result = poisson_increment_test(counts, means)
        entry = {"n": n}
        for (lo, hi), col in zip(intervals, result.columns):
            report.tests.append({
                "name": "poisson_increment", "n": n,
                "interval": [float(lo), float(hi)], "statistic": col.statistic,
                "p_value": col.pvalue, "dof": col.dof, "target": col.mean,
                "n_samples": config.replications})
        offdiag = result.covariance.copy()
        np.fill_diagonal(offdiag, 0.0)
        entry["max_abs_cov"] = float(np.max(np.abs(offdiag))) if offdiag.size > 1 else 0.0
        report.grid.append(entry)
    if config.out:
        report.write(config.out)
    return report


_RUNNERS = {
    "theorem1": run_theorem1,
    "theorem2": run_theorem2,
    "theorem3": run_theorem3,
    "theorem4": run_theorem4,
    "prop_m": run_prop_m,
    "process_n": run_process_n,
}


def run_experiment(config: ExperimentConfig) -> ExperimentReport:
    return _RUNNERS[config.experiment](config)
