"""Pass/fail gates over experiment reports.

The thresholds encode the shipped acceptance battery; the command line's
``experiment --gate`` mode applies the same checks to whatever config it
ran.  Desk-scale caveat: the limit constants converge at rate ~1/ln n, so
mean gates measure limit value plus a finite-size bias term; the trend
gates (error shrinking along the grid) are the robust part.
"""

from __future__ import annotations

from dataclasses import dataclass

from .harness import ExperimentReport

MEAN_TOL = {"theorem1": 0.02, "theorem2": 0.02, "theorem4": 0.025,
            "theorem3": 0.015}
KS_MIN_P = 0.01
POISSON_MIN_P = 0.01
M_REL_TOL = 0.15
TAU_SIGMAS = 4.0


@dataclass(frozen=True)
class GateResult:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}: {self.detail}"


def gate_mean(report: ExperimentReport, tol: float) -> GateResult:
    entry = report.grid[-1]
    err = entry["abs_error"]
    ok = err <= tol
    return GateResult(
        f"{report.experiment}_mean",
        ok,
        f"|{entry['mean']:.6f} - {entry['target']:.6f}| = {err:.6f} "
        f"(tol {tol}, stderr {entry['stderr']:.6f})")


def gate_error_trend(report: ExperimentReport) -> GateResult:
    errs = report.grid_values("abs_error")
    ok = all(b <= a for a, b in zip(errs, errs[1:]))
    return GateResult(
        f"{report.experiment}_error_trend", ok,
        "abs errors along grid: " + ", ".join(f"{e:.6f}" for e in errs))


def gate_ks(report: ExperimentReport, name: str = "ks_reciprocal_top1",
            min_p: float = KS_MIN_P) -> GateResult:
    rows = report.tests_named(name)
    last = rows[-1]
    ok = last["p_value"] > min_p
    return GateResult(
        f"{report.experiment}_{name}", ok,
        f"D = {last['statistic']:.5f}, p = {last['p_value']:.5f} "
        f"(need > {min_p}, n_samples {last['n_samples']})")


def gate_ks_trend(report: ExperimentReport,
                  name: str = "ks_reciprocal_top1") -> GateResult:
    ds = [row["statistic"] for row in report.tests_named(name)]
    ok = all(b <= a for a, b in zip(ds, ds[1:]))
    return GateResult(
        f"{report.experiment}_{name}_trend", ok,
        "KS distances along grid: " + ", ".join(f"{d:.5f}" for d in ds))


def gate_tau_survival(report: ExperimentReport,
                      sigmas: float = TAU_SIGMAS) -> GateResult:
    rows = report.tests_named("tau1_survival")
    bad = [r for r in rows
           if abs(r["statistic"] - r["target"]) > sigmas * r["stderr"]]
    detail = "; ".join(
        f"i={r['i']}: emp {r['statistic']:.5f} vs {r['target']:.5f} "
        f"(se {r['stderr']:.5f})" for r in rows)
    return GateResult(f"{report.experiment}_tau1_survival", not bad, detail)


def gate_m_lln(report: ExperimentReport, rel_tol: float = M_REL_TOL) -> GateResult:
    n_max = report.grid[-1]["n"]
    rows = [r for r in report.tests_named("m_lln")
            if r["n"] == n_max and r["t"] > 0.0]
    bad = [r for r in rows if r["abs_error"] > rel_tol * r["target"]]
    detail = "; ".join(
        f"t={r['t']}: {r['statistic']:.4f} vs {r['target']:.4f}" for r in rows)
    return GateResult(f"{report.experiment}_m_lln", not bad, detail)


def gate_m_error_trend(report: ExperimentReport) -> GateResult:
    ts = sorted({r["t"] for r in report.tests_named("m_lln") if r["t"] > 0.0})
    ok = True
    parts = []
    for t in ts:
        errs = [r["abs_error"] for r in report.tests_named("m_lln") if r["t"] == t]
        ok = ok and all(b <= a for a, b in zip(errs, errs[1:]))
        parts.append(f"t={t}: " + ",".join(f"{e:.4f}" for e in errs))
    return GateResult(f"{report.experiment}_m_error_trend", ok, "; ".join(parts))


def gate_poisson(report: ExperimentReport,
                 min_p: float = POISSON_MIN_P) -> GateResult:
    n_max = report.grid[-1]["n"]
    rows = [r for r in report.tests_named("poisson_increment") if r["n"] == n_max]
    bad = [r for r in rows if r["p_value"] <= min_p]
    detail = "; ".join(
        f"({r['interval'][0]},{r['interval'][1]}]: p = {r['p_value']:.5f}"
        for r in rows)
    return GateResult(f"{report.experiment}_poisson_increments", not bad, detail)


def default_gates(report: ExperimentReport) -> list:
    """The acceptance-battery checks appropriate to the experiment kind."""
    kind = report.experiment
    if kind in ("theorem1", "theorem2"):
        out = [gate_mean(report, MEAN_TOL[kind]), gate_error_trend(report),
               gate_ks(report), gate_ks_trend(report)]
    elif kind == "theorem4":
        out = [gate_mean(report, MEAN_TOL[kind])]
    elif kind == "theorem3":
        out = [gate_mean(report, MEAN_TOL[kind]), gate_tau_survival(report)]
    elif kind == "prop_m":
        out = [gate_m_lln(report), gate_m_error_trend(report)]
    elif kind == "process_n":
        out = [gate_poisson(report)]
    else:
        out = []
    return out
