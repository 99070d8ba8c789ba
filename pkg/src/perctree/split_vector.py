"""Split-vector laws: sampling, the entropy constant mu, and lattice spans.

A split vector is a random probability vector (V_1, ..., V_b) with
exchangeable components; each tree vertex owns an independent copy and routes
balls to child i with probability V_i.  Three laws ship:

* ``uniform_binary``        (U, 1-U) with U uniform on [0, 1]; b = 2.
                            Non-lattice; the binary-search-tree law.
* ``deterministic_uniform`` the constant vector (1/b, ..., 1/b).
                            Lattice with span ln b.
* ``fixed_multiset``        a fixed multiset of positive probabilities,
                            uniformly permuted per sample (this is what makes
                            the components exchangeable).  Lattice iff the
                            values -ln v_i share a common rational structure.

The module is the closed-form authority for mu = b * E[-V_1 ln V_1] and for
the lattice span of -ln V_1; everything downstream (percolation targets,
exponential spacing rates, lattice tail measures) consumes these values.
Other laws can be added by extending the ``kind`` dispatch in each function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

KINDS = ("uniform_binary", "deterministic_uniform", "fixed_multiset")

_SUM_TOL = 1e-12
_SPAN_TOL = 1e-9


class ClosedFormUnavailableError(ValueError):
    """No closed form for mu and no Monte Carlo budget was given."""


@dataclass(frozen=True)
class SplitVectorSpec:
    """Immutable description of a split-vector law.

    ``multiset`` is only meaningful for kind ``fixed_multiset``: b strictly
    positive probabilities summing to 1 (within 1e-12).
    """

    kind: str
    b: int
    multiset: Optional[tuple[float, ...]] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown split-vector kind {self.kind!r}")
        if self.b < 2:
            raise ValueError(f"branch factor must be >= 2, got {self.b}")
        if self.kind == "uniform_binary" and self.b != 2:
            raise ValueError("uniform_binary requires b = 2")
        if self.kind == "fixed_multiset":
            if self.multiset is None or len(self.multiset) != self.b:
                raise ValueError("fixed_multiset needs exactly b entries")
            if any(v <= 0.0 for v in self.multiset):
                raise ValueError("multiset entries must be strictly positive")
            if abs(math.fsum(self.multiset) - 1.0) > _SUM_TOL:
                raise ValueError("multiset entries must sum to 1")
        elif self.multiset is not None:
            raise ValueError(f"{self.kind} takes no multiset")

    def to_config(self) -> dict[str, str]:
        """Serialize to flat decimal strings (round-trips exactly)."""
        cfg = {"kind": self.kind, "b": str(self.b)}
        if self.multiset is not None:
            cfg["multiset"] = " ".join(repr(v) for v in self.multiset)
        return cfg

    @classmethod
    def from_config(cls, cfg: dict[str, str]) -> "SplitVectorSpec":
        multiset = None
        if "multiset" in cfg and cfg["multiset"].strip():
            multiset = tuple(float(tok) for tok in cfg["multiset"].split())
        return cls(kind=cfg["kind"], b=int(cfg["b"]), multiset=multiset)


def uniform_binary() -> SplitVectorSpec:
    return SplitVectorSpec("uniform_binary", 2)


def deterministic_uniform(b: int) -> SplitVectorSpec:
    return SplitVectorSpec("deterministic_uniform", b)


def fixed_multiset(probs) -> SplitVectorSpec:
    probs = tuple(float(v) for v in probs)
    return SplitVectorSpec("fixed_multiset", len(probs), probs)


def sample(spec: SplitVectorSpec, rng: np.random.Generator) -> np.ndarray:
    """Draw one split vector (length b, sums to 1)."""
    return sample_block(spec, 1, rng)[0]


def sample_block(spec: SplitVectorSpec, count: int, rng: np.random.Generator) -> np.ndarray:
    """Draw ``count`` independent split vectors as a (count, b) array.

    The block form is what the tree generator consumes; a whole tree level is
    sampled in one call.
    """
    if count < 0:
        raise ValueError("count must be >= 0")
    if spec.kind == "uniform_binary":
        u = rng.random(count)
        return np.column_stack((u, 1.0 - u))
    if spec.kind == "deterministic_uniform":
        return np.full((count, spec.b), 1.0 / spec.b)
    # fixed_multiset: a uniform permutation per row makes components exchangeable
    base = np.broadcast_to(np.asarray(spec.multiset, dtype=np.float64), (count, spec.b))
    return rng.permuted(base, axis=1)


@dataclass(frozen=True)
class MuEstimate:
    """Monte Carlo estimate of mu with its standard error."""

    estimate: float
    stderr: float
    samples: int


def entropy_mu(spec: SplitVectorSpec, mc_samples: int = 0,
               rng: Optional[np.random.Generator] = None):
    """The entropy-like constant mu = b * E[-V_1 ln V_1].

    With ``mc_samples = 0`` returns the closed form:

    * deterministic_uniform: ln b
    * uniform_binary:        1/2          (b * integral_0^1 -u ln u du = 2/4)
    * fixed_multiset:        sum_i -v_i ln v_i   (b * the component average)

    With ``mc_samples > 0`` returns a :class:`MuEstimate` computed from that
    many sampled vectors, standard error included.  mu lies in (0, ln b] for
    every shipped kind, with equality only in the deterministic case.
    """
    if mc_samples < 0:
        raise ValueError("mc_samples must be >= 0")
    if mc_samples == 0:
        if spec.kind == "deterministic_uniform":
            return math.log(spec.b)
        if spec.kind == "uniform_binary":
            return 0.5
        if spec.kind == "fixed_multiset":
            return -math.fsum(v * math.log(v) for v in spec.multiset)
        raise ClosedFormUnavailableError(
            f"no closed form for kind {spec.kind!r}; pass mc_samples > 0")
    if rng is None:
        raise ValueError("Monte Carlo path needs an rng")
    # b * (-V_1 ln V_1) averaged over samples; first component is enough
    # because the components are exchangeable.
    vals = np.empty(mc_samples)
    chunk = 1 << 18
    for lo in range(0, mc_samples, chunk):
        hi = min(lo + chunk, mc_samples)
        v1 = sample_block(spec, hi - lo, rng)[:, 0]
        with np.errstate(divide="ignore", invalid="ignore"):
            term = np.where(v1 > 0.0, -v1 * np.log(v1), 0.0)
        vals[lo:hi] = spec.b * term
    est = float(vals.mean())
    se = float(vals.std(ddof=1) / math.sqrt(mc_samples)) if mc_samples > 1 else float("inf")
    return MuEstimate(est, se, mc_samples)


def lattice_span(spec: SplitVectorSpec) -> Optional[float]:
    """Largest a > 0 with -ln v in a*Z for every support point, else None.

    uniform_binary has continuous support, hence no span.  For the discrete
    kinds the span is the real gcd of the values -ln v_i, computed by
    Euclidean reduction with tolerance 1e-9 and verified against every
    support point; if the reduction collapses below the tolerance scale the
    support is declared non-lattice.
    """
    if spec.kind == "uniform_binary":
        return None
    if spec.kind == "deterministic_uniform":
        return math.log(spec.b)
    values = sorted({-math.log(v) for v in spec.multiset})
    return _real_gcd(values, _SPAN_TOL)


def _real_gcd(values, tol: float) -> Optional[float]:
    g = values[0]
    for x in values[1:]:
        a, b = max(g, x), min(g, x)
        while b > tol:
            a, b = b, a % b
        g = a
        if g < 1e-6:  # reduction collapsed: ratios are not rational
            return None
    for x in values:
        k = round(x / g)
        if k < 1 or abs(x - k * g) > tol:
            return None
    return g
