"""Probability primitives for binary hypothesis testing.

Binary beliefs are carried in log-likelihood-ratio form so that long
observation chains never underflow; the linear view is derived on demand.
Entropy is reported in bits (base 2), KL divergence in nats (base e).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

__all__ = [
    "Hypothesis",
    "Belief",
    "ObservationModel",
    "Prior",
    "ImpossibleObservationError",
    "bayes_update",
    "bernoulli_entropy",
    "belief_entropy",
    "kl_divergence",
]


class ImpossibleObservationError(ValueError):
    """Raised when an observed symbol has probability zero under every
    hypothesis still compatible with the current belief."""


class Hypothesis(Enum):
    """One of the two mutually exclusive states of nature."""

    THETA0 = 0
    THETA1 = 1

    def other(self) -> "Hypothesis":
        return Hypothesis.THETA1 if self is Hypothesis.THETA0 else Hypothesis.THETA0

    def __repr__(self) -> str:  # noqa: D105 - compact in trial dumps
        return self.name.lower()


def _pair_from_log_ratio(lr: float) -> tuple[float, float]:
    # Small component computed with full relative accuracy; the large one
    # as its exact-ish complement so the pair sums to 1.0 in floating point.
    if lr != lr:
        raise ValueError("log-ratio is NaN")
    if lr == math.inf:
        return (0.0, 1.0)
    if lr == -math.inf:
        return (1.0, 0.0)
    t = math.exp(-abs(lr))
    small = t / (1.0 + t)
    big = 1.0 - small
    return (small, big) if lr >= 0.0 else (big, small)


@dataclass(frozen=True)
class Belief:
    """Posterior probability pair over the two hypotheses.

    The canonical state is ``log_ratio`` = ln(p_theta1 / p_theta0); the
    stored linear components are derived from it (or from the probability
    the belief was built from) and always sum to exactly 1.0.  Degenerate
    beliefs (all mass on one state) are representable as +/-inf log-ratio
    and are absorbing under Bayes updates.
    """

    p_theta0: float
    p_theta1: float
    log_ratio: float

    @classmethod
    def from_p_theta1(cls, p: float) -> "Belief":
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"probability must lie in [0, 1], got {p!r}")
        if p == 0.0:
            return cls(1.0, 0.0, -math.inf)
        if p == 1.0:
            return cls(0.0, 1.0, math.inf)
        return cls(1.0 - p, p, math.log(p) - math.log1p(-p))

    @classmethod
    def from_log_ratio(cls, lr: float) -> "Belief":
        p0, p1 = _pair_from_log_ratio(lr)
        return cls(p0, p1, lr)

    @property
    def pair(self) -> tuple[float, float]:
        return (self.p_theta0, self.p_theta1)

    def prob(self, h: Hypothesis) -> float:
        return self.p_theta1 if h is Hypothesis.THETA1 else self.p_theta0

    @property
    def min_component(self) -> float:
        """Posterior mass of the less likely state; this is the conditional
        probability of error of an argmax decision."""
        return min(self.p_theta0, self.p_theta1)

    @property
    def is_degenerate(self) -> bool:
        return math.isinf(self.log_ratio)

    def inverted(self) -> "Belief":
        """Componentwise swap (p0, p1) -> (p1, p0)."""
        return Belief(self.p_theta1, self.p_theta0, -self.log_ratio)

    def __repr__(self) -> str:
        return f"Belief(p0={self.p_theta0:.6g}, p1={self.p_theta1:.6g})"


@dataclass(frozen=True)
class Prior:
    """Common prior shared by both agents."""

    p_theta1: float = 0.5

    def __post_init__(self) -> None:
        if not 0.0 <= self.p_theta1 <= 1.0:
            raise ValueError(f"prior must lie in [0, 1], got {self.p_theta1!r}")

    def as_belief(self) -> Belief:
        return Belief.from_p_theta1(self.p_theta1)


_PMF_SUM_TOL = 1e-9


class ObservationModel:
    """Finite-alphabet observation channel: one conditional pmf per state.

    pmfs are validated (length, nonnegativity, sum within 1e-9) and then
    renormalized, so the stored vectors sum to 1.  A model whose two pmfs
    are identical is rejected: such an agent could never learn.
    """

    __slots__ = ("alphabet_size", "pmf_theta0", "pmf_theta1", "_llr", "_cum0", "_cum1")

    def __init__(
        self,
        pmf_theta0: Sequence[float],
        pmf_theta1: Sequence[float],
        alphabet_size: int | None = None,
    ) -> None:
        p0 = [float(x) for x in pmf_theta0]
        p1 = [float(x) for x in pmf_theta1]
        if alphabet_size is None:
            alphabet_size = len(p0)
        if alphabet_size < 1:
            raise ValueError("alphabet_size must be a positive integer")
        for name, pmf in (("pmf_theta0", p0), ("pmf_theta1", p1)):
            if len(pmf) != alphabet_size:
                raise ValueError(
                    f"{name} has length {len(pmf)}, expected alphabet_size={alphabet_size}"
                )
            if any(x < 0.0 for x in pmf):
                raise ValueError(f"{name} has a negative entry")
            s = math.fsum(pmf)
            if abs(s - 1.0) > _PMF_SUM_TOL:
                raise ValueError(f"{name} sums to {s!r}, expected 1 within {_PMF_SUM_TOL}")
        s0 = math.fsum(p0)
        s1 = math.fsum(p1)
        p0 = [x / s0 for x in p0]
        p1 = [x / s1 for x in p1]
        if all(a == b for a, b in zip(p0, p1)):
            raise ValueError(
                "pmf_theta0 and pmf_theta1 are identical; the model carries no "
                "information about the state"
            )
        self.alphabet_size = alphabet_size
        self.pmf_theta0 = tuple(p0)
        self.pmf_theta1 = tuple(p1)
        # Per-symbol log-likelihood-ratio ln(p1[s]/p0[s]); +/-inf where one
        # pmf vanishes, NaN where both do (caught at update time).
        with np.errstate(divide="ignore", invalid="ignore"):
            self._llr = np.log(np.asarray(p1)) - np.log(np.asarray(p0))
        self._cum0 = np.cumsum(p0)
        self._cum1 = np.cumsum(p1)
        self._cum0[-1] = 1.0
        self._cum1[-1] = 1.0

    def pmf(self, h: Hypothesis) -> tuple[float, ...]:
        return self.pmf_theta1 if h is Hypothesis.THETA1 else self.pmf_theta0

    def cumulative(self, h: Hypothesis) -> np.ndarray:
        return self._cum1 if h is Hypothesis.THETA1 else self._cum0

    @property
    def symbol_log_ratios(self) -> np.ndarray:
        return self._llr

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ObservationModel):
            return NotImplemented
        return (
            self.pmf_theta0 == other.pmf_theta0 and self.pmf_theta1 == other.pmf_theta1
        )

    def __hash__(self) -> int:
        return hash((self.pmf_theta0, self.pmf_theta1))

    def __repr__(self) -> str:
        return f"ObservationModel(k={self.alphabet_size})"


def bayes_update(prior: Belief, model: ObservationModel, symbol: int) -> Belief:
    """Posterior after observing ``symbol``, computed in log-ratio space.

    A degenerate prior is absorbing.  Observing a symbol that is impossible
    under both hypotheses (or under the only state the prior allows) raises
    ImpossibleObservationError; a symbol impossible under exactly one
    hypothesis collapses the posterior to the other state, which is a valid
    degenerate belief rather than an error.
    """
    if not isinstance(symbol, (int, np.integer)) or isinstance(symbol, bool):
        raise ValueError(f"symbol must be an integer index, got {symbol!r}")
    if not 0 <= symbol < model.alphabet_size:
        raise ValueError(
            f"symbol {symbol} out of range for alphabet of size {model.alphabet_size}"
        )
    q0 = model.pmf_theta0[symbol]
    q1 = model.pmf_theta1[symbol]
    if q0 == 0.0 and q1 == 0.0:
        raise ImpossibleObservationError(
            f"symbol {symbol} has probability zero under both hypotheses"
        )
    if prior.log_ratio == math.inf:  # all mass on theta1 already
        if q1 == 0.0:
            raise ImpossibleObservationError(
                f"symbol {symbol} is impossible given a belief pinned on theta1"
            )
        return prior
    if prior.log_ratio == -math.inf:
        if q0 == 0.0:
            raise ImpossibleObservationError(
                f"symbol {symbol} is impossible given a belief pinned on theta0"
            )
        return prior
    if q1 == 0.0:
        return Belief.from_log_ratio(-math.inf)
    if q0 == 0.0:
        return Belief.from_log_ratio(math.inf)
    return Belief.from_log_ratio(prior.log_ratio + float(model.symbol_log_ratios[symbol]))


def bernoulli_entropy(p: float) -> float:
    """Entropy in bits of a two-point distribution (p, 1-p); 0*log0 := 0."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability must lie in [0, 1], got {p!r}")
    if p == 0.0 or p == 1.0:
        return 0.0
    q = 1.0 - p
    return -p * math.log2(p) - q * math.log2(q)


def belief_entropy(b: "Belief | object") -> float:
    """Entropy in bits computed from a stored probability pair.

    Works for any object exposing ``p_theta0``/``p_theta1``.  Because both
    components are used as stored, a componentwise swap leaves the result
    bit-for-bit unchanged.
    """
    terms = []
    for p in (b.p_theta0, b.p_theta1):
        if p > 0.0:
            terms.append(-p * math.log2(p))
    return math.fsum(terms)


def kl_divergence(p: Sequence[float], q: Sequence[float]) -> float:
    """Relative entropy sum_s p[s] ln(p[s]/q[s]) in nats; 0*ln(0/q) := 0.

    Returns +inf when p puts mass where q has none (absolute-continuity
    failure) -- that is a well-defined divergence value, distinct from the
    ValueError raised for malformed inputs.
    """
    if len(p) != len(q):
        raise ValueError(f"length mismatch: {len(p)} vs {len(q)}")
    if any(x < 0.0 for x in p) or any(x < 0.0 for x in q):
        raise ValueError("pmf entries must be nonnegative")
    terms = []
    for ps, qs in zip(p, q):
        if ps == 0.0:
            continue
        if qs == 0.0:
            return math.inf
        terms.append(ps * math.log(ps / qs))
    return math.fsum(terms)
