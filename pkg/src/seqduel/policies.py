"""Per-agent behavior: belief signaling, belief fusion, threshold stopping.

Everything here is a pure function over immutable values; the signal coin
is an explicit argument, so the module holds no RNG state.  Two exactness
guarantees matter downstream and are deliberate:

 * an inverted signal stores the swapped component pair verbatim, so the
   minimum component of the transmitted signal equals the sender's local
   minimum bit for bit, no matter the coin outcome;
 * fusion with weight exactly 1 (or 0) returns the corresponding input
   unchanged rather than recomputing it through arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from seqduel.beliefs import Belief, Hypothesis

__all__ = [
    "AgentPolicy",
    "SignaledBelief",
    "Decision",
    "signal",
    "expected_signal_distribution",
    "fuse",
    "decide",
    "final_decision_nonstopper",
]


class Decision(Enum):
    """Outcome of one threshold test: keep sampling or stop and declare."""

    CONTINUE = "continue"
    STOP_THETA0 = "stop_theta0"
    STOP_THETA1 = "stop_theta1"

    @property
    def stops(self) -> bool:
        return self is not Decision.CONTINUE

    @property
    def declared(self) -> Hypothesis | None:
        if self is Decision.STOP_THETA0:
            return Hypothesis.THETA0
        if self is Decision.STOP_THETA1:
            return Hypothesis.THETA1
        return None


def _check_unit(name: str, x: float) -> float:
    x = float(x)
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {x!r}")
    return x


@dataclass(frozen=True)
class AgentPolicy:
    """One agent's tunable behavior.

    alpha is the probability of transmitting the true belief (vs. the
    inverted one).  w_schedule gives the fusion weight per iteration:
    a constant, or a list whose last entry repeats once exhausted.
    t_theta0 / t_theta1 are the stop thresholds on the fused belief's
    components, and beta is the confidence target used both for the
    agent's own accuracy and for reading the counterpart's signal.
    """

    alpha: float
    w_schedule: float | tuple[float, ...] = 1.0
    t_theta0: float = 0.05
    t_theta1: float = 0.05
    beta: float = 0.05

    def __post_init__(self) -> None:
        _check_unit("alpha", self.alpha)
        _check_unit("t_theta0", self.t_theta0)
        _check_unit("t_theta1", self.t_theta1)
        _check_unit("beta", self.beta)
        ws = self.w_schedule
        if isinstance(ws, (int, float)):
            _check_unit("w_schedule", ws)
        else:
            ws = tuple(float(w) for w in ws)
            if not ws:
                raise ValueError("w_schedule list must be non-empty")
            for w in ws:
                _check_unit("w_schedule entry", w)
            object.__setattr__(self, "w_schedule", ws)

    @classmethod
    def optimal(cls, beta: float) -> "AgentPolicy":
        """The cost-minimizing configuration: coin-flip signaling, full
        self-weight in fusion, thresholds at the confidence target."""
        _check_unit("beta", beta)
        return cls(alpha=0.5, w_schedule=1.0, t_theta0=beta, t_theta1=beta, beta=beta)

    def weight_at(self, iteration: int) -> float:
        """Fusion weight for a 1-based iteration index."""
        if iteration < 1:
            raise ValueError(f"iteration must be >= 1, got {iteration}")
        ws = self.w_schedule
        if isinstance(ws, (int, float)):
            return float(ws)
        return ws[min(iteration - 1, len(ws) - 1)]

    @property
    def constant_unit_weight(self) -> bool:
        ws = self.w_schedule
        if isinstance(ws, (int, float)):
            return float(ws) == 1.0
        return all(w == 1.0 for w in ws)


@dataclass(frozen=True)
class SignaledBelief:
    """A transmitted belief pair, possibly inverted; the receiver cannot
    tell which.  Components are copied from the sender's belief (swapped
    or not), never re-derived, so min(pair) is exactly the sender's."""

    p_theta0: float
    p_theta1: float

    @property
    def pair(self) -> tuple[float, float]:
        return (self.p_theta0, self.p_theta1)

    @property
    def min_component(self) -> float:
        return min(self.p_theta0, self.p_theta1)


def signal(belief: Belief, alpha: float, coin: float) -> SignaledBelief:
    """Transmit the belief truthfully if coin < alpha, inverted otherwise.

    The coin must come from the agent's dedicated signaling stream, never
    from the observation stream.
    """
    _check_unit("alpha", alpha)
    if not 0.0 <= coin < 1.0:
        raise ValueError(f"coin must be a uniform draw in [0, 1), got {coin!r}")
    if coin < alpha:
        return SignaledBelief(belief.p_theta0, belief.p_theta1)
    return SignaledBelief(belief.p_theta1, belief.p_theta0)


def expected_signal_distribution(belief: Belief, alpha: float) -> Belief:
    """Receiver-side mixture of the signal: alpha parts the true pair,
    (1 - alpha) parts the swapped pair, componentwise."""
    _check_unit("alpha", alpha)
    a = float(alpha)
    m0 = a * belief.p_theta0 + (1.0 - a) * belief.p_theta1
    m1 = a * belief.p_theta1 + (1.0 - a) * belief.p_theta0
    return _belief_from_pair(m0, m1)


def fuse(own: Belief, received: SignaledBelief, w: float) -> Belief:
    """Convex combination w * own + (1 - w) * received, componentwise.

    w = 1 returns `own` itself and w = 0 the received pair verbatim, so
    the degenerate weights introduce no arithmetic at all.
    """
    _check_unit("w", w)
    w = float(w)
    if w == 1.0:
        return own
    if w == 0.0:
        return _belief_from_pair(received.p_theta0, received.p_theta1)
    f0 = w * own.p_theta0 + (1.0 - w) * received.p_theta0
    f1 = w * own.p_theta1 + (1.0 - w) * received.p_theta1
    return _belief_from_pair(f0, f1)


def _belief_from_pair(p0: float, p1: float) -> Belief:
    # Components are kept exactly as computed (they are what the threshold
    # tests compare); only the log-ratio is derived.
    if p0 == 0.0:
        return Belief(0.0, p1, math.inf)
    if p1 == 0.0:
        return Belief(p0, 0.0, -math.inf)
    return Belief(p0, p1, math.log(p1) - math.log(p0))


def decide(fused: Belief, policy: AgentPolicy) -> Decision:
    """Threshold stopping test on the fused belief.

    Stop declaring theta1 when the theta0 mass has fallen to t_theta0;
    stop declaring theta0 when the theta1 mass has fallen to t_theta1.
    Both conditions can hold only when t_theta0 + t_theta1 >= 1; then the
    branch watching the smaller component wins, exact tie -> theta1.
    """
    fire_theta1 = fused.p_theta0 <= policy.t_theta0
    fire_theta0 = fused.p_theta1 <= policy.t_theta1
    if fire_theta1 and fire_theta0:
        return Decision.STOP_THETA1 if fused.p_theta0 <= fused.p_theta1 else Decision.STOP_THETA0
    if fire_theta1:
        return Decision.STOP_THETA1
    if fire_theta0:
        return Decision.STOP_THETA0
    return Decision.CONTINUE


def final_decision_nonstopper(own: Belief) -> Hypothesis:
    """Forced argmax declaration for the agent that did not initiate the
    stop; the exact tie goes to theta1."""
    return Hypothesis.THETA1 if own.p_theta1 >= own.p_theta0 else Hypothesis.THETA0
