import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from seqduel.beliefs import (
    Belief,
    Hypothesis,
    ImpossibleObservationError,
    ObservationModel,
    Prior,
    bayes_update,
    belief_entropy,
    bernoulli_entropy,
    kl_divergence,
)

# Reference two-agent scenario used across the test suite.
AGENT_A_PMFS = ([0.1, 0.2, 0.1, 0.3, 0.3], [0.2, 0.15, 0.25, 0.2, 0.2])
AGENT_B_PMFS = ([0.15, 0.25, 0.15, 0.25, 0.2], [0.4, 0.05, 0.35, 0.1, 0.1])


def test_hypothesis_other():
    assert Hypothesis.THETA0.other() is Hypothesis.THETA1
    assert Hypothesis.THETA1.other() is Hypothesis.THETA0


def test_belief_from_probability_round_trip():
    b = Belief.from_p_theta1(0.3)
    assert b.p_theta1 == pytest.approx(0.3, abs=1e-15)
    assert b.p_theta0 == pytest.approx(0.7, abs=1e-15)
    assert b.prob(Hypothesis.THETA1) == b.p_theta1
    assert b.prob(Hypothesis.THETA0) == b.p_theta0
    assert b.pair == (b.p_theta0, b.p_theta1)


def test_belief_degenerate_endpoints():
    lo = Belief.from_p_theta1(0.0)
    hi = Belief.from_p_theta1(1.0)
    assert lo.log_ratio == -math.inf and lo.pair == (1.0, 0.0)
    assert hi.log_ratio == math.inf and hi.pair == (0.0, 1.0)
    assert lo.is_degenerate and hi.is_degenerate
    assert not Belief.from_p_theta1(0.5).is_degenerate


def test_belief_rejects_out_of_range():
    for bad in (-0.1, 1.1, math.nan):
        with pytest.raises(ValueError):
            Belief.from_p_theta1(bad)
    with pytest.raises(ValueError):
        Belief.from_log_ratio(math.nan)


@given(st.floats(min_value=-745.0, max_value=745.0, allow_nan=False))
def test_belief_pair_sums_to_one_exactly(lr):
    # The linear pair must be an exact partition of unity at any log-ratio,
    # including far past the point where the small component is ~1e-300.
    b = Belief.from_log_ratio(lr)
    assert b.p_theta0 + b.p_theta1 == 1.0
    assert 0.0 <= b.min_component <= 0.5


@given(st.floats(min_value=-700.0, max_value=700.0, allow_nan=False))
def test_belief_inversion_swaps_components_exactly(lr):
    b = Belief.from_log_ratio(lr)
    inv = b.inverted()
    assert inv.p_theta0 == b.p_theta1
    assert inv.p_theta1 == b.p_theta0
    assert inv.log_ratio == -b.log_ratio
    assert inv.min_component == b.min_component


@given(st.floats(min_value=1e-12, max_value=1.0 - 1e-12))
def test_belief_log_ratio_matches_probability(p):
    b = Belief.from_p_theta1(p)
    assert b.log_ratio == pytest.approx(math.log(p / (1.0 - p)), rel=1e-12, abs=1e-12)


def test_prior_validation_and_belief():
    assert Prior().p_theta1 == 0.5
    assert Prior(0.25).as_belief().p_theta1 == pytest.approx(0.25)
    with pytest.raises(ValueError):
        Prior(1.5)


# --- observation models ---------------------------------------------------


def test_model_validates_and_normalizes():
    m = ObservationModel(*AGENT_A_PMFS)
    assert m.alphabet_size == 5
    assert math.fsum(m.pmf_theta0) == pytest.approx(1.0, abs=1e-15)
    assert math.fsum(m.pmf_theta1) == pytest.approx(1.0, abs=1e-15)
    # cumulative sampling tables end at exactly 1.0 so a uniform draw of
    # 1.0 - ulp can never index past the alphabet
    assert m.cumulative(Hypothesis.THETA0)[-1] == 1.0
    assert m.cumulative(Hypothesis.THETA1)[-1] == 1.0


def test_model_accepts_sum_within_tolerance():
    eps = 5e-10
    m = ObservationModel([0.5, 0.5 + eps], [0.3, 0.7])
    assert math.fsum(m.pmf_theta0) == pytest.approx(1.0, abs=1e-15)


def test_model_rejects_bad_input():
    with pytest.raises(ValueError):
        ObservationModel([0.5, 0.5], [0.3, 0.3, 0.4])  # length mismatch
    with pytest.raises(ValueError):
        ObservationModel([0.5, 0.5], [-0.1, 1.1])  # negative mass
    with pytest.raises(ValueError):
        ObservationModel([0.6, 0.6], [0.5, 0.5])  # sum far from 1
    with pytest.raises(ValueError):
        ObservationModel([0.5, 0.5], [0.5, 0.5])  # uninformative
    with pytest.raises(ValueError):
        ObservationModel([0.4, 0.6], [0.3, 0.7], alphabet_size=3)


def test_model_pmf_accessor():
    m = ObservationModel(*AGENT_B_PMFS)
    assert m.pmf(Hypothesis.THETA0) == m.pmf_theta0
    assert m.pmf(Hypothesis.THETA1) == m.pmf_theta1


# --- Bayes updates --------------------------------------------------------


def test_bayes_update_two_thirds():
    # Flat prior, symbol twice as likely under theta1: posterior is exactly
    # 0.4 / (0.4 + 0.2) = 2/3.
    m = ObservationModel([0.2, 0.8], [0.4, 0.6])
    post = bayes_update(Belief.from_p_theta1(0.5), m, 0)
    assert post.p_theta1 == pytest.approx(2.0 / 3.0, abs=1e-12)
    assert post.p_theta0 == pytest.approx(1.0 / 3.0, abs=1e-12)


def test_bayes_update_matches_linear_reference_over_long_chain():
    # Log-space chain against a step-normalized linear-space chain: the two
    # must track each other to 1e-10 over a hundred updates.
    m = ObservationModel(*AGENT_A_PMFS)
    symbols = [(7 * i + 3) % 5 for i in range(100)]
    b = Belief.from_p_theta1(0.5)
    p1 = 0.5
    for s in symbols:
        b = bayes_update(b, m, s)
        num = p1 * m.pmf_theta1[s]
        den = num + (1.0 - p1) * m.pmf_theta0[s]
        p1 = num / den
    assert b.p_theta1 == pytest.approx(p1, abs=1e-10)


def test_bayes_update_martingale_property():
    # One-step conditional expectation of the posterior equals the prior,
    # enumerated exactly over the alphabet.
    for pmfs in (AGENT_A_PMFS, AGENT_B_PMFS):
        m = ObservationModel(*pmfs)
        for p in (0.5, 0.01, 0.37, 0.93):
            b = Belief.from_p_theta1(p)
            expected = 0.0
            for s in range(m.alphabet_size):
                marginal = b.p_theta0 * m.pmf_theta0[s] + b.p_theta1 * m.pmf_theta1[s]
                expected += marginal * bayes_update(b, m, s).p_theta1
            assert expected == pytest.approx(p, abs=1e-10)


def test_bayes_update_symbol_validation():
    m = ObservationModel(*AGENT_A_PMFS)
    b = Belief.from_p_theta1(0.5)
    with pytest.raises(ValueError):
        bayes_update(b, m, 5)
    with pytest.raises(ValueError):
        bayes_update(b, m, -1)
    with pytest.raises(ValueError):
        bayes_update(b, m, 1.0)
    with pytest.raises(ValueError):
        bayes_update(b, m, True)


def test_bayes_update_zero_probability_symbols():
    m = ObservationModel([0.5, 0.5, 0.0], [0.0, 0.5, 0.5])
    b = Belief.from_p_theta1(0.5)
    # impossible under theta1 only: collapse onto theta0
    assert bayes_update(b, m, 0).pair == (1.0, 0.0)
    # impossible under theta0 only: collapse onto theta1
    assert bayes_update(b, m, 2).pair == (0.0, 1.0)

    m2 = ObservationModel([0.5, 0.5, 0.0], [0.4, 0.6, 0.0])
    with pytest.raises(ImpossibleObservationError):
        bayes_update(b, m2, 2)


def test_bayes_update_degenerate_prior_is_absorbing():
    m = ObservationModel(*AGENT_A_PMFS)
    pinned = Belief.from_p_theta1(1.0)
    for s in range(5):
        assert bayes_update(pinned, m, s) is pinned

    # but a symbol the pinned state cannot emit is flagged
    m2 = ObservationModel([0.5, 0.5], [1.0, 0.0])
    with pytest.raises(ImpossibleObservationError):
        bayes_update(Belief.from_p_theta1(1.0), m2, 1)
    with pytest.raises(ImpossibleObservationError):
        bayes_update(Belief.from_p_theta1(0.0), ObservationModel([1.0, 0.0], [0.5, 0.5]), 1)


# --- entropy and divergence ----------------------------------------------


def test_bernoulli_entropy_reference_points():
    assert bernoulli_entropy(0.5) == 1.0
    assert bernoulli_entropy(0.0) == 0.0
    assert bernoulli_entropy(1.0) == 0.0
    assert bernoulli_entropy(0.11) == pytest.approx(0.49992, abs=5e-6)
    with pytest.raises(ValueError):
        bernoulli_entropy(-0.01)
    with pytest.raises(ValueError):
        bernoulli_entropy(1.01)


@given(st.floats(min_value=0.0, max_value=1.0, allow_nan=False))
def test_bernoulli_entropy_symmetry(p):
    assert bernoulli_entropy(p) == pytest.approx(bernoulli_entropy(1.0 - p), abs=1e-12)


@given(st.floats(min_value=-700.0, max_value=700.0, allow_nan=False))
def test_belief_entropy_swap_invariant_bitwise(lr):
    b = Belief.from_log_ratio(lr)
    assert belief_entropy(b) == belief_entropy(b.inverted())


def test_belief_entropy_matches_bernoulli_form():
    for p in (0.5, 0.2, 0.987):
        b = Belief.from_p_theta1(p)
        assert belief_entropy(b) == pytest.approx(bernoulli_entropy(b.p_theta1), abs=1e-12)


def test_kl_divergence_reference_models():
    # Discrimination rates of the two reference channels, in nats, taken
    # between the state-conditional pmfs.  Hand-evaluated sums:
    #   agent A: 0.1398716881...,  agent B: 0.4958425301...
    kl_a = kl_divergence(AGENT_A_PMFS[0], AGENT_A_PMFS[1])
    kl_b = kl_divergence(AGENT_B_PMFS[0], AGENT_B_PMFS[1])
    assert kl_a == pytest.approx(0.1398716881118447, abs=1e-12)
    assert kl_b == pytest.approx(0.4958425301792134, abs=1e-12)
    assert kl_a == pytest.approx(0.14, abs=0.005)
    assert kl_b == pytest.approx(0.496, abs=0.005)


def test_kl_divergence_properties():
    assert kl_divergence([0.3, 0.7], [0.3, 0.7]) == 0.0
    assert kl_divergence([0.3, 0.7], [0.4, 0.6]) > 0.0
    assert kl_divergence([0.5, 0.5], [1.0, 0.0]) == math.inf
    assert kl_divergence([0.0, 1.0], [0.5, 0.5]) == pytest.approx(math.log(2.0))
    with pytest.raises(ValueError):
        kl_divergence([0.5, 0.5], [1.0])
    with pytest.raises(ValueError):
        kl_divergence([-0.5, 1.5], [0.5, 0.5])


@settings(max_examples=50)
@given(
    st.lists(st.floats(min_value=0.01, max_value=1.0), min_size=3, max_size=6),
    st.lists(st.floats(min_value=0.01, max_value=1.0), min_size=3, max_size=6),
)
def test_kl_divergence_nonnegative(raw_p, raw_q):
    n = min(len(raw_p), len(raw_q))
    p = [x / math.fsum(raw_p[:n]) for x in raw_p[:n]]
    q = [x / math.fsum(raw_q[:n]) for x in raw_q[:n]]
    assert kl_divergence(p, q) >= -1e-15
