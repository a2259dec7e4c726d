"""Model core: exact utilities, reply correspondences, and their invariants."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracle import (
    mean,
    naive_best_responses,
    naive_better_replies,
    naive_utility_network,
    naive_utility_wellmixed,
    sq_dist,
)
from trendgame import (
    DirectedNetwork,
    GameConfig,
    IsolatedAgentError,
    best_responses,
    better_replies,
    directed_cycle,
    identity_domain,
    mean_identity,
    same_count,
    utility,
    utility_network,
    utility_wellmixed,
)

W = Fraction(3, 2)


def wm_config(n, lo=0, hi=9, dims=1, weight=W):
    return GameConfig(n_agents=n, dims=dims, lo=lo, hi=hi, uniqueness_weight=weight)


# ---------------------------------------------------------------- strategies

@st.composite
def small_instance(draw, networked=None, min_weight=Fraction(0)):
    n = draw(st.integers(2, 5))
    dims = draw(st.integers(1, 2))
    lo = draw(st.integers(-2, 2))
    hi = lo + draw(st.integers(1, 4))
    weight = draw(
        st.fractions(min_value=min_weight, max_value=Fraction(4), max_denominator=4)
    )
    use_network = draw(st.booleans()) if networked is None else networked
    network = None
    if use_network:
        rows = []
        for i in range(n):
            others = [j for j in range(n) if j != i]
            rows.append(tuple(sorted(draw(st.sets(st.sampled_from(others), min_size=1)))))
        network = DirectedNetwork(n, tuple(rows))
    config = GameConfig(
        n_agents=n, dims=dims, lo=lo, hi=hi, uniqueness_weight=weight, network=network
    )
    profile = tuple(
        tuple(draw(st.integers(lo, hi)) for _ in range(dims)) for _ in range(n)
    )
    return config, profile


def oracle_kwargs(config):
    nbrs = None if config.network is None else config.network.out_neighbors
    return dict(
        lo=config.lo,
        hi=config.hi,
        dims=config.dims,
        weight=config.uniqueness_weight,
        out_neighbors=nbrs,
    )


# ------------------------------------------------------------------- basics

def test_mean_identity_examples():
    profile = ((2,), (4,))
    assert mean_identity(profile, {0, 1}) == (Fraction(3),)
    assert mean_identity(((7, 7),), {0}) == (Fraction(7), Fraction(7))
    assert mean_identity(((0,), (1,), (3,)), {0, 1, 2}) == (Fraction(4, 3),)


def test_mean_identity_empty_members_is_an_error():
    with pytest.raises(IsolatedAgentError):
        mean_identity(((1,),), set())


def test_same_count_examples():
    all_equal = tuple(((4,) for _ in range(5)))
    assert same_count(all_equal, 0, {1, 2, 3, 4}) == 4
    distinct = ((0,), (1,), (2,))
    assert same_count(distinct, 0, {1, 2}) == 0
    assert same_count(((3,), (3,), (4,)), 0, {1, 2}) == 1


def test_utility_wellmixed_examples():
    homogeneous = ((5,), (5,), (5,))
    assert utility_wellmixed(homogeneous, 0, wm_config(3)) == Fraction(-3)
    assert utility_wellmixed(((0,), (2,)), 0, wm_config(2)) == Fraction(-1)


def test_utility_wellmixed_derived_value_matches_oracle():
    profile = ((0,), (0,), (2,), (2,))
    expected = Fraction(-5, 2)
    assert naive_utility_wellmixed(profile, 0, W) == expected
    assert utility_wellmixed(profile, 0, wm_config(4)) == expected


def test_utility_wellmixed_needs_two_agents():
    with pytest.raises(ValueError):
        utility_wellmixed(((0,),), 0, GameConfig(n_agents=1, lo=0, hi=9))


def test_utility_network_examples():
    net = DirectedNetwork(2, ((1,), (0,)))
    cfg = GameConfig(n_agents=2, lo=0, hi=9, network=net)
    assert utility_network(((3,), (4,)), 0, net, cfg) == Fraction(-1)
    assert utility_network(((4,), (4,)), 0, net, cfg) == Fraction(-3, 2)


def test_utility_network_cycle_derived_values_match_oracle():
    cycle = directed_cycle(3)
    cfg = GameConfig(n_agents=3, lo=0, hi=3, network=cycle)
    profile = ((0,), (1,), (2,))
    expected = [Fraction(-1), Fraction(-1), Fraction(-4)]
    for i in range(3):
        assert naive_utility_network(profile, i, cycle.out_neighbors, W) == expected[i]
        assert utility(profile, i, cfg) == expected[i]


def test_utility_isolated_agent_is_an_error():
    net = DirectedNetwork(2, ((1,), ()))
    cfg = GameConfig(n_agents=2, lo=0, hi=9, network=net)
    with pytest.raises(IsolatedAgentError):
        utility(((0,), (1,)), 1, cfg)


# ------------------------------------------------------------------ replies

def test_better_replies_shared_identity_pair(mutual_pair_config):
    profile = ((4,), (4,))
    expected = {(3,), (5,)}
    assert naive_better_replies(profile, 0, **oracle_kwargs(mutual_pair_config)) == expected
    assert better_replies(profile, 0, mutual_pair_config) == expected


def test_better_replies_empty_at_local_optimum(mutual_pair_config):
    profile = ((3,), (4,))  # distance-1 tie at (5,) is not a strict improvement
    assert naive_better_replies(profile, 0, **oracle_kwargs(mutual_pair_config)) == set()
    assert better_replies(profile, 0, mutual_pair_config) == set()


def test_better_replies_empty_at_wellmixed_peak():
    cfg = wm_config(3)
    profile = ((0,), (1,), (2,))  # agent 1 sits exactly on the mean, all distinct
    assert utility(profile, 1, cfg) == 0
    assert better_replies(profile, 1, cfg) == set()


def test_best_responses_lone_neighbor(mutual_pair_config):
    assert best_responses(((0,), (4,)), 0, mutual_pair_config) == {(3,), (5,)}


def test_best_responses_domain_edge(mutual_pair_config):
    # the distance-1 point below the neighbor falls outside the domain
    assert best_responses(((5,), (0,)), 0, mutual_pair_config) == {(1,)}


def test_best_responses_zero_weight_tracks_reference_mean():
    net = DirectedNetwork(3, ((1, 2), (0,), (0,)))
    cfg = GameConfig(n_agents=3, lo=0, hi=9, uniqueness_weight=0, network=net)
    # neighbors at (0,) and (3,): mean 3/2, so both nearest integers tie
    assert best_responses(((9,), (0,), (3,)), 0, cfg) == {(1,), (2,)}


# --------------------------------------------------------------- invariants

@settings(max_examples=80, deadline=None)
@given(small_instance(), st.data())
def test_replies_match_exhaustive_oracle(instance, data):
    config, profile = instance
    i = data.draw(st.integers(0, config.n_agents - 1))
    kwargs = oracle_kwargs(config)
    assert better_replies(profile, i, config) == naive_better_replies(profile, i, **kwargs)
    assert best_responses(profile, i, config) == naive_best_responses(profile, i, **kwargs)


@settings(max_examples=80, deadline=None)
@given(small_instance(), st.data())
def test_reply_structure(instance, data):
    config, profile = instance
    i = data.draw(st.integers(0, config.n_agents - 1))
    domain = set(identity_domain(config))
    replies = better_replies(profile, i, config)
    assert replies <= domain
    current = utility(profile, i, config)
    for cand in replies:
        deviated = profile[:i] + (cand,) + profile[i + 1 :]
        assert utility(deviated, i, config) > current
    # When the current identity is already maximal, the ties-included argmax
    # may contain utility-equal points besides the current one.
    best = best_responses(profile, i, config)
    if replies:
        assert best <= replies
    else:
        assert profile[i] in best
        for cand in best:
            deviated = profile[:i] + (cand,) + profile[i + 1 :]
            assert utility(deviated, i, config) == current


@settings(max_examples=80, deadline=None)
@given(small_instance(min_weight=Fraction(1, 4)), st.data())
def test_utility_sign_and_zero_condition(instance, data):
    config, profile = instance
    i = data.draw(st.integers(0, config.n_agents - 1))
    value = utility(profile, i, config)
    assert value <= 0
    if config.network is None:
        group = [j for j in range(config.n_agents) if j != i]
        ref_mean = mean(profile)
    else:
        group = list(config.network.out_neighbors[i])
        ref_mean = mean([profile[j] for j in group])
    at_mean = all(Fraction(c) == m for c, m in zip(profile[i], ref_mean))
    shared = sum(1 for j in group if profile[j] == profile[i])
    assert (value == 0) == (at_mean and shared == 0)


@settings(max_examples=60, deadline=None)
@given(small_instance(), st.data())
def test_translation_invariance(instance, data):
    config, profile = instance
    room = config.hi - max(c for x in profile for c in x)
    shift = data.draw(st.integers(0, room))
    shifted = tuple(tuple(c + shift for c in x) for x in profile)
    for i in range(config.n_agents):
        assert utility(profile, i, config) == utility(shifted, i, config)


@settings(max_examples=60, deadline=None)
@given(small_instance(networked=False))
def test_wellmixed_vs_complete_graph(instance):
    """Same uniqueness term; conformity terms differ by ((N-1)/N)^2 exactly."""
    config, profile = instance
    n = config.n_agents
    complete = DirectedNetwork(
        n, tuple(tuple(j for j in range(n) if j != i) for i in range(n))
    )
    for i in range(n):
        others = [j for j in range(n) if j != i]
        shared_wm = same_count(profile, i, others)
        shared_net = same_count(profile, i, complete.out_neighbors[i])
        assert shared_wm == shared_net
        conf_wm = sq_dist(profile[i], mean_identity(profile, range(n)))
        conf_net = sq_dist(profile[i], mean_identity(profile, others))
        assert conf_wm == Fraction(n - 1, n) ** 2 * conf_net


def test_utility_evaluation_is_reproducible():
    cfg = wm_config(4)
    profile = ((0,), (3,), (3,), (7,))
    assert utility(profile, 1, cfg) == utility(profile, 1, cfg)


# ------------------------------------------------------------------- config

def test_config_validation():
    with pytest.raises(ValueError):
        GameConfig(n_agents=0, lo=0, hi=9)
    with pytest.raises(ValueError):
        GameConfig(lo=5, hi=5)
    with pytest.raises(ValueError):
        GameConfig(uniqueness_weight=-1)
    with pytest.raises(ValueError):
        GameConfig(n_agents=5, lo=0, hi=9, network=directed_cycle(3))


def test_low_uniqueness_weight_warns():
    with pytest.warns(UserWarning, match="uniqueness_weight"):
        GameConfig(n_agents=2, lo=0, hi=9, uniqueness_weight=1)


def test_weight_accepts_exact_strings():
    cfg = GameConfig(uniqueness_weight="0.005")
    assert cfg.uniqueness_weight == Fraction(1, 200)
