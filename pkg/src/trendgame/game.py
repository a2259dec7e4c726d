"""The identity-expression game: domain types, exact utilities, replies.

Each of N agents expresses an identity, a point of the integer lattice
{lo..hi}^dims.  An agent pays a quadratic penalty for the distance between
its identity and the mean identity of its reference group (conformity), and
a fixed penalty per reference-group member expressing exactly the same
identity (uniqueness).  Utility is the negated sum of the two penalties, so
it is always <= 0.

Two population modes share one API.  Well-mixed: every agent observes the
whole population, the conformity target is the population mean including the
agent itself, and the uniqueness count runs over everyone else.  Networked:
agent i observes only its out-neighbors; the mean excludes i and both terms
run over the neighbor set.

All utility values are exact rationals and all ordering decisions are exact.
Reply scans avoid Fraction overhead by clearing denominators: for one agent
every candidate utility can be multiplied by the same positive integer
(group size squared times the uniqueness-weight denominator), which turns
every comparison into integer arithmetic without changing the order.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass
from fractions import Fraction
from random import Random
from typing import Iterable, Iterator, Sequence

from .network import DirectedNetwork
from .rational import as_fraction

Identity = tuple[int, ...]
Profile = tuple[Identity, ...]


class IsolatedAgentError(ValueError):
    """Utility is undefined for an agent that observes nobody."""


@dataclass(frozen=True)
class GameConfig:
    """Game parameters; network=None selects the well-mixed mode."""

    n_agents: int = 100
    dims: int = 1
    lo: int = 0
    hi: int = 199
    uniqueness_weight: Fraction = Fraction(3, 2)
    network: DirectedNetwork | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "uniqueness_weight", as_fraction(self.uniqueness_weight))
        if self.n_agents < 1:
            raise ValueError("n_agents must be positive")
        if self.dims < 1:
            raise ValueError("dims must be positive")
        if self.hi - self.lo < 1:
            raise ValueError("need hi > lo: at least two identity values per dimension")
        if self.uniqueness_weight < 0:
            raise ValueError("uniqueness_weight must be non-negative")
        if self.network is not None and self.network.n_nodes != self.n_agents:
            raise ValueError(
                f"network has {self.network.n_nodes} nodes but n_agents={self.n_agents}"
            )
        if self.uniqueness_weight <= 1:
            warnings.warn(
                "uniqueness_weight <= 1 is allowed but outside the cyclic regime; "
                "the directed-cycle counterexample and the non-convergence "
                "experiments need uniqueness_weight > 1",
                UserWarning,
                stacklevel=2,
            )

    @property
    def well_mixed(self) -> bool:
        return self.network is None

    @property
    def domain_size(self) -> int:
        return (self.hi - self.lo + 1) ** self.dims


_domain_cache: dict[tuple[int, int, int], tuple[Identity, ...]] = {}


def domain_tuple(config: GameConfig) -> tuple[Identity, ...]:
    """All identities of the domain, lexicographically ordered (cached)."""
    key = (config.lo, config.hi, config.dims)
    dom = _domain_cache.get(key)
    if dom is None:
        values = range(config.lo, config.hi + 1)
        dom = tuple(itertools.product(values, repeat=config.dims))
        _domain_cache[key] = dom
    return dom


def identity_domain(config: GameConfig) -> Iterator[Identity]:
    """Iterate the identity domain in lexicographic order."""
    return iter(domain_tuple(config))


def random_identity(rng: Random, config: GameConfig) -> Identity:
    return tuple(rng.randint(config.lo, config.hi) for _ in range(config.dims))


def random_profile(rng: Random, config: GameConfig) -> Profile:
    """Uniformly random profile, the standard initial condition for trials."""
    return tuple(random_identity(rng, config) for _ in range(config.n_agents))


def check_identity(identity: Identity, config: GameConfig) -> None:
    if len(identity) != config.dims:
        raise ValueError(f"identity {identity} does not have {config.dims} coordinates")
    for c in identity:
        if not config.lo <= c <= config.hi:
            raise ValueError(f"identity {identity} leaves the domain [{config.lo}, {config.hi}]")


def check_profile(profile: Profile, config: GameConfig) -> None:
    if len(profile) != config.n_agents:
        raise ValueError(f"profile has {len(profile)} identities for {config.n_agents} agents")
    for identity in profile:
        check_identity(identity, config)


def mean_identity(profile: Profile, members: Iterable[int]) -> tuple[Fraction, ...]:
    """Componentwise mean identity over a nonempty member set, exact."""
    idx = list(members)
    if not idx:
        raise IsolatedAgentError("mean identity over an empty reference group is undefined")
    dims = len(profile[idx[0]])
    sums = [0] * dims
    for j in idx:
        x = profile[j]
        for k in range(dims):
            sums[k] += x[k]
    return tuple(Fraction(s, len(idx)) for s in sums)


def same_count(profile: Profile, i: int, members: Iterable[int]) -> int:
    """How many members express exactly agent i's identity (all coordinates)."""
    xi = profile[i]
    return sum(1 for j in members if profile[j] == xi)


def utility_wellmixed(profile: Profile, i: int, config: GameConfig) -> Fraction:
    """Exact utility in the well-mixed mode.

    The conformity target is the mean over all agents, i included; the
    uniqueness count runs over the other agents only.
    """
    if config.network is not None:
        raise ValueError("utility_wellmixed needs a well-mixed config")
    n = config.n_agents
    if n < 2:
        raise ValueError("well-mixed utility needs at least two agents")
    xbar = mean_identity(profile, range(n))
    conformity = sum((c - m) ** 2 for c, m in zip(profile[i], xbar))
    shared = same_count(profile, i, (j for j in range(n) if j != i))
    return -conformity - config.uniqueness_weight * shared


def utility_network(
    profile: Profile, i: int, network: DirectedNetwork, config: GameConfig
) -> Fraction:
    """Exact utility in the networked mode; both terms run over eta(i)."""
    nbrs = network.out_neighbors[i]
    if not nbrs:
        raise IsolatedAgentError(f"agent {i} observes nobody; utility undefined")
    xbar = mean_identity(profile, nbrs)
    conformity = sum((c - m) ** 2 for c, m in zip(profile[i], xbar))
    shared = same_count(profile, i, nbrs)
    return -conformity - config.uniqueness_weight * shared


def utility(profile: Profile, i: int, config: GameConfig) -> Fraction:
    """Mode-dispatching exact utility."""
    if config.network is None:
        return utility_wellmixed(profile, i, config)
    return utility_network(profile, i, config.network, config)


# -- integer-scaled evaluation ------------------------------------------------
#
# For a fixed agent i, write the reference-group size as m and the group sum
# as T.  Networked: u_i(c) = -(1/m^2) * sum_k (m*c_k - T_k)^2 - w * shared(c).
# Well-mixed with T = (total sum) - x_i: the mean tracks the candidate, and
# u_i(c) = -(1/N^2) * sum_k ((N-1)*c_k - T_k)^2 - w * shared(c).  Multiplying
# by den(w) * N^2 (resp. den(w) * m^2) gives an integer that orders candidates
# exactly like the true utility.


def _scan_context(
    profile: Profile, i: int, config: GameConfig
) -> tuple[int, tuple[int, ...], int, dict[Identity, int]]:
    """(multiplier, group sum, weight factor, shared-identity counts) for agent i.

    The counts map covers the uniqueness reference group (everyone else in
    the well-mixed mode, the out-neighbors otherwise).
    """
    net = config.network
    if net is None:
        n = config.n_agents
        if n < 2:
            raise ValueError("well-mixed utility needs at least two agents")
        dims = config.dims
        sums = [0] * dims
        counts: dict[Identity, int] = {}
        for x in profile:
            for k in range(dims):
                sums[k] += x[k]
            counts[x] = counts.get(x, 0) + 1
        xi = profile[i]
        if counts[xi] == 1:
            del counts[xi]
        else:
            counts[xi] -= 1
        tsum = tuple(sums[k] - xi[k] for k in range(dims))
        return n - 1, tsum, n * n, counts
    nbrs = net.out_neighbors[i]
    if not nbrs:
        raise IsolatedAgentError(f"agent {i} observes nobody; utility undefined")
    dims = config.dims
    sums = [0] * dims
    counts = {}
    for j in nbrs:
        x = profile[j]
        for k in range(dims):
            sums[k] += x[k]
        counts[x] = counts.get(x, 0) + 1
    m = len(nbrs)
    return m, tuple(sums), m * m, counts


def _scaled_value(
    identity: Identity,
    mult: int,
    tsum: tuple[int, ...],
    wfac: int,
    counts: dict[Identity, int],
    wnum: int,
    wden: int,
) -> int:
    conformity = 0
    for c, t in zip(identity, tsum):
        v = mult * c - t
        conformity += v * v
    return -wden * conformity - wnum * wfac * counts.get(identity, 0)


def has_better_reply(
    profile: Profile,
    i: int,
    config: GameConfig,
    domain: Sequence[Identity] | None = None,
) -> bool:
    """Whether any identity strictly improves agent i's utility."""
    mult, tsum, wfac, counts = _scan_context(profile, i, config)
    w = config.uniqueness_weight
    wden, uw = w.denominator, w.numerator * wfac
    if domain is None:
        domain = domain_tuple(config)
    get = counts.get
    xi = profile[i]
    if len(tsum) == 1:
        # hot path: one-dimensional identities
        t0 = tsum[0]
        v = mult * xi[0] - t0
        cur = -wden * v * v - uw * get(xi, 0)
        for cand in domain:
            v = mult * cand[0] - t0
            if -wden * v * v - uw * get(cand, 0) > cur:
                return True
        return False
    cur = _scaled_value(xi, mult, tsum, wfac, counts, w.numerator, wden)
    for cand in domain:
        if _scaled_value(cand, mult, tsum, wfac, counts, w.numerator, wden) > cur:
            return True
    return False


def better_replies(profile: Profile, i: int, config: GameConfig) -> set[Identity]:
    """All identities strictly better for agent i than its current one."""
    mult, tsum, wfac, counts = _scan_context(profile, i, config)
    w = config.uniqueness_weight
    cur = _scaled_value(profile[i], mult, tsum, wfac, counts, w.numerator, w.denominator)
    return {
        cand
        for cand in domain_tuple(config)
        if _scaled_value(cand, mult, tsum, wfac, counts, w.numerator, w.denominator) > cur
    }


def best_responses(profile: Profile, i: int, config: GameConfig) -> set[Identity]:
    """The argmax set of agent i's utility over the whole domain, ties included."""
    mult, tsum, wfac, counts = _scan_context(profile, i, config)
    w = config.uniqueness_weight
    best: set[Identity] = set()
    best_value: int | None = None
    for cand in domain_tuple(config):
        value = _scaled_value(cand, mult, tsum, wfac, counts, w.numerator, w.denominator)
        if best_value is None or value > best_value:
            best_value = value
            best = {cand}
        elif value == best_value:
            best.add(cand)
    return best
