"""Oracles and statistics for the identity game.

The well-mixed game admits an exact potential: a single scalar function of
the profile whose change under any unilateral deviation equals the deviating
agent's utility change.  That identity is checked here on random deviations
with exact rationals, which is the executable form of the convergence
argument (the potential is bounded above, every adopted revision raises it,
so revisions are finite).

Also here: exhaustive pure-equilibrium enumeration for small instances (the
ground-truth oracle), popularity time series, and campaign aggregation.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from random import Random
from typing import TYPE_CHECKING, Callable, Iterable, Sequence

from .game import (
    GameConfig,
    Identity,
    Profile,
    domain_tuple,
    mean_identity,
    random_identity,
    random_profile,
    same_count,
    utility,
)

if TYPE_CHECKING:
    from .dynamics import TrialRecord

DEFAULT_ENUM_BUDGET = 10_000_000


class EnumerationBudgetError(RuntimeError):
    """The profile space is too large for exhaustive enumeration."""

    def __init__(self, required: int, budget: int):
        super().__init__(
            f"enumeration needs a budget of {required} profiles, configured budget is {budget}"
        )
        self.required = required
        self.budget = budget


def potential(profile: Profile, config: GameConfig) -> Fraction:
    """Exact potential of the well-mixed game.

    Phi(X) = -sum_i [ ((N-1)/N) * ||x_i - xbar||^2 + (1/2) * w * shared_i(X) ].
    Defined only for the well-mixed mode.
    """
    if config.network is not None:
        raise ValueError("the potential is defined only for the well-mixed game")
    n = config.n_agents
    if n < 2:
        raise ValueError("the potential needs at least two agents")
    xbar = mean_identity(profile, range(n))
    total = Fraction(0)
    counts = Counter(profile)
    for i in range(n):
        xi = profile[i]
        conformity = sum((c - m) ** 2 for c, m in zip(xi, xbar))
        shared = counts[xi] - 1
        total += Fraction(n - 1, n) * conformity + Fraction(1, 2) * config.uniqueness_weight * shared
    return -total


@dataclass(frozen=True)
class PotentialCheck:
    """Outcome of sampling the exact-potential identity."""

    n_samples: int
    violations: tuple[str, ...] = ()

    @property
    def passed(self) -> bool:
        return not self.violations


def verify_exact_potential(config: GameConfig, n_samples: int, rng_seed: int) -> PotentialCheck:
    """Sample random unilateral deviations and check dPhi == du exactly.

    Each sample draws a uniform profile, a uniform agent, and a uniform
    replacement identity, then compares the potential change against the
    agent's utility change with exact rationals.  Any mismatch is reported
    verbatim; the expected report is empty.
    """
    if config.network is not None:
        raise ValueError("the exact-potential check applies to the well-mixed game")
    rng = Random(rng_seed)
    violations = []
    for _ in range(n_samples):
        profile = random_profile(rng, config)
        i = rng.randrange(config.n_agents)
        new = random_identity(rng, config)
        deviated = profile[:i] + (new,) + profile[i + 1 :]
        dphi = potential(deviated, config) - potential(profile, config)
        du = utility(deviated, i, config) - utility(profile, i, config)
        if dphi != du:
            violations.append(
                f"profile={profile} agent={i} new={new} dphi={dphi} du={du}"
            )
    return PotentialCheck(n_samples=n_samples, violations=tuple(violations))


def _exact_is_nash(profile: Profile, config: GameConfig) -> bool:
    # Exact-rational route, independent of the integer-scaled scan used by
    # dynamics.is_pure_nash; the two are cross-checked in the test suite.
    net = config.network
    domain = domain_tuple(config)
    for i in range(config.n_agents):
        if net is not None and not net.out_neighbors[i]:
            continue
        current = utility(profile, i, config)
        for cand in domain:
            if cand == profile[i]:
                continue
            deviated = profile[:i] + (cand,) + profile[i + 1 :]
            if utility(deviated, i, config) > current:
                return False
    return True


def enumerate_pure_nash(
    config: GameConfig, budget: int = DEFAULT_ENUM_BUDGET
) -> list[Profile]:
    """Exhaustively enumerate the pure equilibria of a small instance.

    Refuses (with the required budget) rather than sampling when the profile
    space exceeds the budget: an oracle must be exhaustive or absent.
    Profiles come back in lexicographic order.
    """
    required = config.domain_size ** config.n_agents
    if required > budget:
        raise EnumerationBudgetError(required, budget)
    domain = domain_tuple(config)
    return [
        profile
        for profile in itertools.product(domain, repeat=config.n_agents)
        if _exact_is_nash(profile, config)
    ]


def popularity_series(
    samples: Sequence[tuple[int, Profile]],
) -> list[tuple[int, Identity, int]]:
    """Adoption counts per sampled step: rows of (step, identity, count).

    Counts at each step sum to the number of agents; rows are sorted by
    (step, identity).
    """
    rows: list[tuple[int, Identity, int]] = []
    for step_no, profile in samples:
        counts = Counter(profile)
        rows.extend((step_no, identity, n) for identity, n in sorted(counts.items()))
    return rows


def identity_span(profile: Profile) -> int:
    """Largest per-dimension spread of expressed identities."""
    dims = len(profile[0])
    return max(
        max(x[k] for x in profile) - min(x[k] for x in profile) for k in range(dims)
    )


def band_settle_step(
    samples: Sequence[tuple[int, Profile]], max_width: int = 8
) -> int | None:
    """First sampled step from which every later sample stays within max_width.

    Returns None when the population never settles into a narrow band for
    the rest of the sampled trajectory.
    """
    settle: int | None = None
    for step_no, profile in samples:
        if identity_span(profile) <= max_width:
            if settle is None:
                settle = step_no
        else:
            settle = None
    return settle


@dataclass
class CampaignStats:
    """Aggregated campaign outcome; rates are exact rationals."""

    n_networks: int
    n_trials: int
    n_nonconvergent: int
    nonconvergence_rate: Fraction
    per_network_trials: dict[int, int]
    per_network_nonconvergent: dict[int, int]
    histogram: dict[int, int]
    convergence_steps_quantiles: dict[str, int]


_QUANTILES = (("min", 0, 1), ("p25", 1, 4), ("median", 1, 2), ("p75", 3, 4), ("p90", 9, 10), ("max", 1, 1))


def aggregate(
    records: Sequence["TrialRecord"],
    group_key: Callable[["TrialRecord"], int] | None = None,
) -> CampaignStats:
    """Fold trial records into per-network counts, a histogram, and quantiles.

    The histogram maps each observed non-convergent-trial count to the
    number of networks showing it; its masses sum to the network count.
    Quantiles (nearest rank) cover the steps of converged trials only.
    The result does not depend on record order.
    """
    if not records:
        raise ValueError("no records to aggregate")
    key = group_key or (lambda r: r.network_id)
    groups: dict[int, list["TrialRecord"]] = {}
    for r in records:
        groups.setdefault(key(r), []).append(r)
    per_trials = {g: len(rs) for g, rs in sorted(groups.items())}
    per_nonconv = {
        g: sum(1 for r in rs if not r.converged) for g, rs in sorted(groups.items())
    }
    histogram: dict[int, int] = {}
    for count in sorted(per_nonconv.values()):
        histogram[count] = histogram.get(count, 0) + 1
    n_trials = len(records)
    n_nonconv = sum(per_nonconv.values())
    steps = sorted(r.steps_elapsed for r in records if r.converged)
    quantiles: dict[str, int] = {}
    if steps:
        n = len(steps)
        for label, num, den in _QUANTILES:
            rank = max(1, math.ceil(Fraction(num * n, den)))
            quantiles[label] = steps[min(rank, n) - 1]
    return CampaignStats(
        n_networks=len(groups),
        n_trials=n_trials,
        n_nonconvergent=n_nonconv,
        nonconvergence_rate=Fraction(n_nonconv, n_trials),
        per_network_trials=per_trials,
        per_network_nonconvergent=per_nonconv,
        histogram=histogram,
        convergence_steps_quantiles=quantiles,
    )


def stats_csv_text(stats: CampaignStats) -> str:
    """Per-network stats rows: network_id, trials, nonconvergent, rate."""
    lines = ["network_id,trials,nonconvergent,nonconvergence_rate"]
    for g in sorted(stats.per_network_trials):
        trials = stats.per_network_trials[g]
        bad = stats.per_network_nonconvergent[g]
        lines.append(f"{g},{trials},{bad},{Fraction(bad, trials)}")
    return "\n".join(lines) + "\n"


def histogram_csv_text(stats: CampaignStats) -> str:
    """Histogram rows: nonconvergent trial count -> number of networks."""
    lines = ["nonconvergent_trials,network_count"]
    for count in sorted(stats.histogram):
        lines.append(f"{count},{stats.histogram[count]}")
    return "\n".join(lines) + "\n"


def stats_json_dict(stats: CampaignStats) -> dict:
    """JSON-ready summary; exact rates are strings, floats are convenience."""
    return {
        "n_networks": stats.n_networks,
        "n_trials": stats.n_trials,
        "n_nonconvergent": stats.n_nonconvergent,
        "nonconvergence_rate": str(stats.nonconvergence_rate),
        "nonconvergence_rate_float": float(stats.nonconvergence_rate),
        "per_network_nonconvergent": {
            str(g): stats.per_network_nonconvergent[g]
            for g in sorted(stats.per_network_nonconvergent)
        },
        "histogram": {str(k): stats.histogram[k] for k in sorted(stats.histogram)},
        "convergence_steps_quantiles": stats.convergence_steps_quantiles,
    }
