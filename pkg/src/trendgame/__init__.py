"""Conformity/uniqueness identity games on directed social networks.

Exact-rational utilities, better-reply dynamics, equilibrium oracles, a
seeded network growth model, and a reproducible experiment harness.
"""

from .analysis import (
    CampaignStats,
    EnumerationBudgetError,
    PotentialCheck,
    aggregate,
    band_settle_step,
    enumerate_pure_nash,
    identity_span,
    popularity_series,
    potential,
    verify_exact_potential,
)
from .dynamics import (
    DynamicsConfig,
    Revision,
    SearchMode,
    TrialRecord,
    derive_seed,
    is_pure_nash,
    run_campaign,
    run_trial,
    step,
)
from .game import (
    GameConfig,
    Identity,
    IsolatedAgentError,
    Profile,
    best_responses,
    better_replies,
    identity_domain,
    mean_identity,
    random_profile,
    same_count,
    utility,
    utility_network,
    utility_wellmixed,
)
from .network import (
    DirectedNetwork,
    GeneratorParams,
    NetworkParseError,
    directed_cycle,
    generate,
    load_network,
    read_network,
    save_network,
    symmetrize,
    write_dot,
    write_network,
)

__version__ = "0.1.0"

__all__ = [
    "CampaignStats",
    "DirectedNetwork",
    "DynamicsConfig",
    "EnumerationBudgetError",
    "GameConfig",
    "GeneratorParams",
    "Identity",
    "IsolatedAgentError",
    "NetworkParseError",
    "PotentialCheck",
    "Profile",
    "Revision",
    "SearchMode",
    "TrialRecord",
    "aggregate",
    "band_settle_step",
    "best_responses",
    "better_replies",
    "derive_seed",
    "directed_cycle",
    "enumerate_pure_nash",
    "generate",
    "identity_domain",
    "identity_span",
    "is_pure_nash",
    "load_network",
    "mean_identity",
    "popularity_series",
    "potential",
    "random_profile",
    "read_network",
    "run_campaign",
    "run_trial",
    "same_count",
    "save_network",
    "step",
    "symmetrize",
    "utility",
    "utility_network",
    "utility_wellmixed",
    "verify_exact_potential",
    "write_dot",
    "write_network",
]
