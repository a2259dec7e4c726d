"""Asynchronous better-reply dynamics with periodic equilibrium checks.

One agent per time step gets a revision opportunity and switches only on a
strict utility improvement.  Trials stop at the first periodic check that
finds a pure equilibrium, or at the step cap.  Campaigns fan trials out over
immutable networks with per-trial seeds derived from one master seed, so a
campaign is reproducible regardless of scheduling.
"""

from __future__ import annotations

import enum
import hashlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from random import Random
from typing import Sequence

from .game import (
    GameConfig,
    Identity,
    Profile,
    _scaled_value,
    _scan_context,
    check_profile,
    domain_tuple,
    has_better_reply,
    random_identity,
    random_profile,
    utility,
)
from .network import DirectedNetwork


class SearchMode(enum.Enum):
    """How a revising agent searches the domain for a better reply."""

    RANDOM_CANDIDATE = "random-candidate"
    SEQUENTIAL_SCAN = "sequential-scan"


@dataclass(frozen=True)
class DynamicsConfig:
    search_mode: SearchMode = SearchMode.RANDOM_CANDIDATE
    max_steps: int = 30000
    check_interval: int = 200
    trajectory_sample_interval: int = 0  # 0 = no trajectory capture
    trajectory_sample_offset: int = 0
    rng_seed: int = 0
    record_revisions: bool = False
    verify_revisions: bool = False  # exact re-check of every adopted revision

    def __post_init__(self) -> None:
        if self.max_steps < 1:
            raise ValueError("max_steps must be positive")
        if not 1 <= self.check_interval <= self.max_steps:
            raise ValueError("check_interval must lie in [1, max_steps]")
        if self.trajectory_sample_interval < 0 or self.trajectory_sample_offset < 0:
            raise ValueError("trajectory sampling knobs must be non-negative")


@dataclass(frozen=True)
class Revision:
    agent: int
    old: Identity
    new: Identity


@dataclass(frozen=True)
class TrialRecord:
    network_id: int
    trial_id: int
    seed: int
    converged: bool
    steps_elapsed: int
    final_profile: Profile
    samples: tuple[tuple[int, Profile], ...] = ()
    revisions: tuple[tuple[int, int, Identity, Identity], ...] | None = None


def step(
    profile: Profile,
    config: GameConfig,
    rng: Random,
    search_mode: SearchMode = SearchMode.RANDOM_CANDIDATE,
) -> tuple[Profile, Revision | None]:
    """One time step: a uniformly chosen agent considers switching.

    RANDOM_CANDIDATE draws a single uniform candidate identity and adopts it
    only on a strict improvement.  SEQUENTIAL_SCAN shuffles the whole domain
    and adopts the first strict improvement found.  At most one agent changes
    per step; an agent that observes nobody never revises.
    """
    i = rng.randrange(config.n_agents)
    net = config.network
    if net is not None and not net.out_neighbors[i]:
        return profile, None
    mult, tsum, wfac, counts = _scan_context(profile, i, config)
    w = config.uniqueness_weight
    wnum, wden = w.numerator, w.denominator
    xi = profile[i]
    cur = _scaled_value(xi, mult, tsum, wfac, counts, wnum, wden)
    if search_mode is SearchMode.RANDOM_CANDIDATE:
        cand = random_identity(rng, config)
        if _scaled_value(cand, mult, tsum, wfac, counts, wnum, wden) > cur:
            return profile[:i] + (cand,) + profile[i + 1 :], Revision(i, xi, cand)
        return profile, None
    order = list(domain_tuple(config))
    rng.shuffle(order)
    for cand in order:
        if _scaled_value(cand, mult, tsum, wfac, counts, wnum, wden) > cur:
            return profile[:i] + (cand,) + profile[i + 1 :], Revision(i, xi, cand)
    return profile, None


def is_pure_nash(profile: Profile, config: GameConfig) -> bool:
    """True iff no agent has a strictly better reply anywhere in the domain.

    Agents that observe nobody have no defined utility and are vacuously
    satisfied.
    """
    domain = domain_tuple(config)
    net = config.network
    for i in range(config.n_agents):
        if net is not None and not net.out_neighbors[i]:
            continue
        if has_better_reply(profile, i, config, domain):
            return False
    return True


def _verify_revision(before: Profile, after: Profile, rev: Revision, config: GameConfig) -> None:
    # test-mode cross-check on the exact-rational route
    gain = utility(after, rev.agent, config) - utility(before, rev.agent, config)
    if gain <= 0:
        raise AssertionError(f"adopted revision {rev} does not improve utility (gain {gain})")
    if config.network is None:
        from .analysis import potential

        dphi = potential(after, config) - potential(before, config)
        if dphi != gain:
            raise AssertionError(
                f"potential change {dphi} != utility change {gain} for revision {rev}"
            )


def run_trial(
    config: GameConfig,
    dynamics: DynamicsConfig,
    initial: Profile | None = None,
    network_id: int = 0,
    trial_id: int = 0,
) -> TrialRecord:
    """Run better-reply dynamics until an equilibrium check passes or the cap.

    The initial profile is drawn uniformly when not given.  Convergence is
    evaluated every check_interval steps; a converged record's final profile
    passes is_pure_nash by construction.  Trajectory samples are taken at
    steps offset, offset+interval, ... when sampling is enabled.
    """
    rng = Random(dynamics.rng_seed)
    if initial is None:
        profile = random_profile(rng, config)
    else:
        profile = tuple(tuple(x) for x in initial)
        check_profile(profile, config)
    interval = dynamics.trajectory_sample_interval
    offset = dynamics.trajectory_sample_offset
    samples: list[tuple[int, Profile]] = []
    if interval and offset == 0:
        samples.append((0, profile))
    revisions: list[tuple[int, int, Identity, Identity]] | None = (
        [] if dynamics.record_revisions else None
    )
    converged = False
    steps_elapsed = dynamics.max_steps
    for s in range(1, dynamics.max_steps + 1):
        before = profile
        profile, rev = step(profile, config, rng, dynamics.search_mode)
        if rev is not None:
            if dynamics.verify_revisions:
                _verify_revision(before, profile, rev, config)
            if revisions is not None:
                revisions.append((s, rev.agent, rev.old, rev.new))
        if interval and s >= offset and (s - offset) % interval == 0:
            samples.append((s, profile))
        if s % dynamics.check_interval == 0 and is_pure_nash(profile, config):
            converged = True
            steps_elapsed = s
            break
    return TrialRecord(
        network_id=network_id,
        trial_id=trial_id,
        seed=dynamics.rng_seed,
        converged=converged,
        steps_elapsed=steps_elapsed,
        final_profile=profile,
        samples=tuple(samples),
        revisions=tuple(revisions) if revisions is not None else None,
    )


def derive_seed(master_seed: int, *parts) -> int:
    """Stable 64-bit seed derived from a master seed and a label path."""
    key = ":".join([str(master_seed), *map(str, parts)])
    digest = hashlib.sha256(key.encode("ascii")).digest()
    return int.from_bytes(digest[:8], "big")


def _run_trial_job(job) -> TrialRecord:
    network_id, trial_id, config, dynamics = job
    return run_trial(config, dynamics, network_id=network_id, trial_id=trial_id)


def run_campaign(
    networks: Sequence[DirectedNetwork | None],
    trials_per_network: int,
    game_template: GameConfig,
    dynamics_template: DynamicsConfig,
    master_seed: int,
    workers: int = 1,
) -> list[TrialRecord]:
    """Independent trials over a list of networks (None = well-mixed).

    Per-trial seeds are derived from (master_seed, network index, trial
    index), so the record list is identical for any worker count; output is
    ordered by (network, trial).
    """
    if not networks:
        raise ValueError("network list must be nonempty")
    if trials_per_network < 1:
        raise ValueError("trials_per_network must be positive")
    jobs = []
    for ni, net in enumerate(networks):
        cfg = replace(game_template, network=net)
        for ti in range(trials_per_network):
            dyn = replace(
                dynamics_template, rng_seed=derive_seed(master_seed, "trial", ni, ti)
            )
            jobs.append((ni, ti, cfg, dyn))
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_run_trial_job, jobs, chunksize=1))
    else:
        records = [_run_trial_job(job) for job in jobs]
    records.sort(key=lambda r: (r.network_id, r.trial_id))
    return records


def records_csv_text(records: Sequence[TrialRecord]) -> str:
    """One row per trial: network_id, trial_id, seed, converged (0/1), steps."""
    lines = ["network_id,trial_id,seed,converged,steps"]
    for r in sorted(records, key=lambda r: (r.network_id, r.trial_id)):
        lines.append(f"{r.network_id},{r.trial_id},{r.seed},{int(r.converged)},{r.steps_elapsed}")
    return "\n".join(lines) + "\n"


def trajectory_csv_text(record: TrialRecord) -> str:
    """Sampled trajectory rows: step, agent, then one column per coordinate."""
    if not record.samples:
        raise ValueError("record has no trajectory samples")
    dims = len(record.samples[0][1][0])
    header = "step,agent," + ",".join(f"c{k}" for k in range(dims))
    lines = [header]
    for step_no, profile in record.samples:
        for agent, identity in enumerate(profile):
            coords = ",".join(str(c) for c in identity)
            lines.append(f"{step_no},{agent},{coords}")
    return "\n".join(lines) + "\n"


def parse_trajectory_csv(text: str) -> list[tuple[int, Profile]]:
    """Inverse of trajectory_csv_text; returns (step, profile) samples in order."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("step,agent,"):
        raise ValueError("not a trajectory CSV (bad header)")
    by_step: dict[int, list[tuple[int, Identity]]] = {}
    order: list[int] = []
    for ln in lines[1:]:
        parts = ln.split(",")
        step_no, agent = int(parts[0]), int(parts[1])
        identity = tuple(int(c) for c in parts[2:])
        if step_no not in by_step:
            by_step[step_no] = []
            order.append(step_no)
        by_step[step_no].append((agent, identity))
    samples = []
    for step_no in order:
        rows = by_step[step_no]
        if sorted(agent for agent, _ in rows) != list(range(len(rows))):
            raise ValueError(f"trajectory rows for step {step_no} do not cover agents 0..N-1")
        profile = tuple(identity for _, identity in sorted(rows))
        samples.append((step_no, profile))
    return samples
