"""Declarative experiment specs, presets, and artifact emission.

An experiment is one JSON document with sections game / dynamics / campaign /
outputs plus exactly one population source: a generator section, an explicit
network-file list, or well_mixed.  Every run echoes the fully resolved spec
into a manifest, and a manifest can be fed back in as a spec, so any artifact
is reproducible from (manifest, master seed) alone.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from .analysis import CampaignStats, aggregate, histogram_csv_text, stats_csv_text, stats_json_dict
from .dynamics import (
    DynamicsConfig,
    SearchMode,
    TrialRecord,
    derive_seed,
    records_csv_text,
    run_campaign,
    trajectory_csv_text,
)
from .game import GameConfig
from .network import DirectedNetwork, GeneratorParams, generate, load_network, save_network, symmetrize

OUTPUT_DIR_ENV = "TRENDGAME_OUT"


class SpecError(ValueError):
    """An experiment spec failed validation."""


@dataclass(frozen=True)
class CampaignSpec:
    n_networks: int = 1
    trials_per_network: int = 1
    master_seed: int = 0

    def __post_init__(self) -> None:
        if self.n_networks < 1 or self.trials_per_network < 1:
            raise SpecError("campaign sizes must be positive")


@dataclass(frozen=True)
class OutputsSpec:
    dir: str = "out"
    records: bool = True
    stats: bool = True
    histogram: bool = True
    trajectories: bool = True


@dataclass(frozen=True)
class ExperimentSpec:
    game: GameConfig = field(default_factory=GameConfig)
    dynamics: DynamicsConfig = field(default_factory=DynamicsConfig)
    campaign: CampaignSpec = field(default_factory=CampaignSpec)
    outputs: OutputsSpec = field(default_factory=OutputsSpec)
    generator: GeneratorParams | None = None
    network_files: tuple[str, ...] = ()
    well_mixed: bool = False
    symmetrize: bool = False

    def validate(self) -> None:
        sources = (self.generator is not None) + bool(self.network_files) + self.well_mixed
        if sources != 1:
            raise SpecError(
                "exactly one population source required: generator, network_files, or well_mixed"
            )
        if self.game.network is not None:
            raise SpecError("the game section must not embed a network")
        if self.well_mixed:
            if self.campaign.n_networks != 1:
                raise SpecError("a well-mixed campaign uses n_networks=1")
            if self.symmetrize:
                raise SpecError("symmetrize has no meaning for a well-mixed population")
        if self.network_files and len(self.network_files) != self.campaign.n_networks:
            raise SpecError(
                f"campaign.n_networks={self.campaign.n_networks} but "
                f"{len(self.network_files)} network files were listed"
            )
        if self.generator is not None and self.generator.n_nodes != self.game.n_agents:
            raise SpecError("generator.n_nodes must equal game.n_agents")


def _take(section: dict, allowed: dict, where: str) -> dict:
    unknown = set(section) - set(allowed)
    if unknown:
        raise SpecError(f"unknown key(s) in {where}: {', '.join(sorted(unknown))}")
    merged = dict(allowed)
    merged.update(section)
    return merged


def spec_from_dict(data: dict) -> ExperimentSpec:
    """Build and validate a spec from a plain dict (parsed JSON)."""
    top_keys = {
        "game", "generator", "network_files", "well_mixed", "symmetrize",
        "dynamics", "campaign", "outputs",
    }
    unknown = set(data) - top_keys
    if unknown:
        raise SpecError(f"unknown top-level key(s): {', '.join(sorted(unknown))}")

    game_kw = _take(
        data.get("game", {}),
        {"n_agents": 100, "dims": 1, "lo": 0, "hi": 199, "uniqueness_weight": "3/2"},
        "game",
    )
    try:
        game = GameConfig(**game_kw)
    except (ValueError, TypeError) as exc:
        raise SpecError(f"bad game section: {exc}") from None

    generator = None
    if "generator" in data:
        gen_kw = _take(
            data["generator"],
            {
                "n_nodes": game.n_agents,
                "max_out_degree": 5,
                "n_iterations": 100,
                "pairs_per_iter": 3,
                "triad_attempts_per_iter": 40,
                "break_fraction": "1/200",
            },
            "generator",
        )
        try:
            # per-network seeds come from campaign.master_seed, never the spec
            generator = GeneratorParams(rng_seed=0, **gen_kw)
        except (ValueError, TypeError) as exc:
            raise SpecError(f"bad generator section: {exc}") from None

    dyn_kw = _take(
        data.get("dynamics", {}),
        {
            "search_mode": SearchMode.RANDOM_CANDIDATE.value,
            "max_steps": 30000,
            "check_interval": 200,
            "trajectory_sample_interval": 0,
            "trajectory_sample_offset": 0,
        },
        "dynamics",
    )
    try:
        dyn_kw["search_mode"] = SearchMode(dyn_kw["search_mode"])
        dynamics = DynamicsConfig(**dyn_kw)
    except ValueError as exc:
        raise SpecError(f"bad dynamics section: {exc}") from None

    camp_kw = _take(
        data.get("campaign", {}),
        {
            "n_networks": len(data.get("network_files", [])) or 1,
            "trials_per_network": 1,
            "master_seed": 0,
        },
        "campaign",
    )
    campaign = CampaignSpec(**camp_kw)

    out_kw = _take(
        data.get("outputs", {}),
        {"dir": "out", "records": True, "stats": True, "histogram": True, "trajectories": True},
        "outputs",
    )
    outputs = OutputsSpec(**out_kw)

    spec = ExperimentSpec(
        game=game,
        dynamics=dynamics,
        campaign=campaign,
        outputs=outputs,
        generator=generator,
        network_files=tuple(data.get("network_files", ())),
        well_mixed=bool(data.get("well_mixed", False)),
        symmetrize=bool(data.get("symmetrize", False)),
    )
    spec.validate()
    return spec


def spec_to_dict(spec: ExperimentSpec) -> dict:
    """Inverse of spec_from_dict; exact rationals become strings."""
    data: dict = {
        "game": {
            "n_agents": spec.game.n_agents,
            "dims": spec.game.dims,
            "lo": spec.game.lo,
            "hi": spec.game.hi,
            "uniqueness_weight": str(spec.game.uniqueness_weight),
        },
        "dynamics": {
            "search_mode": spec.dynamics.search_mode.value,
            "max_steps": spec.dynamics.max_steps,
            "check_interval": spec.dynamics.check_interval,
            "trajectory_sample_interval": spec.dynamics.trajectory_sample_interval,
            "trajectory_sample_offset": spec.dynamics.trajectory_sample_offset,
        },
        "campaign": {
            "n_networks": spec.campaign.n_networks,
            "trials_per_network": spec.campaign.trials_per_network,
            "master_seed": spec.campaign.master_seed,
        },
        "outputs": {
            "dir": spec.outputs.dir,
            "records": spec.outputs.records,
            "stats": spec.outputs.stats,
            "histogram": spec.outputs.histogram,
            "trajectories": spec.outputs.trajectories,
        },
        "well_mixed": spec.well_mixed,
        "symmetrize": spec.symmetrize,
    }
    if spec.generator is not None:
        data["generator"] = {
            "n_nodes": spec.generator.n_nodes,
            "max_out_degree": spec.generator.max_out_degree,
            "n_iterations": spec.generator.n_iterations,
            "pairs_per_iter": spec.generator.pairs_per_iter,
            "triad_attempts_per_iter": spec.generator.triad_attempts_per_iter,
            "break_fraction": str(spec.generator.break_fraction),
        }
    if spec.network_files:
        data["network_files"] = list(spec.network_files)
    return data


def _paper_game() -> dict:
    return {"n_agents": 100, "dims": 1, "lo": 0, "hi": 199, "uniqueness_weight": "3/2"}


# Presets run the until-discovery search: a revising agent scans the domain
# within one time step, which is what the published per-step convergence
# windows (converged within 1600 steps well-mixed, within 3000 symmetrized)
# presuppose.  One uniform candidate per step needs roughly 10x the steps.
def _paper_dynamics(max_steps: int) -> dict:
    return {"search_mode": "sequential-scan", "max_steps": max_steps, "check_interval": 200}


PRESETS: dict[str, dict] = {
    # full-scale campaign: 100 networks x 100 trials, hours of compute
    "paper-full": {
        "game": _paper_game(),
        "generator": {},
        "dynamics": _paper_dynamics(30000),
        "campaign": {"n_networks": 100, "trials_per_network": 100, "master_seed": 0},
    },
    # desk-scale campaign: 10 networks x 10 trials, minutes
    "paper-desk": {
        "game": _paper_game(),
        "generator": {},
        "dynamics": _paper_dynamics(30000),
        "campaign": {"n_networks": 10, "trials_per_network": 10, "master_seed": 0},
    },
    # seconds-scale sanity run
    "smoke": {
        "game": _paper_game(),
        "generator": {},
        "dynamics": _paper_dynamics(2000),
        "campaign": {"n_networks": 2, "trials_per_network": 2, "master_seed": 0},
    },
}


def preset_spec(name: str) -> ExperimentSpec:
    if name not in PRESETS:
        raise SpecError(f"unknown preset {name!r}; available: {', '.join(sorted(PRESETS))}")
    return spec_from_dict(json.loads(json.dumps(PRESETS[name])))


def load_spec(path) -> ExperimentSpec:
    """Load a spec file; a run manifest (with its 'experiment' key) also works."""
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    if "experiment" in data:
        data = data["experiment"]
    return spec_from_dict(data)


def network_seeds(spec: ExperimentSpec) -> list[int]:
    return [
        derive_seed(spec.campaign.master_seed, "network", i)
        for i in range(spec.campaign.n_networks)
    ]


def resolve_networks(spec: ExperimentSpec) -> list[DirectedNetwork | None]:
    """Materialize the population source (generate, load, or well-mixed)."""
    if spec.well_mixed:
        return [None]
    if spec.generator is not None:
        nets: list[DirectedNetwork] = [
            generate(replace(spec.generator, rng_seed=s)) for s in network_seeds(spec)
        ]
    else:
        nets = [load_network(p) for p in spec.network_files]
        for path, net in zip(spec.network_files, nets):
            if net.n_nodes != spec.game.n_agents:
                raise SpecError(
                    f"network file {path} has {net.n_nodes} nodes, game.n_agents is "
                    f"{spec.game.n_agents}"
                )
    if spec.symmetrize:
        nets = [symmetrize(net) for net in nets]
    return list(nets)


@dataclass
class ExperimentResult:
    spec: ExperimentSpec
    networks: list[DirectedNetwork | None]
    records: list[TrialRecord]
    stats: CampaignStats


def run_experiment(spec: ExperimentSpec, workers: int = 1) -> ExperimentResult:
    spec.validate()
    networks = resolve_networks(spec)
    records = run_campaign(
        networks,
        spec.campaign.trials_per_network,
        spec.game,
        spec.dynamics,
        spec.campaign.master_seed,
        workers=workers,
    )
    return ExperimentResult(spec=spec, networks=networks, records=records, stats=aggregate(records))


def manifest_dict(spec: ExperimentSpec) -> dict:
    from . import __version__

    data = {"experiment": spec_to_dict(spec), "package_version": __version__}
    if spec.generator is not None:
        data["network_seeds"] = network_seeds(spec)
    return data


def _write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def write_manifest(spec: ExperimentSpec, out_dir: Path) -> Path:
    path = out_dir / "manifest.json"
    _write_text(path, json.dumps(manifest_dict(spec), indent=2, sort_keys=True) + "\n")
    return path


def write_run_artifacts(result: ExperimentResult, out_dir: Path) -> list[Path]:
    """Emit records/stats/histogram (and trajectories, networks) plus manifest."""
    spec = result.spec
    written: list[Path] = []
    if spec.outputs.records:
        path = out_dir / "records.csv"
        _write_text(path, records_csv_text(result.records))
        written.append(path)
    if spec.outputs.stats:
        path = out_dir / "stats.json"
        _write_text(path, json.dumps(stats_json_dict(result.stats), indent=2, sort_keys=True) + "\n")
        written.append(path)
    if spec.outputs.histogram:
        path = out_dir / "histogram.csv"
        _write_text(path, histogram_csv_text(result.stats))
        written.append(path)
        path = out_dir / "stats_per_network.csv"
        _write_text(path, stats_csv_text(result.stats))
        written.append(path)
    if spec.generator is not None:
        for i, net in enumerate(result.networks):
            path = out_dir / "networks" / f"network_{i:03d}.txt"
            path.parent.mkdir(parents=True, exist_ok=True)
            save_network(net, path)
            written.append(path)
    if spec.outputs.trajectories:
        for record in result.records:
            if record.samples:
                path = (
                    out_dir
                    / "trajectories"
                    / f"trajectory_n{record.network_id:03d}_t{record.trial_id:03d}.csv"
                )
                _write_text(path, trajectory_csv_text(record))
                written.append(path)
    written.append(write_manifest(spec, out_dir))
    return written


def write_generated_networks(spec: ExperimentSpec, out_dir: Path) -> list[Path]:
    """Generate campaign networks and write one edge-list file per index."""
    if spec.generator is None:
        raise SpecError("generate needs a generator section in the spec")
    seeds = network_seeds(spec)
    written = []
    for i, seed in enumerate(seeds):
        net = generate(replace(spec.generator, rng_seed=seed))
        path = out_dir / f"network_{i:03d}.txt"
        path.parent.mkdir(parents=True, exist_ok=True)
        save_network(net, path)
        written.append(path)
    written.append(write_manifest(spec, out_dir))
    return written
