"""Command-line entry point: generate | run | verify | snapshot.

Scientific outcomes (non-convergence) are data, not errors; only broken
specs, missing files, or failed oracles exit nonzero.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .analysis import (
    EnumerationBudgetError,
    enumerate_pure_nash,
    verify_exact_potential,
)
from .dynamics import parse_trajectory_csv
from .experiment import (
    OUTPUT_DIR_ENV,
    PRESETS,
    SpecError,
    load_spec,
    preset_spec,
    run_experiment,
    write_generated_networks,
    write_run_artifacts,
)
from .game import GameConfig
from .network import GeneratorParams, directed_cycle, generate, load_network, write_dot, write_network


def _add_spec_args(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--spec", type=Path, help="experiment spec JSON (or a run manifest)")
    sub.add_argument("--preset", choices=sorted(PRESETS), help="built-in experiment spec")
    sub.add_argument("--seed", type=int, help="override campaign.master_seed")
    sub.add_argument("--out", type=Path, help="output directory (overrides spec and env)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="trendgame",
        description="identity-game experiments on directed social networks",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    gen = subs.add_parser("generate", help="write campaign networks as edge-list files")
    _add_spec_args(gen)
    gen.set_defaults(func=cmd_generate)

    run = subs.add_parser("run", help="run a campaign and write records/stats artifacts")
    _add_spec_args(run)
    run.add_argument(
        "--workers", type=int, default=os.cpu_count() or 1,
        help="parallel trial workers (default: available parallelism)",
    )
    run.set_defaults(func=cmd_run)

    ver = subs.add_parser("verify", help="run the built-in oracle checks")
    ver.add_argument("--seed", type=int, default=0, help="seed for sampled checks")
    ver.add_argument("--samples", type=int, default=1000, help="deviations per potential check")
    ver.set_defaults(func=cmd_verify)

    snap = subs.add_parser("snapshot", help="export DOT snapshots from a sampled trajectory")
    snap.add_argument("--network", type=Path, required=True, help="edge-list network file")
    snap.add_argument("--trajectory", type=Path, required=True, help="trajectory CSV")
    snap.add_argument(
        "--steps", required=True,
        help="comma-separated sampled steps to export (empty for none)",
    )
    snap.add_argument("--out", type=Path, help="output directory (overrides env)")
    snap.set_defaults(func=cmd_snapshot)
    return parser


def _resolve_spec(args: argparse.Namespace):
    if (args.spec is None) == (args.preset is None):
        raise SpecError("give exactly one of --spec or --preset")
    spec = preset_spec(args.preset) if args.preset else load_spec(args.spec)
    if args.seed is not None:
        from dataclasses import replace

        spec = replace(spec, campaign=replace(spec.campaign, master_seed=args.seed))
    out = args.out or os.environ.get(OUTPUT_DIR_ENV)
    if out is not None:
        from dataclasses import replace

        spec = replace(spec, outputs=replace(spec.outputs, dir=str(out)))
    return spec


def cmd_generate(args: argparse.Namespace) -> int:
    spec = _resolve_spec(args)
    out_dir = Path(spec.outputs.dir)
    written = write_generated_networks(spec, out_dir)
    print(f"wrote {len(written) - 1} network file(s) and manifest to {out_dir}")
    return 0


def cmd_run(args: argparse.Namespace) -> int:
    spec = _resolve_spec(args)
    result = run_experiment(spec, workers=max(1, args.workers))
    out_dir = Path(spec.outputs.dir)
    write_run_artifacts(result, out_dir)
    stats = result.stats
    print(
        f"{stats.n_trials} trial(s) on {stats.n_networks} population(s): "
        f"{stats.n_nonconvergent} non-convergent "
        f"(rate {stats.nonconvergence_rate})"
    )
    print(f"artifacts in {out_dir}")
    return 0


def _check(name: str, passed: bool, detail: str) -> bool:
    print(f"{'PASS' if passed else 'FAIL'} {name}: {detail}")
    return passed


def cmd_verify(args: argparse.Namespace) -> int:
    ok = True

    for dims in (1, 2):
        config = GameConfig(n_agents=10, dims=dims, lo=0, hi=5, uniqueness_weight="3/2")
        report = verify_exact_potential(config, args.samples, args.seed)
        ok &= _check(
            f"exact-potential-d{dims}",
            report.passed,
            f"{report.n_samples} deviations, {len(report.violations)} violation(s)",
        )

    cycle = directed_cycle(3)
    config = GameConfig(n_agents=3, dims=1, lo=0, hi=3, uniqueness_weight="3/2", network=cycle)
    try:
        nash = enumerate_pure_nash(config)
        ok &= _check(
            "cycle-has-no-equilibrium", not nash, f"{len(nash)} pure equilibria found"
        )
    except EnumerationBudgetError as exc:
        print(f"SKIP cycle-has-no-equilibrium: {exc}")

    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        config0 = GameConfig(n_agents=3, dims=1, lo=0, hi=1, uniqueness_weight=0, network=cycle)
    try:
        nash0 = enumerate_pure_nash(config0)
        homogeneous = [tuple((v,) for _ in range(3)) for v in (0, 1)]
        ok &= _check(
            "zero-weight-homogeneous-equilibria",
            all(h in nash0 for h in homogeneous),
            f"{len(nash0)} pure equilibria include both homogeneous profiles",
        )
    except EnumerationBudgetError as exc:
        print(f"SKIP zero-weight-homogeneous-equilibria: {exc}")

    gen_ok = True
    detail = "5 seeds: degree cap, validity, determinism"
    for seed in range(5):
        params = GeneratorParams(rng_seed=args.seed + seed)
        net = generate(params)
        if max(net.out_degree(i) for i in range(net.n_nodes)) > params.max_out_degree:
            gen_ok, detail = False, f"degree cap violated for seed {seed}"
            break
        if write_network(net) != write_network(generate(params)):
            gen_ok, detail = False, f"seed {seed} is not reproducible"
            break
    ok &= _check("generator-invariants", gen_ok, detail)

    return 0 if ok else 1


def cmd_snapshot(args: argparse.Namespace) -> int:
    network = load_network(args.network)
    with open(args.trajectory, "r", encoding="utf-8") as fh:
        samples = parse_trajectory_csv(fh.read())
    available = {step: profile for step, profile in samples}
    wanted = [int(s) for s in args.steps.split(",") if s.strip()]
    missing = [s for s in wanted if s not in available]
    if missing:
        steps_list = ", ".join(str(s) for s, _ in samples)
        print(
            f"error: step(s) {missing} not sampled; available steps: {steps_list}",
            file=sys.stderr,
        )
        return 2
    if not wanted:
        return 0
    out_dir = Path(args.out or os.environ.get(OUTPUT_DIR_ENV) or ".")
    out_dir.mkdir(parents=True, exist_ok=True)
    # one shared shade scale across the requested steps, so files compare
    values = [x[0] for s in wanted for x in available[s]]
    value_range = (min(values), max(values))
    for s in wanted:
        path = out_dir / f"snapshot_step_{s}.dot"
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(write_dot(network, available[s], value_range))
        print(f"wrote {path}")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (SpecError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
