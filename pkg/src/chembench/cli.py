"""Operator command line: rollouts, bench pipelines, renders, validation.

    chembench rollout  --bench rxn --scenario wurtz --policy heuristic \
                       --episodes 100 --seed 7 --out runs/wurtz
    chembench pipeline --stages rxn:heuristic,dit:heuristic --target dodecane \
                       --seed 7 --out runs/flow
    chembench render   --vessel runs/flow/stage1_DV.json --out-pixels col.pgm \
                       --out-spectrum spec.txt --seed 0
    chembench validate --registry materials.yaml --reactions wurtz.rxn

Every command with a --seed flag is bit-reproducible on the same data files.
Exit code 2 signals a configuration problem, with the diagnostic on stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import solvents as dyn
from .benches import BENCH_KINDS, make_bench
from .benches.base import AIR_SHADE, material_shades
from .errors import BenchError, ConfigError
from .kinetics import load_network
from .materials import load_registry
from .policies import ReturnStats, make_policy, run_episode, rollout
from .snapshots import TrajectoryLog, load_vessel, save_vessel, vessel_from_state
from .spectra import uv_vis
from .vessel import absolute_purity, salt_unit_moles


def _write_stats(stats: ReturnStats, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(stats.to_dict(), indent=2, sort_keys=True) + "\n")


def _merge_stats(parts: list[ReturnStats]) -> ReturnStats:
    returns = [r for part in parts for r in part.returns]
    sums: dict[str, float] = {}
    counts: dict[str, int] = {}
    for part in parts:
        for target, mean in part.per_target.items():
            n = part.per_target_episodes[target]
            sums[target] = sums.get(target, 0.0) + mean * n
            counts[target] = counts.get(target, 0) + n
    arr = np.asarray(returns)
    return ReturnStats(
        episodes=len(returns),
        mean=float(arr.mean()),
        std=float(arr.std()),
        per_target={t: sums[t] / counts[t] for t in sums},
        per_target_episodes=counts,
    )


def _rollout_slice(args: tuple) -> ReturnStats:
    kind, scenario, config, policy_name, episodes, seed, target, steps = args
    env = make_bench(kind, scenario=scenario, config=config, seed=seed)
    policy = make_policy(policy_name, kind, scenario, seed=seed)
    return rollout(
        env, policy, episodes=episodes, seed=seed, target=target,
        max_steps=steps, keep_returns=True,
    )


def _logged_rollout(args, out: Path) -> ReturnStats:
    """Sequential pass writing the trajectory log while gathering stats."""
    env = make_bench(args.bench, scenario=args.scenario, config=args.config,
                     seed=args.seed)
    policy = make_policy(args.policy, args.bench, args.scenario, seed=args.seed)
    returns = []
    sums: dict[str, float] = {}
    counts: dict[str, int] = {}
    with TrajectoryLog(out / "trajectories.jsonl") as log:
        for episode in range(args.episodes):
            records = []
            total, vessels = run_episode(
                env, policy, seed=args.seed if episode == 0 else None,
                target=args.target, max_steps=args.steps,
                on_step=lambda s, a, r: records.append((s, a, r)),
            )
            snapshot_paths = []
            if args.save_vessels and vessels:
                for state in vessels:
                    path = out / "vessels" / f"ep{episode:04d}_{state['label']}.json"
                    path.parent.mkdir(parents=True, exist_ok=True)
                    path.write_text(
                        json.dumps(state, indent=2, sort_keys=True) + "\n"
                    )
                    snapshot_paths.append(str(path))
            for step, action, result in records:
                extra = None
                if result.done and snapshot_paths:
                    extra = {"vessels": snapshot_paths}
                log.record(episode, step, action, result.reward, result.done,
                           extra=extra)
            returns.append(total)
            sums[env.target] = sums.get(env.target, 0.0) + total
            counts[env.target] = counts.get(env.target, 0) + 1
    arr = np.asarray(returns)
    return ReturnStats(
        episodes=len(returns),
        mean=float(arr.mean()),
        std=float(arr.std()),
        per_target={t: sums[t] / counts[t] for t in sums},
        per_target_episodes=counts,
    )


def cmd_rollout(args: argparse.Namespace) -> int:
    out = Path(args.out) if args.out else None
    if args.parallel <= 1 and out is not None:
        stats = _logged_rollout(args, out)
    else:
        plan = []
        per_worker = args.episodes // args.parallel
        extra = args.episodes % args.parallel
        for worker in range(args.parallel):
            episodes = per_worker + (1 if worker < extra else 0)
            if episodes:
                plan.append(
                    (args.bench, args.scenario, args.config, args.policy,
                     episodes, args.seed + 7919 * worker, args.target, args.steps)
                )
        if args.parallel > 1:
            with ProcessPoolExecutor(max_workers=args.parallel) as pool:
                parts = list(pool.map(_rollout_slice, plan))
        else:
            parts = [_rollout_slice(item) for item in plan]
        stats = _merge_stats(parts)
        if out is not None:
            _logged_rollout(args, out)
    if out is not None:
        _write_stats(stats, out / "stats.json")
    print(json.dumps(stats.to_dict(), indent=2, sort_keys=True))
    return 0


def _stage_specs(raw: str) -> list[tuple[str, str]]:
    stages = []
    for chunk in raw.replace(",", " ").split():
        if ":" not in chunk:
            raise ConfigError(f"stage {chunk!r} must look like bench:policy")
        bench, policy = chunk.split(":", 1)
        if bench not in BENCH_KINDS:
            raise ConfigError(f"unknown bench {bench!r} in stage {chunk!r}")
        stages.append((bench, policy))
    if not stages:
        raise ConfigError("pipeline needs at least one stage")
    return stages


def cmd_pipeline(args: argparse.Namespace) -> int:
    """Run benches in sequence, piping the primary vessel snapshot along."""
    stages = _stage_specs(args.stages)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    carried: dict | None = None
    summary = {"target": args.target, "stages": []}
    defaults = {
        "rxn": f"rxn_{args.scenario}.yaml",
        "ext": "ext_wurtz.yaml",
        "dit": "dit_wurtz.yaml",
    }
    for index, (kind, policy_name) in enumerate(stages, start=1):
        config = args.config
        if carried is not None:
            if kind == "rxn":
                raise ConfigError("a reaction stage must come first in a pipeline")
            from .benches.base import CONFIG_DIR, load_config

            doc = dict(load_config(Path(config) if config else CONFIG_DIR / defaults[kind]))
            doc["input_vessel"] = carried
            config = doc
        env = make_bench(kind, scenario=args.scenario, config=config, seed=args.seed)
        policy = make_policy(policy_name, kind, args.scenario, seed=args.seed)
        total, vessels = run_episode(env, policy, seed=args.seed, target=args.target)
        stage_info = {"bench": kind, "policy": policy_name, "return": total,
                      "vessels": []}
        best = None
        for state in vessels:
            vessel = vessel_from_state(state, env.registry)
            path = out / f"stage{index}_{state['label']}.json"
            save_vessel(vessel, path)
            amount = salt_unit_moles(vessel, args.target)
            purity = absolute_purity([vessel], args.target)
            stage_info["vessels"].append(
                {"label": state["label"], "snapshot": str(path),
                 "target_moles": amount, "absolute_purity": purity}
            )
            if amount > 1e-9 and (best is None or amount > best[0]):
                best = (amount, purity, path, state["label"])
        if best is None:
            raise ConfigError(
                f"stage {index} ({kind}) lost the target {args.target!r} entirely"
            )
        stage_info["collection_vessel"] = best[3]
        stage_info["collection_purity"] = best[1]
        summary["stages"].append(stage_info)
        carried = next(
            s for s in vessels if s["label"] == best[3]
        )
    summary["final_purity"] = summary["stages"][-1]["collection_purity"]
    summary["final_vessel"] = summary["stages"][-1]["collection_vessel"]
    (out / "summary.json").write_text(
        json.dumps(summary, indent=2, sort_keys=True) + "\n"
    )
    print(json.dumps(summary, indent=2, sort_keys=True))
    return 0


def cmd_render(args: argparse.Namespace) -> int:
    registry = load_registry(args.registry) if args.registry else None
    if registry is None:
        from .materials import load_default_registry

        registry = load_default_registry()
    vessel = load_vessel(args.vessel, registry)
    if args.out_pixels:
        rng = np.random.default_rng(args.seed)
        column = dyn.render_layers(vessel, args.pixels, rng)
        shades = material_shades(registry)
        lut = [AIR_SHADE] + [shades[name] for name in column.classes[1:]]
        row = bytes(round(255 * lut[i]) for i in column.pixels)
        path = Path(args.out_pixels)
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("wb") as fh:
            fh.write(f"P5\n{args.pixels} 1\n255\n".encode())
            fh.write(row)
        print(f"wrote {path}")
    if args.out_spectrum:
        spectrum = uv_vis(vessel)
        path = Path(args.out_spectrum)
        path.parent.mkdir(parents=True, exist_ok=True)
        lines = [
            f"{lam:.3f} {ab:.9f}"
            for lam, ab in zip(spectrum.wavelengths, spectrum.bins)
        ]
        path.write_text("\n".join(lines) + "\n")
        print(f"wrote {path}")
    return 0


def cmd_validate(args: argparse.Namespace) -> int:
    registry = load_registry(args.registry)
    print(f"registry ok: {len(registry)} materials from {args.registry}")
    if args.reactions:
        network = load_network(args.reactions)
        unknown = [s for s in network.species if s not in registry]
        if unknown:
            raise ConfigError(f"reactions reference unknown materials: {unknown}")
        print(f"reactions ok: {len(network.reactions)} reactions ({network.name})")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chembench", description=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("rollout", help="run policy episodes on one bench")
    p.add_argument("--bench", required=True, choices=BENCH_KINDS)
    p.add_argument("--scenario", default="wurtz")
    p.add_argument("--policy", default="random",
                   choices=("heuristic", "random", "none"))
    p.add_argument("--episodes", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--config", default=None, help="scenario config path")
    p.add_argument("--out", default=None, help="directory for stats/logs")
    p.add_argument("--parallel", type=int, default=1,
                   help="independent instances, merged by index")
    p.add_argument("--target", default=None)
    p.add_argument("--steps", type=int, default=None,
                   help="cap steps per episode (0 evaluates the initial state)")
    p.add_argument("--save-vessels", action="store_true")
    p.set_defaults(fn=cmd_rollout)

    p = sub.add_parser("pipeline", help="chain benches through vessel snapshots")
    p.add_argument("--stages", required=True,
                   help="comma-separated bench:policy pairs, e.g. rxn:heuristic,dit:heuristic")
    p.add_argument("--target", required=True)
    p.add_argument("--scenario", default="wurtz")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--config", default=None)
    p.add_argument("--out", default="pipeline-out")
    p.set_defaults(fn=cmd_pipeline)

    p = sub.add_parser("render", help="export pixel row / spectrum of a snapshot")
    p.add_argument("--vessel", required=True)
    p.add_argument("--registry", default=None)
    p.add_argument("--out-pixels", default=None, help="PGM path")
    p.add_argument("--out-spectrum", default=None, help="two-column text path")
    p.add_argument("--pixels", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_render)

    p = sub.add_parser("validate", help="check data files")
    p.add_argument("--registry", required=True)
    p.add_argument("--reactions", default=None)
    p.set_defaults(fn=cmd_validate)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except BenchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
