"""Baseline controllers and the rollout evaluator.

The heuristic policies are open-loop scripts keyed on step index and target.
The reaction heuristics raise the temperature immediately and add exactly
the reactants the target needs (the biphasic route to product I withholds
its third precursor until a configured later step). The extraction heuristic
plays the textbook salt/water loop: add the polar solvent, mix, settle,
drain the bottom layer away, repeat, end. The distillation heuristic derives
its step counts at reset by simulating max-heat events on a copy of the
initial vessel: boil off the lowest boiler, dump the condenser, carry the
target over (or stop early when the first boil-off already leaves the vessel
pure).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .benches.distillation import (
    ACTIONS as DIT_ACTIONS,
    HEAT_MULTIPLIERS,
    POUR_MULTIPLIERS,
    DistillationBench,
)
from .benches.extraction import ACTIONS as EXT_ACTIONS, MULTIPLIERS as EXT_MULTIPLIERS
from .errors import ConfigError, UnknownScenario
from .thermal import HeatEvent, apply_heat, boil_point_order
from .vessel import Vessel, absolute_purity, salt_unit_moles


class Policy:
    """Controller interface: deterministic heuristics, seeded random."""

    def reset(self, env) -> None:  # noqa: B027 - optional hook
        pass

    def act(self, observation, step: int, target: str):
        raise NotImplementedError


# ---------------------------------------------------------------------------
# reaction bench heuristics


class WurtzHeuristic(Policy):
    """Max temperature, add the target's required reactants at step 0."""

    def __init__(self):
        self._dims: list[int] = []
        self._n = 0

    def reset(self, env) -> None:
        cfg = env.cfg
        self._n = len(cfg.reactants)
        target = env.target
        for rxn in cfg.network.reactions:
            if any(name == target for name, _ in rxn.products):
                required = [name for name, _ in rxn.reactants]
                self._dims = [cfg.reactants.index(name) for name in required]
                return
        raise ConfigError(f"no reaction produces {target!r}")

    def act(self, observation, step: int, target: str):
        action = np.zeros(self._n + 2)
        action[0] = 1.0     # push temperature up every step
        action[1] = 0.5     # leave the solution volume alone
        if step == 0:
            for dim in self._dims:
                action[2 + dim] = 1.0
        return action


class FictitiousHeuristic(Policy):
    """Constant feeds per target; the route to I staggers its precursors."""

    def __init__(self, switch_step: int = 10, withhold: str = "C"):
        self.switch_step = switch_step
        self.withhold = withhold
        self._start: list[int] = []
        self._later: list[int] = []
        self._n = 0

    def reset(self, env) -> None:
        cfg = env.cfg
        self._n = len(cfg.reactants)
        doc = getattr(env, "config_doc", {}) or {}
        overrides = doc.get("heuristic", {})
        self.switch_step = int(overrides.get("switch_step", self.switch_step))
        self.withhold = overrides.get("withhold", self.withhold)

        by_product = {}
        for rxn in cfg.network.reactions:
            for name, _ in rxn.products:
                by_product[name] = [r for r, _ in rxn.reactants]
        target = env.target
        if target not in by_product:
            raise ConfigError(f"no reaction produces {target!r}")
        needed = set(by_product[target])
        # expand intermediate products into the raw feeds that make them
        while not needed <= set(cfg.reactants):
            for name in sorted(needed - set(cfg.reactants)):
                needed.remove(name)
                needed.update(by_product[name])
        start, later = sorted(needed), []
        if target == "I" and self.withhold in needed:
            start = sorted(needed - {self.withhold})
            later = [self.withhold]
        self._start = [cfg.reactants.index(n) for n in start]
        self._later = [cfg.reactants.index(n) for n in later]

    def act(self, observation, step: int, target: str):
        action = np.zeros(self._n + 2)
        action[0] = 1.0
        action[1] = 0.5
        if step == 0:
            for dim in self._start:
                action[2 + dim] = 1.0
        if step == self.switch_step:
            for dim in self._later:
                action[2 + dim] = 1.0
        return action


def heuristic_rxn(scenario: str) -> Policy:
    if scenario == "wurtz":
        return WurtzHeuristic()
    if scenario == "fictitious":
        return FictitiousHeuristic()
    raise UnknownScenario(f"no reaction heuristic for scenario {scenario!r}")


# ---------------------------------------------------------------------------
# extraction bench heuristic

# one wash round: polar solvent in, agitate, stratify, pull the bottom layer
_EXT_ROUND = (
    ("add-s1", 1.0),
    ("mix", 1.0),
    ("settle", 1.0),
    ("settle", 1.0),
    ("drain-b1", 0.2),
)
DEFAULT_EXT_SCRIPT = _EXT_ROUND + _EXT_ROUND + (("end", 1.0),)


class ExtractionHeuristic(Policy):
    def __init__(self, script=DEFAULT_EXT_SCRIPT):
        self.script = tuple(script)
        self._end_index = EXT_ACTIONS.index("end") * len(EXT_MULTIPLIERS)

    def reset(self, env) -> None:
        doc = getattr(env, "config_doc", {}) or {}
        script = doc.get("heuristic", {}).get("script")
        if script:
            self.script = tuple((name, float(mult)) for name, mult in script)

    def act(self, observation, step: int, target: str) -> int:
        if step >= len(self.script):
            return self._end_index
        name, mult = self.script[step]
        return EXT_ACTIONS.index(name) * len(EXT_MULTIPLIERS) + EXT_MULTIPLIERS.index(mult)


def heuristic_ext() -> Policy:
    return ExtractionHeuristic()


# ---------------------------------------------------------------------------
# distillation bench heuristic

_DIT_HEAT_FULL = DIT_ACTIONS.index("heat") * len(POUR_MULTIPLIERS) + HEAT_MULTIPLIERS.index(1.0)
_DIT_DUMP_FULL = DIT_ACTIONS.index("pour-b2") * len(POUR_MULTIPLIERS) + POUR_MULTIPLIERS.index(1.0)
_DIT_END = DIT_ACTIONS.index("end") * len(POUR_MULTIPLIERS)

_PURE = 0.995


def _clone_vessel(vessel: Vessel) -> Vessel:
    return Vessel(
        label=vessel.label,
        registry=vessel.registry,
        temperature=vessel.temperature,
        volume_capacity=vessel.volume_capacity,
        pressure=vessel.pressure,
        settle_time=vessel.settle_time,
        solvents=dict(vessel.solvents),
        solutes={k: dict(v) for k, v in vessel.solutes.items()},
        solids=dict(vessel.solids),
        gases=dict(vessel.gases),
    )


class DistillationHeuristic(Policy):
    """Boil off the solvent, dump it, carry the target over, end.

    The script is derived once per episode by replaying max-heat events on a
    copy of the initial vessel, so the step counts stay calibrated for any
    input vessel (including ones piped in from other benches).
    """

    def __init__(self):
        self.script: list[int] = [_DIT_END]

    def reset(self, env: DistillationBench) -> None:
        cfg = env.cfg
        dv = _clone_vessel(env.vessels[0])
        condenser = Vessel("sim-b1", env.registry, volume_capacity=cfg.vessel_capacity)
        target = env.target
        budget = env.max_steps - 2
        script: list[int] = []

        def heat_once() -> None:
            apply_heat(HeatEvent(cfg.heat_unit, dv, condenser))
            script.append(_DIT_HEAT_FULL)

        order = boil_point_order(dv)
        if order:
            first = order[0][0]
            while dv.solvents.get(first, 0.0) > 1e-9 and len(script) < budget:
                heat_once()
        if absolute_purity([dv], target) < _PURE:
            script.append(_DIT_DUMP_FULL)
            while (
                salt_unit_moles(dv, target) > 1e-9
                and absolute_purity([dv], target) < _PURE
                and len(script) < budget
            ):
                heat_once()
        script.append(_DIT_END)
        self.script = script

    def act(self, observation, step: int, target: str) -> int:
        return self.script[step] if step < len(self.script) else _DIT_END


def heuristic_dit() -> Policy:
    return DistillationHeuristic()


# ---------------------------------------------------------------------------
# random and do-nothing baselines


class RandomPolicy(Policy):
    """Uniform sampling over the environment's action space."""

    def __init__(self, seed: int | None = None):
        self.rng = np.random.default_rng(seed)
        self._spec = None

    def reset(self, env) -> None:
        self._spec = env.action_spec()

    def act(self, observation, step: int, target: str):
        if self._spec.kind == "continuous":
            return self.rng.random(self._spec.dimension)
        return int(self.rng.integers(self._spec.n_choices))


def random_policy(seed: int | None = None) -> Policy:
    return RandomPolicy(seed)


class StopPolicy(Policy):
    """Ends discrete episodes immediately; no-op on the reaction bench."""

    def __init__(self):
        self._spec = None

    def reset(self, env) -> None:
        self._spec = env.action_spec()

    def act(self, observation, step: int, target: str):
        if self._spec.kind == "continuous":
            action = np.zeros(self._spec.dimension)
            action[0] = 0.5
            action[1] = 0.5
            return action
        return self._spec.actions.index("end") * len(self._spec.multipliers)


def make_policy(name: str, bench_kind: str, scenario: str = "wurtz",
                seed: int | None = None) -> Policy:
    """CLI-facing dispatcher: heuristic | random | none."""
    if name == "random":
        return RandomPolicy(seed)
    if name == "none":
        return StopPolicy()
    if name == "heuristic":
        if bench_kind == "rxn":
            return heuristic_rxn(scenario)
        if bench_kind == "ext":
            return heuristic_ext()
        if bench_kind == "dit":
            return heuristic_dit()
        raise ConfigError(f"unknown bench kind {bench_kind!r}")
    raise ConfigError(f"unknown policy {name!r}; use heuristic, random or none")


# ---------------------------------------------------------------------------
# rollout evaluation


@dataclass
class ReturnStats:
    episodes: int
    mean: float
    std: float
    per_target: dict[str, float]
    per_target_episodes: dict[str, int]
    returns: list[float] = field(default_factory=list)

    @property
    def stderr(self) -> float:
        return self.std / math.sqrt(self.episodes) if self.episodes else 0.0

    def to_dict(self) -> dict:
        return {
            "episodes": self.episodes,
            "mean_return": self.mean,
            "std_return": self.std,
            "stderr_return": self.stderr,
            "per_target_mean": dict(sorted(self.per_target.items())),
            "per_target_episodes": dict(sorted(self.per_target_episodes.items())),
        }


def run_episode(env, policy: Policy, seed: int | None = None,
                target: str | None = None, max_steps: int | None = None,
                on_step=None) -> tuple[float, list]:
    """One full episode; returns (total reward, terminal vessel states)."""
    observation = env.reset(seed=seed, target=target)
    policy.reset(env)
    total = 0.0
    vessels: list = []
    step = 0
    budget = env.max_steps if max_steps is None else min(max_steps, env.max_steps)
    if budget == 0:
        return 0.0, [env._vessel_state(v) for v in env.vessels]
    while True:
        action = policy.act(observation, step, env.target)
        result = env.step(action)
        total += result.reward
        if on_step is not None:
            on_step(step, action, result)
        observation = result.observation
        step += 1
        if result.done:
            vessels = result.info.get("vessels", [])
            break
        if step >= budget:
            break
    return total, vessels


def rollout(env, policy: Policy, episodes: int, seed: int | None = None,
            target: str | None = None, max_steps: int | None = None,
            on_step=None, keep_returns: bool = False) -> ReturnStats:
    """Run full episodes and aggregate returns, per target and overall.

    The environment is reseeded once with ``seed``; subsequent episodes
    continue its stream, so (env seed, policy seed) fully determine the
    statistics.
    """
    if episodes < 1:
        raise ConfigError("episodes must be >= 1")
    returns = []
    sums: dict[str, float] = {}
    counts: dict[str, int] = {}
    for episode in range(episodes):
        ep_seed = seed if episode == 0 else None
        total, _ = run_episode(
            env, policy, seed=ep_seed, target=target, max_steps=max_steps,
            on_step=None if on_step is None else (lambda s, a, r, e=episode: on_step(e, s, a, r)),
        )
        returns.append(total)
        sums[env.target] = sums.get(env.target, 0.0) + total
        counts[env.target] = counts.get(env.target, 0) + 1
    arr = np.asarray(returns)
    return ReturnStats(
        episodes=episodes,
        mean=float(arr.mean()),
        std=float(arr.std()),
        per_target={t: sums[t] / counts[t] for t in sums},
        per_target_episodes=counts,
        returns=returns if keep_returns else [],
    )
