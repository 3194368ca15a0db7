"""Thin environment wrapper over the chembench benches.

The wrapper owns zero numeric constants and no simulation logic: reset and
step delegate to the engine, and observations/actions cross the boundary as
flat numeric arrays matching the engine's observation and action specs
exactly. All configuration flows through the same scenario files the engine
CLI reads, so the two surfaces cannot drift.

Episodes terminate (never truncate) on both the explicit end action and the
step budget: either way the engine has already paid out its terminal reward,
so bootstrapping past the boundary would be wrong.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from chembench.benches import make_bench

from ._compat import Box, Discrete, Env


class ChemBenchEnv(Env):
    """Standard episodic-environment facade over one bench."""

    metadata = {"render_modes": []}

    def __init__(self, bench_kind: str, scenario: str = "wurtz",
                 config: str | Path | dict | None = None,
                 target: str | None = None, seed: int | None = None):
        self.engine = make_bench(bench_kind, scenario=scenario, config=config,
                                 seed=seed)
        self.default_target = target
        action_spec, obs_spec = self.engine.spaces()
        self.observation_space = Box(
            0.0, 1.0, (obs_spec.total_length,), dtype=np.float64
        )
        if action_spec.kind == "continuous":
            self.action_space = Box(
                0.0, 1.0, (action_spec.dimension,), dtype=np.float64
            )
        else:
            self.action_space = Discrete(action_spec.n_choices)

    def reset(self, *, seed: int | None = None, options: dict | None = None):
        super().reset(seed=seed)
        target = (options or {}).get("target", self.default_target)
        observation = self.engine.reset(seed=seed, target=target)
        return observation, {"target": self.engine.target}

    def step(self, action):
        if isinstance(self.action_space, Discrete):
            action = int(np.asarray(action).item())
        result = self.engine.step(action)
        info = dict(result.info)
        info["target"] = self.engine.target
        return result.observation, float(result.reward), result.done, False, info


def wrap(bench_kind: str, config: str | Path | dict | None = None,
         scenario: str = "wurtz", target: str | None = None,
         seed: int | None = None) -> ChemBenchEnv:
    """Build a wrapped bench from a scenario config path (or defaults)."""
    return ChemBenchEnv(bench_kind, scenario=scenario, config=config,
                        target=target, seed=seed)
