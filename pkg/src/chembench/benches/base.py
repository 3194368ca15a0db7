"""Shared episodic-environment contract for the three benches.

Every bench exposes reset/step/spaces and a seeded random stream. Rewards
are sparse: zero on every non-terminal step, evaluated once when the episode
ends (explicit end action or step budget, whichever first). A (seed, action
sequence) pair fully determines a trajectory, including the stochastic pixel
observations.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from ..errors import ConfigError, EpisodeDone
from ..materials import MaterialRegistry
from .. import solvents as dyn

CONFIG_DIR = Path(__file__).parent.parent / "data" / "configs"

AIR_SHADE = 0.05


@dataclass(frozen=True)
class ActionSpec:
    """Action space descriptor.

    Continuous: a vector of ``dimension`` values in [0, 1]. Discrete: a
    single flattened index over (action, multiplier) pairs,
    index = action * len(multipliers) + multiplier_index.
    """

    kind: str                                # "continuous" | "discrete"
    dimension: int = 0
    actions: tuple[str, ...] = ()
    multipliers: tuple[float, ...] = ()

    @property
    def n_choices(self) -> int:
        return len(self.actions) * len(self.multipliers)

    def decode(self, index: int) -> tuple[str, float]:
        n = len(self.multipliers)
        return self.actions[index // n], self.multipliers[index % n]


@dataclass(frozen=True)
class ObservationSpec:
    """Ordered named segments; every value lies in [0, 1]."""

    segments: tuple[tuple[str, int], ...]

    @property
    def total_length(self) -> int:
        return sum(length for _, length in self.segments)


@dataclass
class StepResult:
    observation: np.ndarray
    reward: float
    done: bool
    info: dict = field(default_factory=dict)


def material_shades(registry: MaterialRegistry) -> dict[str, float]:
    """Stable material -> pixel shade map (air is AIR_SHADE).

    Shades are spaced over (0.15, 0.95] by alphabetical rank so renderings
    are comparable across vessels and runs of the same registry.
    """
    names = sorted(registry.names)
    n = len(names)
    return {name: 0.15 + 0.8 * (i + 1) / n for i, name in enumerate(names)}


class BenchEnv:
    """Base class: step bookkeeping, target sampling, pixel observation."""

    bench_kind = "?"

    def __init__(self, registry: MaterialRegistry, targets: tuple[str, ...],
                 max_steps: int, seed: int | None = None, pixels: int = 100):
        if not targets:
            raise ConfigError("bench needs at least one target")
        for name in targets:
            if name not in registry:
                raise ConfigError(f"target {name!r} not in registry")
        self.registry = registry
        self.targets = tuple(targets)
        self.max_steps = int(max_steps)
        self.pixels = int(pixels)
        self.rng = np.random.default_rng(seed)
        self.shades = material_shades(registry)
        self.target: str | None = None
        self.step_count = 0
        self.done = True
        self.vessels = []
        self.config_doc: dict = {}  # scenario file contents, for reference policies

    # -- contract ----------------------------------------------------------

    def spaces(self) -> tuple[ActionSpec, ObservationSpec]:
        return self.action_spec(), self.observation_spec()

    def reset(self, seed: int | None = None, target: str | None = None) -> np.ndarray:
        if seed is not None:
            self.rng = np.random.default_rng(seed)
        if target is None:
            target = self.targets[int(self.rng.integers(len(self.targets)))]
        elif target not in self.targets:
            raise ConfigError(f"target {target!r} not one of {self.targets}")
        self.target = target
        self.step_count = 0
        self.done = False
        self._build_initial_state()
        return self.observe()

    def step(self, action) -> StepResult:
        if self.done:
            raise EpisodeDone("episode finished; call reset()")
        ended = self._apply_action(action)
        self.step_count += 1
        reason = None
        if ended:
            reason = "end_action"
        elif self.step_count >= self.max_steps:
            reason = "step_limit"
        info: dict = {}
        reward = 0.0
        if reason is not None:
            self.done = True
            reward = self._terminal_reward()
            info["terminal_reason"] = reason
            info["vessels"] = [self._vessel_state(v) for v in self.vessels]
        return StepResult(self.observe(), reward, self.done, info)

    # -- hooks implemented by each bench ------------------------------------

    def action_spec(self) -> ActionSpec:
        raise NotImplementedError

    def observation_spec(self) -> ObservationSpec:
        raise NotImplementedError

    def observe(self) -> np.ndarray:
        raise NotImplementedError

    def _build_initial_state(self) -> None:
        raise NotImplementedError

    def _apply_action(self, action) -> bool:
        """Apply one action; return True when it ends the episode."""
        raise NotImplementedError

    def _terminal_reward(self) -> float:
        raise NotImplementedError

    # -- shared helpers ------------------------------------------------------

    def one_hot_target(self) -> np.ndarray:
        vec = np.zeros(len(self.targets))
        vec[self.targets.index(self.target)] = 1.0
        return vec

    def render_shades(self, vessel) -> np.ndarray:
        """One vessel column as pixel shades in [0, 1], bottom to top."""
        column = dyn.render_layers(vessel, self.pixels, self.rng)
        lut = np.array(
            [AIR_SHADE] + [self.shades[name] for name in column.classes[1:]]
        )
        return lut[column.pixels]

    @staticmethod
    def _vessel_state(vessel) -> dict:
        return {
            "label": vessel.label,
            "temperature": vessel.temperature,
            "volume_capacity": vessel.volume_capacity,
            "pressure": vessel.pressure,
            "settle_time": vessel.settle_time,
            "solvents": dict(vessel.solvents),
            "solutes": {k: dict(v) for k, v in vessel.solutes.items()},
            "solids": dict(vessel.solids),
            "gases": dict(vessel.gases),
        }


def load_config(path: str | Path) -> dict:
    """Read a scenario config file, resolving relative data paths."""
    path = Path(path)
    try:
        doc = yaml.safe_load(path.read_text())
    except (OSError, yaml.YAMLError) as exc:
        raise ConfigError(f"cannot read scenario config {path}: {exc}") from None
    if not isinstance(doc, dict):
        raise ConfigError(f"scenario config {path} must be a mapping")
    doc.setdefault("_base_dir", str(path.parent))
    return doc


def require_key(doc: dict, key: str):
    try:
        return doc[key]
    except KeyError:
        raise ConfigError(f"scenario config is missing the {key!r} key") from None


def resolve_data_path(doc: dict, key: str, default: str) -> Path:
    raw = Path(doc.get(key, default))
    if raw.is_absolute():
        return raw
    base = Path(doc.get("_base_dir", "."))
    candidate = base / raw
    if candidate.exists():
        return candidate
    # fall back to the packaged data directory
    packaged = Path(__file__).parent.parent / "data" / raw
    return packaged if packaged.exists() else candidate
