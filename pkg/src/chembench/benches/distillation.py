"""Distillation bench: separate materials by boiling point.

The distillation vessel (DV) starts with 4 mol of diethyl ether carrying
1 mol of the dissolved target plus 1 mol of a second material (sodium
chloride, or dodecane when the salt itself is the target; configs may omit
the extra material to exercise the single-distillation case). The agent
heats or cools the DV (vapor condenses into B1), pours DV into B1, pours B1
into B2, or ends the experiment: 4 actions x 10 multipliers. Heating
multipliers are signed; pour multipliers are fractions of the liquid column.

The terminal reward mirrors the extraction bench but uses absolute purity
(solvents count), times the target's molar amount.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..errors import ConfigError, IndexOutOfRange
from ..materials import MaterialRegistry, load_registry
from ..thermal import HeatEvent, apply_heat
from ..vessel import Vessel, absolute_purity, add_material, pour, salt_unit_moles
from .base import (
    ActionSpec,
    BenchEnv,
    CONFIG_DIR,
    ObservationSpec,
    load_config,
    require_key,
    resolve_data_path,
)

ACTIONS = (
    "heat",         # signed multiplier: heat or cool the DV, vapor -> B1
    "pour-b1",      # DV top -> B1
    "pour-b2",      # B1 top -> B2
    "end",
)
HEAT_MULTIPLIERS = (-1.0, -0.8, -0.6, -0.4, -0.2, 0.2, 0.4, 0.6, 0.8, 1.0)
POUR_MULTIPLIERS = (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0)


@dataclass
class DistillationConfig:
    registry: MaterialRegistry
    targets: tuple[str, ...]
    solvent: dict[str, float]
    salt: str = "NaCl"
    filler: str = "dodecane"
    extra_amount: float = 1.0
    target_amount: float = 1.0
    include_extra: bool = True
    heat_unit: float = 12000.0      # J at multiplier 1.0
    vessel_capacity: float = 1.0
    max_steps: int = 50
    pixels: int = 100
    input_vessel: dict | None = None
    seed: int | None = None

    def validate(self) -> None:
        names = list(self.targets) + [self.salt, self.filler] + list(self.solvent)
        for name in names:
            if name not in self.registry:
                raise ConfigError(f"material {name!r} not in registry")
        if self.heat_unit <= 0:
            raise ConfigError("heat_unit must be > 0")


class DistillationBench(BenchEnv):
    bench_kind = "dit"

    def __init__(self, cfg: DistillationConfig):
        cfg.validate()
        super().__init__(cfg.registry, cfg.targets, cfg.max_steps, cfg.seed, cfg.pixels)
        self.cfg = cfg
        self.vented_ledger: dict[str, float] = {}
        self.overflow_ledger: dict[tuple[str, str], float] = {}

    def action_spec(self) -> ActionSpec:
        # The multiplier axis is shared; the heat action reads it through
        # HEAT_MULTIPLIERS (signed), pours through POUR_MULTIPLIERS.
        return ActionSpec(kind="discrete", actions=ACTIONS, multipliers=POUR_MULTIPLIERS)

    def observation_spec(self) -> ObservationSpec:
        return ObservationSpec(
            segments=(
                ("pixels-dv", self.pixels),
                ("pixels-b1", self.pixels),
                ("pixels-b2", self.pixels),
                ("target", len(self.targets)),
            )
        )

    def _fresh_vessel(self, label: str) -> Vessel:
        return Vessel(label, self.registry, volume_capacity=self.cfg.vessel_capacity)

    def _build_initial_state(self) -> None:
        cfg = self.cfg
        if cfg.input_vessel is not None:
            from ..snapshots import vessel_from_state

            dv = vessel_from_state(cfg.input_vessel, self.registry)
            dv.label = "DV"
        else:
            dv = self._fresh_vessel("DV")
            for name, amount in cfg.solvent.items():
                add_material(dv, name, amount, "liquid")
            add_material(dv, self.target, cfg.target_amount, "dissolved")
            if cfg.include_extra:
                extra = cfg.filler if self.target == cfg.salt else cfg.salt
                add_material(dv, extra, cfg.extra_amount, "dissolved")
        self.vessels = [dv, self._fresh_vessel("B1"), self._fresh_vessel("B2")]
        self.vented_ledger = {}
        self.overflow_ledger = {}
        self.initial_purity = absolute_purity(self.vessels, self.target)

    def _apply_action(self, action) -> bool:
        index = int(action)
        spec = self.action_spec()
        if not 0 <= index < spec.n_choices:
            raise IndexOutOfRange(f"action index {index} outside [0, {spec.n_choices})")
        which = index // len(POUR_MULTIPLIERS)
        mult_index = index % len(POUR_MULTIPLIERS)
        name = ACTIONS[which]
        dv, b1, b2 = self.vessels
        if name == "heat":
            if not dv.is_empty():
                heat = HEAT_MULTIPLIERS[mult_index] * self.cfg.heat_unit
                result = apply_heat(HeatEvent(heat, dv, b1))
                for material, amount in result.vented.items():
                    self.vented_ledger[material] = (
                        self.vented_ledger.get(material, 0.0) + amount
                    )
        elif name == "pour-b1":
            _, _, report = pour(dv, b1, POUR_MULTIPLIERS[mult_index])
            self._record_overflow(report)
        elif name == "pour-b2":
            _, _, report = pour(b1, b2, POUR_MULTIPLIERS[mult_index])
            self._record_overflow(report)
        elif name == "end":
            return True
        return False

    def _record_overflow(self, report) -> None:
        for key, amount in report.overflow.items():
            self.overflow_ledger[key] = self.overflow_ledger.get(key, 0.0) + amount

    def _terminal_reward(self) -> float:
        amount = sum(salt_unit_moles(v, self.target) for v in self.vessels)
        return (
            absolute_purity(self.vessels, self.target) - self.initial_purity
        ) * amount

    def observe(self) -> np.ndarray:
        columns = [self.render_shades(v) for v in self.vessels]
        return np.concatenate(columns + [self.one_hot_target()])


def make_distillation_bench(
    registry: MaterialRegistry | None = None,
    config: str | Path | dict | None = None,
    seed: int | None = None,
) -> DistillationBench:
    """Build the distillation bench from a scenario config."""
    if isinstance(config, dict):
        doc = config
    else:
        path = Path(config) if config else CONFIG_DIR / "dit_wurtz.yaml"
        doc = load_config(path)
    if registry is None:
        registry = load_registry(resolve_data_path(doc, "registry", "materials.yaml"))
    cfg = DistillationConfig(
        registry=registry,
        targets=tuple(require_key(doc, "targets")),
        solvent={k: float(v) for k, v in require_key(doc, "solvent").items()},
        salt=doc.get("salt", "NaCl"),
        filler=doc.get("filler", "dodecane"),
        extra_amount=float(doc.get("extra_amount", 1.0)),
        target_amount=float(doc.get("target_amount", 1.0)),
        include_extra=bool(doc.get("include_extra", True)),
        heat_unit=float(doc.get("heat_unit", 12000.0)),
        vessel_capacity=float(doc.get("vessel_capacity", 1.0)),
        max_steps=int(doc.get("max_steps", 50)),
        pixels=int(doc.get("pixels", 100)),
        input_vessel=doc.get("input_vessel"),
        seed=seed if seed is not None else doc.get("seed"),
    )
    bench = DistillationBench(cfg)
    bench.config_doc = doc
    return bench
