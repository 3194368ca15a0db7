"""Reaction bench: continuous control of temperature, dilution and feeds.

The agent sees a UV-Vis spectrum, normalized temperature / solution volume /
pressure, its remaining reactant fractions and the target one-hot. Actions
are a length n+2 vector in [0, 1]: dims 0-1 move temperature and solution
volume around a neutral midpoint (0.5 = no change), the remaining dims add
that fraction of each reactant's remaining inventory. Kinetics then advance
one time slice. The terminal reward is the molar amount of the target
produced; the fictitious scenario penalizes the fast by-product E when E is
not the goal.

The solution volume is a dilution knob for reaction rates: it rescales
concentrations without creating or destroying material, so conservation
holds exactly. Boiling is not modeled on this bench; its physics are purely
kinetic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .. import kinetics
from ..errors import ConfigError
from ..materials import MaterialRegistry, load_registry
from ..spectra import uv_vis
from ..vessel import Vessel, add_material, salt_unit_moles
from .base import (
    ActionSpec,
    BenchEnv,
    CONFIG_DIR,
    ObservationSpec,
    load_config,
    require_key,
    resolve_data_path,
)

SCENARIOS = ("wurtz", "fictitious")


@dataclass
class ReactionConfig:
    scenario: str
    registry: MaterialRegistry
    network: kinetics.ReactionNetwork
    reactants: tuple[str, ...]
    inventory: dict[str, float]
    solvent: dict[str, float]
    targets: tuple[str, ...]
    max_steps: int = 20
    temperature_initial: float = 297.0
    temperature_min: float = 250.0
    temperature_max: float = 500.0
    temperature_unit: float = 50.0      # K per full action step
    volume_min: float = 0.05            # L
    volume_max: float = 1.0
    volume_unit: float = 0.05           # L per full action step
    pressure: float = 101.325           # kPa, fixed in dynamics
    pressure_scale: float = 500.0
    dt_per_step: float = 1.0
    vessel_capacity: float = 1.0
    spectrum_bins: int = 100
    integrator: kinetics.IntegratorConfig = field(
        default_factory=kinetics.IntegratorConfig
    )
    seed: int | None = None

    def validate(self) -> None:
        species = set(self.network.species)
        missing = [t for t in self.targets if t not in species]
        if missing:
            raise ConfigError(
                f"targets {missing} not produced by network {self.network.name!r}"
            )
        missing = [r for r in self.reactants if r not in species]
        if missing:
            raise ConfigError(
                f"reactants {missing} not part of network {self.network.name!r}"
            )
        for name in list(self.inventory) + list(self.solvent):
            if name not in self.registry:
                raise ConfigError(f"material {name!r} not in registry")


class ReactionBench(BenchEnv):
    bench_kind = "rxn"

    def __init__(self, cfg: ReactionConfig):
        cfg.validate()
        super().__init__(cfg.registry, cfg.targets, cfg.max_steps, cfg.seed)
        self.cfg = cfg
        self.remaining: dict[str, float] = {}
        self.solution_volume = 0.0
        self.vessel: Vessel | None = None

    # -- spaces --------------------------------------------------------------

    def action_spec(self) -> ActionSpec:
        return ActionSpec(kind="continuous", dimension=len(self.cfg.reactants) + 2)

    def observation_spec(self) -> ObservationSpec:
        return ObservationSpec(
            segments=(
                ("spectrum", self.cfg.spectrum_bins),
                ("temperature", 1),
                ("volume", 1),
                ("pressure", 1),
                ("remaining", len(self.cfg.reactants)),
                ("target", len(self.targets)),
            )
        )

    # -- episode -------------------------------------------------------------

    def _build_initial_state(self) -> None:
        cfg = self.cfg
        vessel = Vessel(
            "RV",
            cfg.registry,
            temperature=cfg.temperature_initial,
            volume_capacity=cfg.vessel_capacity,
            pressure=cfg.pressure,
        )
        for name, amount in cfg.solvent.items():
            add_material(vessel, name, amount, "liquid")
        self.vessel = vessel
        self.vessels = [vessel]
        self.remaining = dict(cfg.inventory)
        self.solution_volume = min(
            max(vessel.liquid_volume(), cfg.volume_min), cfg.volume_max
        )
        self._initial_amounts = {
            t: salt_unit_moles(vessel, t) for t in self.targets
        }

    def _apply_action(self, action) -> bool:
        cfg = self.cfg
        a = np.clip(np.asarray(action, dtype=float).reshape(-1), 0.0, 1.0)
        expected = len(cfg.reactants) + 2
        if a.size != expected:
            raise ConfigError(f"action must have {expected} dims, got {a.size}")
        vessel = self.vessel
        vessel.temperature = float(
            np.clip(
                vessel.temperature + (2.0 * a[0] - 1.0) * cfg.temperature_unit,
                cfg.temperature_min,
                cfg.temperature_max,
            )
        )
        self.solution_volume = float(
            np.clip(
                self.solution_volume + (2.0 * a[1] - 1.0) * cfg.volume_unit,
                cfg.volume_min,
                cfg.volume_max,
            )
        )
        for i, name in enumerate(cfg.reactants):
            amount = float(a[2 + i]) * self.remaining[name]
            if amount > 0.0:
                add_material(vessel, name, amount, "dissolved")
                self.remaining[name] -= amount
        kinetics.integrate(
            self.cfg.network,
            vessel,
            cfg.dt_per_step,
            cfg.integrator,
            volume=self.solution_volume,
        )
        return False  # the episode only ends on the step budget

    def produced(self, material: str) -> float:
        return salt_unit_moles(self.vessel, material) - self._initial_amounts.get(
            material, 0.0
        )

    def _terminal_reward(self) -> float:
        if self.cfg.scenario == "fictitious" and self.target != "E":
            return self.produced(self.target) - self.produced("E")
        return self.produced(self.target)

    def observe(self) -> np.ndarray:
        cfg = self.cfg
        spectrum = uv_vis(self.vessel, cfg.spectrum_bins).bins
        t_norm = (self.vessel.temperature - cfg.temperature_min) / (
            cfg.temperature_max - cfg.temperature_min
        )
        v_norm = (self.solution_volume - cfg.volume_min) / (
            cfg.volume_max - cfg.volume_min
        )
        p_norm = min(self.vessel.pressure / cfg.pressure_scale, 1.0)
        fractions = [
            self.remaining[name] / cfg.inventory[name] if cfg.inventory[name] > 0 else 0.0
            for name in cfg.reactants
        ]
        return np.concatenate(
            [spectrum, [t_norm, v_norm, p_norm], fractions, self.one_hot_target()]
        )


def _config_from_file(scenario: str, config_path: str | Path | None) -> dict:
    path = Path(config_path) if config_path else CONFIG_DIR / f"rxn_{scenario}.yaml"
    if not path.exists():
        raise ConfigError(f"no scenario config for {scenario!r} at {path}")
    return load_config(path)


def make_reaction_bench(
    scenario: str = "wurtz",
    registry: MaterialRegistry | None = None,
    network: kinetics.ReactionNetwork | None = None,
    config: str | Path | dict | None = None,
    seed: int | None = None,
) -> ReactionBench:
    """Build a reaction bench for one of the shipped scenarios."""
    if scenario not in SCENARIOS:
        raise ConfigError(f"unknown reaction scenario {scenario!r}; use {SCENARIOS}")
    doc = config if isinstance(config, dict) else _config_from_file(scenario, config)
    if registry is None:
        registry = load_registry(resolve_data_path(doc, "registry", "materials.yaml"))
    if network is None:
        network = kinetics.load_network(
            resolve_data_path(doc, "reactions", f"{scenario}.rxn")
        )
    temperature = doc.get("temperature", {})
    volume = doc.get("volume", {})
    integ = doc.get("integrator", {})
    cfg = ReactionConfig(
        scenario=scenario,
        registry=registry,
        network=network,
        reactants=tuple(require_key(doc, "reactants")),
        inventory={k: float(v) for k, v in require_key(doc, "inventory").items()},
        solvent={k: float(v) for k, v in require_key(doc, "solvent").items()},
        targets=tuple(require_key(doc, "targets")),
        max_steps=int(doc.get("max_steps", 20)),
        temperature_initial=float(temperature.get("initial", 297.0)),
        temperature_min=float(temperature.get("min", 250.0)),
        temperature_max=float(temperature.get("max", 500.0)),
        temperature_unit=float(temperature.get("delta_unit", 50.0)),
        volume_min=float(volume.get("min", 0.05)),
        volume_max=float(volume.get("max", 1.0)),
        volume_unit=float(volume.get("delta_unit", 0.05)),
        pressure=float(doc.get("pressure_kpa", 101.325)),
        pressure_scale=float(doc.get("pressure_scale", 500.0)),
        dt_per_step=float(doc.get("dt_per_step", 1.0)),
        vessel_capacity=float(doc.get("vessel_capacity", 1.0)),
        spectrum_bins=int(doc.get("spectrum_bins", 100)),
        integrator=kinetics.IntegratorConfig(
            rel_tol=float(integ.get("rel_tol", 1e-6)),
            abs_tol=float(integ.get("abs_tol", 1e-9)),
            max_steps=int(integ.get("max_steps", 100_000)),
        ),
        seed=seed if seed is not None else doc.get("seed"),
    )
    bench = ReactionBench(cfg)
    bench.config_doc = doc
    return bench
