"""Extraction bench: isolate a solute by shuttling solvent layers.

The extraction vessel (EV) starts with 4 mol of diethyl ether carrying 1 mol
of dissolved sodium chloride (as its ion pair) and 1 mol of the target
coupling product (dodecane fills in when the target is the salt itself). The
agent mixes or settles the column, adds the polar solvent S1 (water) or the
nonpolar S2 (hexane), drains the column bottom into beaker B1, pours the top
into beaker B2, pours both beakers back, or ends the experiment. One of
8 actions x 5 multipliers is taken per step; observations are the pixel
renderings of all three vessels plus the target one-hot.

The terminal reward is the change in amount-weighted solute purity of the
target across all vessels, times the target's molar amount.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .. import solvents as dyn
from ..errors import ConfigError, IndexOutOfRange
from ..materials import MaterialRegistry, load_registry
from ..vessel import Vessel, add_material, drain, pour, salt_unit_moles, solute_purity
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
    "mix",          # agitate the EV column backwards in settling time
    "settle",       # wait; the column stratifies forward in time
    "add-s1",       # add the polar solvent
    "add-s2",       # add the nonpolar solvent
    "drain-b1",     # EV bottom -> B1
    "pour-b2",      # EV top -> B2
    "pour-back",    # B1 and B2 -> EV
    "end",
)
MULTIPLIERS = (0.2, 0.4, 0.6, 0.8, 1.0)


@dataclass
class ExtractionConfig:
    registry: MaterialRegistry
    targets: tuple[str, ...]
    solvent: dict[str, float]
    salt: str = "NaCl"
    salt_amount: float = 1.0
    target_amount: float = 1.0
    filler: str = "dodecane"         # used when the target is the salt
    solvent_s1: str = "water"
    solvent_s2: str = "hexane"
    add_unit_s1: float = 4.0         # mol at multiplier 1.0
    add_unit_s2: float = 2.0
    mix_unit: float = 2.0            # settling-time units at multiplier 1.0
    settle_unit: float = 1.0
    vessel_capacity: float = 1.0
    max_steps: int = 50
    pixels: int = 100
    input_vessel: dict | None = None
    seed: int | None = None

    def validate(self) -> None:
        names = (
            list(self.targets)
            + [self.salt, self.filler, self.solvent_s1, self.solvent_s2]
            + list(self.solvent)
        )
        for name in names:
            if name not in self.registry:
                raise ConfigError(f"material {name!r} not in registry")


class ExtractionBench(BenchEnv):
    bench_kind = "ext"

    def __init__(self, cfg: ExtractionConfig):
        cfg.validate()
        super().__init__(cfg.registry, cfg.targets, cfg.max_steps, cfg.seed, cfg.pixels)
        self.cfg = cfg
        self.overflow_ledger: dict[tuple[str, str], float] = {}

    def action_spec(self) -> ActionSpec:
        return ActionSpec(kind="discrete", actions=ACTIONS, multipliers=MULTIPLIERS)

    def observation_spec(self) -> ObservationSpec:
        return ObservationSpec(
            segments=(
                ("pixels-ev", self.pixels),
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

            ev = vessel_from_state(cfg.input_vessel, self.registry)
            ev.label = "EV"
        else:
            ev = self._fresh_vessel("EV")
            for name, amount in cfg.solvent.items():
                add_material(ev, name, amount, "liquid")
            add_material(ev, cfg.salt, cfg.salt_amount, "dissolved")
            product = cfg.filler if self.target == cfg.salt else self.target
            add_material(ev, product, cfg.target_amount, "dissolved")
        self.vessels = [ev, self._fresh_vessel("B1"), self._fresh_vessel("B2")]
        self.overflow_ledger = {}
        self.added_ledger: dict[str, float] = {}
        self.initial_purity = solute_purity(self.vessels, self.target)

    # -- dynamics ------------------------------------------------------------

    def _record_overflow(self, report) -> None:
        for key, amount in report.overflow.items():
            self.overflow_ledger[key] = self.overflow_ledger.get(key, 0.0) + amount

    def _add_solvent(self, vessel: Vessel, name: str, amount: float) -> None:
        """Add solvent from the bench reserve, truncated to what fits."""
        molar_volume = self.registry[name].molar_volume
        headroom = max(vessel.volume_capacity - vessel.liquid_volume(), 0.0)
        allowed = min(amount, headroom / molar_volume)
        if allowed > 0.0:
            add_material(vessel, name, allowed, "liquid")
            self.added_ledger[name] = self.added_ledger.get(name, 0.0) + allowed

    def _apply_action(self, action) -> bool:
        index = int(action)
        spec = self.action_spec()
        if not 0 <= index < spec.n_choices:
            raise IndexOutOfRange(f"action index {index} outside [0, {spec.n_choices})")
        name, mult = spec.decode(index)
        ev, b1, b2 = self.vessels
        cfg = self.cfg
        if name == "mix":
            dyn.mix(ev, mult * cfg.mix_unit)
        elif name == "settle":
            dyn.settle(ev, mult * cfg.settle_unit)
        elif name == "add-s1":
            self._add_solvent(ev, cfg.solvent_s1, mult * cfg.add_unit_s1)
        elif name == "add-s2":
            self._add_solvent(ev, cfg.solvent_s2, mult * cfg.add_unit_s2)
        elif name == "drain-b1":
            _, _, report = drain(ev, b1, mult)
            self._record_overflow(report)
        elif name == "pour-b2":
            _, _, report = pour(ev, b2, mult)
            self._record_overflow(report)
        elif name == "pour-back":
            for beaker in (b1, b2):
                _, _, report = pour(beaker, ev, mult)
                self._record_overflow(report)
        elif name == "end":
            return True
        return False

    def _terminal_reward(self) -> float:
        amount = sum(salt_unit_moles(v, self.target) for v in self.vessels)
        return (solute_purity(self.vessels, self.target) - self.initial_purity) * amount

    def observe(self) -> np.ndarray:
        columns = [self.render_shades(v) for v in self.vessels]
        return np.concatenate(columns + [self.one_hot_target()])


def make_extraction_bench(
    registry: MaterialRegistry | None = None,
    config: str | Path | dict | None = None,
    seed: int | None = None,
) -> ExtractionBench:
    """Build the layer-separation bench from a scenario config."""
    if isinstance(config, dict):
        doc = config
    else:
        path = Path(config) if config else CONFIG_DIR / "ext_wurtz.yaml"
        doc = load_config(path)
    if registry is None:
        registry = load_registry(resolve_data_path(doc, "registry", "materials.yaml"))
    cfg = ExtractionConfig(
        registry=registry,
        targets=tuple(require_key(doc, "targets")),
        solvent={k: float(v) for k, v in require_key(doc, "solvent").items()},
        salt=doc.get("salt", "NaCl"),
        salt_amount=float(doc.get("salt_amount", 1.0)),
        target_amount=float(doc.get("target_amount", 1.0)),
        filler=doc.get("filler", "dodecane"),
        solvent_s1=doc.get("solvent_s1", "water"),
        solvent_s2=doc.get("solvent_s2", "hexane"),
        add_unit_s1=float(doc.get("add_unit_s1", 4.0)),
        add_unit_s2=float(doc.get("add_unit_s2", 2.0)),
        mix_unit=float(doc.get("mix_unit", 2.0)),
        settle_unit=float(doc.get("settle_unit", 1.0)),
        vessel_capacity=float(doc.get("vessel_capacity", 1.0)),
        max_steps=int(doc.get("max_steps", 50)),
        pixels=int(doc.get("pixels", 100)),
        input_vessel=doc.get("input_vessel"),
        seed=seed if seed is not None else doc.get("seed"),
    )
    bench = ExtractionBench(cfg)
    bench.config_doc = doc
    return bench
