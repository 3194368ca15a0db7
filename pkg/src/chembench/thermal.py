"""Distillation physics: sensible heating, boiling plateaus, precipitation.

Heat added to a vessel first raises its temperature by dT = Q / C, where C is
the total heat capacity of the contents. Once the temperature reaches the
lowest boiling point among the present liquids it plateaus, and further heat
vaporizes that liquid at dn = Q / dHv. Vapor condenses instantly into the
condenser vessel as liquid at the condenser's temperature, carrying no
solutes. When a solvent is exhausted, the solutes it hosted fall out:
solid-default materials precipitate (dissolved ion pairs recombine 1:1 into
their salt), liquid-default materials become standalone liquid phases.

After every heat event dissolved amounts above each material's solubility
limit (mol per L of remaining host solvent) also convert to the condensed
phase, so shrinking a solvent precipitates its load gradually. Cooling
(Q < 0) only lowers the temperature, floored at 0.1 K; nothing condenses
back.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import EmptyVessel, ValidationError
from .vessel import Vessel

MIN_TEMPERATURE = 0.1   # K, cooling floor
_TINY = 1e-12


@dataclass
class HeatEvent:
    """A signed amount of heat applied to ``source``, venting vapor into
    ``condenser``."""

    heat: float                 # J, negative = cooling
    source: Vessel
    condenser: Vessel

    def validate(self) -> None:
        if self.source is self.condenser:
            raise ValidationError("condenser must be distinct from the source")


@dataclass
class HeatResult:
    """Energy and mass ledger of one heat event.

    sensible + sum(latent.values()) + unused == heat, to round-off.
    ``vented`` records vapor discarded because the condenser overflowed.
    """

    source: Vessel
    condenser: Vessel
    sensible: float = 0.0                              # J into temperature change
    latent: dict[str, float] = field(default_factory=dict)   # J into vaporization
    unused: float = 0.0                                # J not absorbed (cooling floor)
    vented: dict[str, float] = field(default_factory=dict)   # mol discarded


def boil_point_order(vessel: Vessel) -> list[tuple[str, float]]:
    """Present liquids sorted by ascending boiling point."""
    reg = vessel.registry
    present = [
        (name, reg[name].boiling_point)
        for name, amt in vessel.solvents.items()
        if amt > _TINY
    ]
    return sorted(present, key=lambda item: (item[1], item[0]))


def _condense_phase(vessel: Vessel, pools: dict[str, float]) -> None:
    """Move dissolved amounts into their condensed phases, pairing ions."""
    reg = vessel.registry
    pending_ions: dict[str, float] = {}
    for name, amount in pools.items():
        if amount <= 0.0:
            continue
        if name in reg.ion_salt:
            pending_ions[name] = pending_ions.get(name, 0.0) + amount
        elif reg[name].phase_default == "liquid":
            vessel.solvents[name] = vessel.solvents.get(name, 0.0) + amount
        elif reg[name].phase_default == "gas":
            vessel.gases[name] = vessel.gases.get(name, 0.0) + amount
        else:
            vessel.solids[name] = vessel.solids.get(name, 0.0) + amount
    # recombine ion pairs 1:1 into their salt; unpaired leftovers land as
    # their own solid (mass-conserving, only reachable with lopsided charges)
    for ion in sorted(pending_ions):
        amount = pending_ions[ion]
        if amount <= 0.0:
            continue
        salt, partner = reg.ion_salt[ion]
        paired = min(amount, pending_ions.get(partner, 0.0))
        if paired > 0.0:
            vessel.solids[salt] = vessel.solids.get(salt, 0.0) + paired
            pending_ions[ion] -= paired
            pending_ions[partner] -= paired
        if pending_ions[ion] > _TINY:
            vessel.solids[ion] = vessel.solids.get(ion, 0.0) + pending_ions[ion]
            pending_ions[ion] = 0.0


def _drop_solvent_load(vessel: Vessel, solvent: str) -> None:
    """Precipitate everything dissolved in a now-exhausted solvent."""
    pools: dict[str, float] = {}
    for solute in list(vessel.solutes):
        amount = vessel.solutes[solute].pop(solvent, 0.0)
        if amount > 0.0:
            pools[solute] = pools.get(solute, 0.0) + amount
        if not vessel.solutes[solute]:
            del vessel.solutes[solute]
    _condense_phase(vessel, pools)


def solubility_sweep(vessel: Vessel) -> None:
    """Precipitate dissolved amounts above each solubility limit."""
    reg = vessel.registry
    pools: dict[str, float] = {}
    for solvent, amt in list(vessel.solvents.items()):
        volume = amt * reg[solvent].molar_volume
        for solute in list(vessel.solutes):
            held = vessel.solutes[solute].get(solvent, 0.0)
            excess = held - reg[solute].solubility_limit * volume
            if excess > _TINY:
                vessel.solutes[solute][solvent] = held - excess
                pools[solute] = pools.get(solute, 0.0) + excess
    if pools:
        _condense_phase(vessel, pools)
        vessel.clamp()


def _vaporize(result: HeatResult, material: str, amount: float) -> None:
    """Move ``amount`` mol of boiled liquid into the condenser as liquid."""
    src, cond = result.source, result.condenser
    reg = src.registry
    src.solvents[material] = src.solvents.get(material, 0.0) - amount
    headroom = max(cond.volume_capacity - cond.liquid_volume(), 0.0)
    fits = headroom / reg[material].molar_volume
    accepted = min(amount, fits)
    if accepted > 0.0:
        cond.solvents[material] = cond.solvents.get(material, 0.0) + accepted
    if amount - accepted > _TINY:
        result.vented[material] = result.vented.get(material, 0.0) + (amount - accepted)


def apply_heat(event: HeatEvent) -> HeatResult:
    """Apply one heat event, returning the updated vessels and the ledger."""
    event.validate()
    src = event.source
    if src.is_empty():
        raise EmptyVessel(f"vessel {src.label!r} has no contents to heat")
    result = HeatResult(source=src, condenser=event.condenser)
    q = event.heat
    if q == 0.0:
        return result

    if q < 0.0:
        capacity = src.heat_capacity()
        t_new = max(MIN_TEMPERATURE, src.temperature + q / capacity)
        result.sensible = capacity * (t_new - src.temperature)
        result.unused = q - result.sensible
        src.temperature = t_new
        return result

    remaining = q
    while remaining > _TINY:
        capacity = src.heat_capacity()
        if capacity <= 0.0:
            result.unused += remaining
            break
        liquids = boil_point_order(src)
        boiling = [
            (name, bp) for name, bp in liquids if bp <= src.temperature + 1e-9
        ]
        if boiling:
            name, bp = boiling[0]
            spec = src.registry[name]
            amount = min(src.solvents[name], remaining / spec.enthalpy_vaporization)
            spent = amount * spec.enthalpy_vaporization
            _vaporize(result, name, amount)
            result.latent[name] = result.latent.get(name, 0.0) + spent
            remaining -= spent
            if src.solvents.get(name, 0.0) <= _TINY:
                src.solvents.pop(name, None)
                _drop_solvent_load(src, name)
            continue
        ahead = [bp for _, bp in liquids if bp > src.temperature]
        if not ahead:
            result.sensible += remaining
            src.temperature += remaining / capacity
            remaining = 0.0
            break
        need = capacity * (ahead[0] - src.temperature)
        if remaining <= need:
            result.sensible += remaining
            src.temperature += remaining / capacity
            remaining = 0.0
        else:
            result.sensible += need
            src.temperature = ahead[0]
            remaining -= need

    src.clamp()
    event.condenser.clamp()
    solubility_sweep(src)
    return result
