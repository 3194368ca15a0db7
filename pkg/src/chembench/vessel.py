"""Vessel state and conservative material transfers.

A vessel tracks four inventories: ``solvents`` (liquid phase, mol),
``solutes`` (dissolved amounts per solute per host solvent), ``solids`` and
``gases``. Amounts are clamped at zero after every mutation with tolerance
1e-12; anything more negative raises, since it indicates a conservation bug
rather than round-off.

Transfers slice the settled liquid column: ``pour`` takes the top fraction,
``drain`` the bottom fraction (the two are complementary reads of the same
layer profile). Dissolved solutes travel in proportion to their host
solvent's transferred share. Solids and gases never travel with a pour or a
drain; gases only move through the distillation condenser path. Destination
overflow beyond capacity is discarded and reported, never raised, so agents
can take bad actions and observe the consequences.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import solvents as dyn
from .errors import CapacityExceeded, NoSolventPresent, NotFound, ValidationError
from .materials import MaterialRegistry

NEG_TOL = 1e-12     # amounts below -NEG_TOL indicate a bug
_PRUNE = 0.0        # entries at exactly zero are dropped

DISSOLVED = "dissolved"
PHASES = ("solid", "liquid", "gas", DISSOLVED)


@dataclass
class TransferReport:
    """What a pour/drain moved, and what spilled past capacity (discarded)."""

    moved: dict[tuple[str, str], float] = field(default_factory=dict)
    overflow: dict[tuple[str, str], float] = field(default_factory=dict)

    def record(self, table: dict, material: str, phase: str, amount: float) -> None:
        if amount > 0.0:
            key = (material, phase)
            table[key] = table.get(key, 0.0) + amount


@dataclass
class Vessel:
    """Mutable container state; exclusively owned by one environment."""

    label: str
    registry: MaterialRegistry
    temperature: float = 297.0          # K
    volume_capacity: float = 1.0        # L
    pressure: float = 101.325           # kPa
    settle_time: float = dyn.T_MIX
    solvents: dict[str, float] = field(default_factory=dict)
    solutes: dict[str, dict[str, float]] = field(default_factory=dict)
    solids: dict[str, float] = field(default_factory=dict)
    gases: dict[str, float] = field(default_factory=dict)

    # -- read-only helpers -------------------------------------------------

    def liquid_volume(self) -> float:
        """Total solvent-phase volume in L (dissolved solutes add none)."""
        reg = self.registry
        return sum(amt * reg[name].molar_volume for name, amt in self.solvents.items())

    def solvent_volumes(self) -> dict[str, float]:
        reg = self.registry
        return {n: amt * reg[n].molar_volume for n, amt in self.solvents.items()}

    def dissolved_total(self, material: str) -> float:
        return sum(self.solutes.get(material, {}).values())

    def material_names(self) -> set[str]:
        names = set(self.solvents) | set(self.solids) | set(self.gases)
        names.update(self.solutes)
        return names

    def is_empty(self) -> bool:
        return not (self.solvents or self.solutes or self.solids or self.gases)

    def heat_capacity(self) -> float:
        """Total heat capacity of all contents, J/K."""
        reg = self.registry
        total = 0.0
        for table in (self.solvents, self.solids, self.gases):
            for name, amt in table.items():
                total += amt * reg[name].heat_capacity_molar
        for name, per_solvent in self.solutes.items():
            cp = reg[name].heat_capacity_molar
            total += cp * sum(per_solvent.values())
        return total

    # -- mutation helpers --------------------------------------------------

    def _clamp_table(self, table: dict[str, float]) -> None:
        for key in list(table):
            value = table[key]
            if value < 0.0:
                if value < -NEG_TOL:
                    raise ValidationError(
                        f"vessel {self.label!r}: negative amount {value!r} for {key!r}"
                    )
                value = 0.0
            if value <= _PRUNE:
                del table[key]
            else:
                table[key] = value

    def clamp(self) -> None:
        """Clamp round-off negatives to zero and prune empty entries."""
        self._clamp_table(self.solvents)
        self._clamp_table(self.solids)
        self._clamp_table(self.gases)
        for solute in list(self.solutes):
            self._clamp_table(self.solutes[solute])
            if not self.solutes[solute]:
                del self.solutes[solute]

    def check_capacity(self) -> None:
        if self.liquid_volume() > self.volume_capacity + 1e-9:
            raise CapacityExceeded(
                f"vessel {self.label!r}: liquid volume {self.liquid_volume():.6f} L "
                f"exceeds capacity {self.volume_capacity} L"
            )

    def add_dissolved(self, material: str, amount: float) -> None:
        """Split a dissolved addition across solvents by volume fraction."""
        volumes = self.solvent_volumes()
        total = sum(volumes.values())
        if total <= 0.0:
            raise NoSolventPresent(
                f"vessel {self.label!r}: cannot dissolve {material!r} without solvent"
            )
        spec = self.registry[material]
        species = spec.dissociates_to if spec.dissociates_to else (material,)
        for name in species:
            entry = self.solutes.setdefault(name, {})
            for solvent, vol in volumes.items():
                entry[solvent] = entry.get(solvent, 0.0) + amount * (vol / total)

    def redissolve(self) -> None:
        """Dissolve solute-role solids up to each material's solubility limit.

        Called when new solvent arrives. Salts re-enter as their ion pair.
        """
        volumes = self.solvent_volumes()
        total_volume = sum(volumes.values())
        if total_volume <= 0.0:
            return
        reg = self.registry
        for name in sorted(self.solids):
            spec = reg[name]
            if "solute" not in spec.roles:
                continue
            if spec.dissociates_to:
                dissolved = min(
                    self.dissolved_total(ion) for ion in spec.dissociates_to
                )
            else:
                dissolved = self.dissolved_total(name)
            headroom = spec.solubility_limit * total_volume - dissolved
            take = min(self.solids[name], max(headroom, 0.0))
            if take > 0.0:
                self.solids[name] -= take
                self.add_dissolved(name, take)
        self.clamp()


def add_material(vessel: Vessel, material: str, amount: float, phase: str) -> Vessel:
    """Add ``amount`` mol of a material in the given phase.

    ``dissolved`` additions split across present solvents proportional to
    solvent volume (raising NoSolventPresent when there is none); ``liquid``
    additions re-check the capacity invariant and trigger redissolution of
    solute solids into the enlarged solvent pool.
    """
    if amount < 0.0:
        raise ValidationError(f"amount must be >= 0, got {amount}")
    if phase not in PHASES:
        raise ValidationError(f"unknown phase {phase!r}")
    if material not in vessel.registry:
        raise NotFound(f"unknown material {material!r}")
    if amount == 0.0:
        return vessel
    if phase == "liquid":
        before = vessel.solvents.get(material, 0.0)
        vessel.solvents[material] = before + amount
        if vessel.liquid_volume() > vessel.volume_capacity + 1e-9:
            vessel.solvents[material] = before
            vessel.clamp()
            raise CapacityExceeded(
                f"vessel {vessel.label!r}: adding {amount} mol {material!r} "
                "exceeds capacity"
            )
        vessel.redissolve()
        # a fresh solvent charge agitates the column back to the mixed state
        dyn.homogenize(vessel)
    elif phase == DISSOLVED:
        vessel.add_dissolved(material, amount)
    elif phase == "solid":
        vessel.solids[material] = vessel.solids.get(material, 0.0) + amount
    else:
        vessel.gases[material] = vessel.gases.get(material, 0.0) + amount
    vessel.clamp()
    return vessel


def _transfer(src: Vessel, dst: Vessel, fraction: float, from_top: bool):
    if not 0.0 <= fraction <= 1.0:
        raise ValidationError(f"fraction must be in [0, 1], got {fraction}")
    report = TransferReport()
    if fraction == 0.0:
        return src, dst, report

    shares = dyn.transfer_shares(src, fraction, from_top=from_top)
    moved_solvents: dict[str, float] = {}
    moved_solutes: dict[str, dict[str, float]] = {}
    for solvent, share in shares.items():
        if share <= 0.0:
            continue
        have = src.solvents.get(solvent, 0.0)
        kept = have * (1.0 - share)
        moved_solvents[solvent] = have - kept
        for solute, per_solvent in src.solutes.items():
            amt = per_solvent.get(solvent, 0.0)
            if amt > 0.0:
                kept_s = amt * (1.0 - share)
                moved_solutes.setdefault(solute, {})[solvent] = amt - kept_s

    # destination capacity: accept what fits, discard the rest as overflow
    reg = src.registry
    incoming = sum(amt * reg[n].molar_volume for n, amt in moved_solvents.items())
    headroom = max(dst.volume_capacity - dst.liquid_volume(), 0.0)
    accept = 1.0 if incoming <= headroom else (headroom / incoming if incoming > 0 else 0.0)

    for solvent, amt in moved_solvents.items():
        src.solvents[solvent] = src.solvents.get(solvent, 0.0) - amt
        accepted = amt * accept
        spilled = amt - accepted
        if accepted > 0.0:
            dst.solvents[solvent] = dst.solvents.get(solvent, 0.0) + accepted
        report.record(report.moved, solvent, "liquid", accepted)
        report.record(report.overflow, solvent, "liquid", spilled)
    for solute, per_solvent in moved_solutes.items():
        src_entry = src.solutes.get(solute, {})
        for solvent, amt in per_solvent.items():
            src_entry[solvent] = src_entry.get(solvent, 0.0) - amt
            accepted = amt * accept
            spilled = amt - accepted
            if accepted > 0.0:
                dst_entry = dst.solutes.setdefault(solute, {})
                dst_entry[solvent] = dst_entry.get(solvent, 0.0) + accepted
            report.record(report.moved, solute, DISSOLVED, accepted)
            report.record(report.overflow, solute, DISSOLVED, spilled)

    src.clamp()
    dst.clamp()
    return src, dst, report


def pour(src: Vessel, dst: Vessel, fraction: float):
    """Pour the top ``fraction`` of src's liquid column into dst.

    Pouring agitates both vessels: each returns to the fully mixed state.
    """
    src, dst, report = _transfer(src, dst, fraction, from_top=True)
    if fraction > 0.0:
        dyn.homogenize(src)
        dyn.homogenize(dst)
    return src, dst, report


def drain(src: Vessel, dst: Vessel, fraction: float):
    """Drain the bottom ``fraction`` of src's liquid column into dst.

    Draining leaves the source's stratification intact; only the receiving
    vessel is agitated.
    """
    src, dst, report = _transfer(src, dst, fraction, from_top=False)
    if fraction > 0.0:
        dyn.homogenize(dst)
    return src, dst, report


# ---------------------------------------------------------------------------
# inventory and purity metrics


def total_moles(vessel: Vessel, material: str) -> float:
    """Amount of a material summed over all phases, mol."""
    return (
        vessel.solvents.get(material, 0.0)
        + vessel.dissolved_total(material)
        + vessel.solids.get(material, 0.0)
        + vessel.gases.get(material, 0.0)
    )


def salt_unit_moles(vessel: Vessel, material: str) -> float:
    """Amount of a material counting dissolved ion pairs as whole salt units."""
    ions = vessel.registry.salt_ions.get(material)
    amount = total_moles(vessel, material)
    if ions:
        amount += min(total_moles(vessel, ion) for ion in ions)
    return amount


def _equivalent_moles(vessel: Vessel, coeffs: dict[str, float], solvent_phase: bool) -> float:
    total = 0.0
    for name, coeff in coeffs.items():
        amount = (
            vessel.dissolved_total(name)
            + vessel.solids.get(name, 0.0)
            + vessel.gases.get(name, 0.0)
        )
        if solvent_phase:
            amount += vessel.solvents.get(name, 0.0)
        total += coeff * amount
    return total


def _solute_moles(vessel: Vessel) -> float:
    total = sum(sum(p.values()) for p in vessel.solutes.values())
    total += sum(vessel.solids.values()) + sum(vessel.gases.values())
    return total


def _all_moles(vessel: Vessel) -> float:
    return _solute_moles(vessel) + sum(vessel.solvents.values())


def _weighted_purity(vessels, target: str, absolute: bool) -> float:
    registry = vessels[0].registry
    coeffs = registry.equivalents(target)
    weights = []
    purities = []
    for v in vessels:
        amount = _equivalent_moles(v, coeffs, solvent_phase=absolute)
        if amount <= 0.0:
            continue
        denom = _all_moles(v) if absolute else _solute_moles(v)
        weights.append(amount)
        purities.append(amount / denom if denom > 0.0 else 0.0)
    total = sum(weights)
    if total <= 0.0:
        return 0.0
    return sum(w * p for w, p in zip(weights, purities)) / total


def solute_purity(vessels: list[Vessel], target: str) -> float:
    """Amount-weighted solute purity of the target across vessels.

    Per vessel: target moles over all solute moles (solvent-phase material
    excluded); vessels weighted by their share of the total target amount.
    A dissolved salt counts as its two ions, matching how the denominator
    sees them.
    """
    return _weighted_purity(vessels, target, absolute=False)


def absolute_purity(vessels: list[Vessel], target: str) -> float:
    """As solute_purity, but counting every material including solvents."""
    return _weighted_purity(vessels, target, absolute=True)
