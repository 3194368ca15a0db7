import pytest

from chembench.kinetics import Reaction, ReactionNetwork, load_shipped_network
from chembench.materials import Material, MaterialRegistry, load_default_registry
from chembench.vessel import Vessel


@pytest.fixture(scope="session", autouse=True)
def _warm_integrator():
    """Trigger the compiled integrator once so timed tests never pay for it."""
    from chembench.kinetics import integrate

    solvent = make_material("warm-s", molar_mass=50.0, density=0.05,
                            roles={"solvent"})
    x = make_material("X", roles={"solute"})
    y = make_material("Y", roles={"solute"})
    z = make_material("Z", molar_mass=200.0, roles={"solute"})
    reg = make_registry(solvent, x, y, z)
    vessel = make_vessel(reg, capacity=2.0)
    vessel.solvents["warm-s"] = 1.0
    vessel.solutes["X"] = {"warm-s": 0.5}
    vessel.solutes["Y"] = {"warm-s": 0.5}
    integrate(toy_network(), vessel, 0.1)


@pytest.fixture(scope="session")
def registry():
    return load_default_registry()


@pytest.fixture(scope="session")
def wurtz_network():
    return load_shipped_network("wurtz")


@pytest.fixture(scope="session")
def fictitious_network():
    return load_shipped_network("fictitious")


def make_material(name, **overrides):
    """A synthetic material record with sane defaults for tests."""
    fields = dict(
        name=name,
        molar_mass=100.0,
        density=1.0,
        polarity=0.5,
        heat_capacity_molar=100.0,
        boiling_point=400.0,
        enthalpy_vaporization=40000.0,
        solubility_limit=50.0,
        uv_peaks=(),
        phase_default="liquid",
        roles=frozenset({"solvent", "solute"}),
    )
    fields.update(overrides)
    if not isinstance(fields["roles"], frozenset):
        fields["roles"] = frozenset(fields["roles"])
    fields["uv_peaks"] = tuple(tuple(p) for p in fields["uv_peaks"])
    return Material(**fields)


def make_registry(*materials):
    return MaterialRegistry({m.name: m for m in materials}, source_name="<test>")


def make_vessel(registry, label="V", capacity=10.0, **kwargs):
    return Vessel(label, registry, volume_capacity=capacity, **kwargs)


def toy_network(a=1.0, ea=0.0):
    """X + Y -> Z with a direct rate constant (Ea = 0 makes k = a)."""
    return ReactionNetwork(
        "toy",
        ("X", "Y", "Z"),
        (Reaction((("X", 1), ("Y", 1)), (("Z", 1),), a, ea),),
    )


@pytest.fixture
def xyz_setup():
    """Registry, vessel (1 L of solvent) and X+Y->Z network at 1 M each."""
    solvent = make_material("solv", molar_mass=50.0, density=0.05, roles={"solvent"})
    x = make_material("X", roles={"solute"})
    y = make_material("Y", roles={"solute"})
    z = make_material("Z", molar_mass=200.0, roles={"solute"})
    reg = make_registry(solvent, x, y, z)
    vessel = make_vessel(reg, capacity=2.0)
    vessel.solvents["solv"] = 1.0  # molar volume 1.0 L/mol -> exactly 1 L
    vessel.solutes["X"] = {"solv": 1.0}
    vessel.solutes["Y"] = {"solv": 1.0}
    return reg, vessel, toy_network()


def total_everywhere(vessels, name):
    from chembench.vessel import total_moles

    return sum(total_moles(v, name) for v in vessels)


def ion_equivalent_totals(vessels, registry) -> dict[str, float]:
    """Per-material totals with salts decomposed into their ions.

    Precipitation recombines ions into salt; counting each salt as one of
    each ion makes totals invariant under dissolution and precipitation.
    """
    totals: dict[str, float] = {}

    def bump(name, amount):
        if amount == 0.0:
            return
        ions = registry.salt_ions.get(name)
        if ions:
            for ion in ions:
                totals[ion] = totals.get(ion, 0.0) + amount
        else:
            totals[name] = totals.get(name, 0.0) + amount

    for v in vessels:
        for table in (v.solvents, v.solids, v.gases):
            for name, amount in table.items():
                bump(name, amount)
        for name, per_solvent in v.solutes.items():
            bump(name, sum(per_solvent.values()))
    return totals
