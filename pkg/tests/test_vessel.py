import pytest
from hypothesis import given, settings, strategies as st

from chembench.errors import CapacityExceeded, NoSolventPresent, ValidationError
from chembench.vessel import (
    absolute_purity,
    add_material,
    drain,
    pour,
    salt_unit_moles,
    solute_purity,
    total_moles,
)

from conftest import ion_equivalent_totals, make_material, make_registry, make_vessel


def settled_water_hexane(registry, ions=False, settle_to=12.0):
    """4 mol ether-free vessel: water below hexane, fully stratified."""
    from chembench import solvents as dyn

    v = make_vessel(registry, capacity=10.0)
    add_material(v, "hexane", 10.0, "liquid")       # 0.862 L
    if ions:
        add_material(v, "NaCl", 0.5, "dissolved")
    add_material(v, "water", 40.0, "liquid")        # 0.721 L
    dyn.settle(v, settle_to)
    return v


def test_add_solid():
    reg = make_registry(make_material("Na", phase_default="solid", roles={"solute"}))
    v = make_vessel(reg, capacity=1.0)
    add_material(v, "Na", 1.0, "solid")
    assert v.solids["Na"] == 1.0
    assert total_moles(v, "Na") == 1.0


def test_dissolved_split_is_volume_proportional(registry):
    v = make_vessel(registry, capacity=10.0)
    # equal 2 L volumes: water 18.015 g/mol at 1.0 g/mL; hexane 86.178 at 0.655
    add_material(v, "water", 2000.0 / 18.015, "liquid")
    add_material(v, "hexane", 2000.0 / (86.178 / 0.655), "liquid")
    add_material(v, "NaCl", 1.0, "dissolved")
    for ion in ("Na+", "Cl-"):
        assert v.solutes[ion]["water"] == pytest.approx(0.5, abs=1e-9)
        assert v.solutes[ion]["hexane"] == pytest.approx(0.5, abs=1e-9)


def test_dissolved_add_requires_solvent(registry):
    v = make_vessel(registry)
    with pytest.raises(NoSolventPresent):
        add_material(v, "NaCl", 1.0, "dissolved")


def test_capacity_enforced(registry):
    v = make_vessel(registry, capacity=0.1)
    with pytest.raises(CapacityExceeded):
        add_material(v, "water", 10.0, "liquid")
    assert v.solvents.get("water", 0.0) == 0.0  # rollback


def test_negative_amount_rejected(registry):
    v = make_vessel(registry)
    with pytest.raises(ValidationError):
        add_material(v, "water", -1.0, "liquid")


def test_pour_fraction_zero_is_identity(registry):
    src = settled_water_hexane(registry)
    dst = make_vessel(registry, "dst")
    before = dict(src.solvents)
    _, _, report = pour(src, dst, 0.0)
    assert src.solvents == before
    assert dst.is_empty()
    assert not report.moved


def test_pour_full_conserves(registry):
    src = settled_water_hexane(registry, ions=True)
    dst = make_vessel(registry, "dst", capacity=10.0)
    before = ion_equivalent_totals([src, dst], registry)
    pour(src, dst, 1.0)
    after = ion_equivalent_totals([src, dst], registry)
    assert set(before) == set(after)
    for name in before:
        assert after[name] == pytest.approx(before[name], abs=1e-9)
    assert not src.solvents


def test_pour_takes_top_layer(registry):
    """Top slice of a settled column is nearly all the lighter solvent."""
    src = settled_water_hexane(registry)
    dst = make_vessel(registry, "dst")
    volumes = src.solvent_volumes()
    hexane_share = volumes["hexane"] / sum(volumes.values())
    hexane_before = src.solvents["hexane"]
    water_before = src.solvents["water"]
    pour(src, dst, hexane_share)
    assert dst.solvents.get("hexane", 0.0) >= 0.95 * hexane_before
    assert dst.solvents.get("water", 0.0) <= 0.05 * water_before


def test_drain_takes_bottom_layer_with_its_solutes(registry):
    src = settled_water_hexane(registry, ions=True)
    dst = make_vessel(registry, "dst")
    volumes = src.solvent_volumes()
    water_share = volumes["water"] / sum(volumes.values())
    water_before = src.solvents["water"]
    na_before = total_moles(src, "Na+")
    na_in_water = src.solutes["Na+"]["water"]
    assert na_in_water >= 0.9 * na_before  # ions followed the polar solvent
    drain(src, dst, water_share)
    assert dst.solvents.get("water", 0.0) >= 0.95 * water_before
    assert total_moles(dst, "Na+") >= 0.95 * na_in_water


def test_drain_preserves_source_settling(registry):
    src = settled_water_hexane(registry)
    dst = make_vessel(registry, "dst")
    drain(src, dst, 0.2)
    assert src.settle_time == 12.0
    assert dst.settle_time == 0.0


def test_pour_agitates_both(registry):
    src = settled_water_hexane(registry)
    dst = make_vessel(registry, "dst")
    pour(src, dst, 0.3)
    assert src.settle_time == 0.0
    assert dst.settle_time == 0.0


def test_pour_roundtrip_restores_totals(registry):
    src = settled_water_hexane(registry, ions=True)
    dst = make_vessel(registry, "dst", capacity=10.0)
    before = {n: total_moles(src, n) for n in src.material_names()}
    pour(src, dst, 0.37)
    pour(dst, src, 1.0)
    for name, amount in before.items():
        assert total_moles(src, name) == pytest.approx(amount, rel=1e-12, abs=1e-15)
    assert dst.is_empty()


def test_overflow_is_discarded_and_reported(registry):
    src = settled_water_hexane(registry)
    dst = make_vessel(registry, "dst", capacity=0.5)  # too small for 1.58 L
    before = ion_equivalent_totals([src, dst], registry)
    _, _, report = pour(src, dst, 1.0)
    spilled = sum(report.overflow.values())
    assert spilled > 0.0
    assert dst.liquid_volume() <= dst.volume_capacity + 1e-9
    after = ion_equivalent_totals([src, dst], registry)
    for name in before:
        recovered = after.get(name, 0.0) + sum(
            amt for (mat, _), amt in report.overflow.items() if mat == name
        )
        assert recovered == pytest.approx(before[name], abs=1e-9)


def test_solids_stay_during_pour(registry):
    src = settled_water_hexane(registry)
    add_material(src, "NaCl", 2.0, "solid")
    dst = make_vessel(registry, "dst")
    pour(src, dst, 1.0)
    assert src.solids["NaCl"] == 2.0
    assert "NaCl" not in dst.solids


def test_worked_purity_example(registry):
    """Two-vessel split: 0.7/0.2/0.2 vs 0.3/0.8/0.8 -> purity 0.493."""
    a = make_vessel(registry, "a")
    add_material(a, "diethyl-ether", 2.0, "liquid")
    a.solutes = {"dodecane": {"diethyl-ether": 0.7},
                 "Na+": {"diethyl-ether": 0.2}, "Cl-": {"diethyl-ether": 0.2}}
    b = make_vessel(registry, "b")
    add_material(b, "diethyl-ether", 2.0, "liquid")
    b.solutes = {"dodecane": {"diethyl-ether": 0.3},
                 "Na+": {"diethyl-ether": 0.8}, "Cl-": {"diethyl-ether": 0.8}}
    purity = solute_purity([a, b], "dodecane")
    assert purity == pytest.approx(0.7 * 7 / 11 + 0.3 * 3 / 19, abs=1e-12)
    assert purity == pytest.approx(0.493, abs=1e-3)
    # reward = (final - initial purity) x target amount, initial purity 1/3
    assert (purity - 1.0 / 3.0) * 1.0 == pytest.approx(0.159, abs=1e-3)


def test_purity_trivial_cases(registry):
    v = make_vessel(registry)
    add_material(v, "diethyl-ether", 1.0, "liquid")
    add_material(v, "dodecane", 0.4, "dissolved")
    assert solute_purity([v], "dodecane") == 1.0
    assert solute_purity([v], "5-methylundecane") == 0.0


def test_absolute_purity_counts_solvents(registry):
    v = make_vessel(registry)
    add_material(v, "diethyl-ether", 4.0, "liquid")
    add_material(v, "dodecane", 1.0, "dissolved")
    assert absolute_purity([v], "dodecane") == pytest.approx(0.2, abs=1e-12)
    only = make_vessel(registry, "pure")
    add_material(only, "dodecane", 0.7, "solid")
    assert absolute_purity([only], "dodecane") == 1.0
    assert absolute_purity([only], "NaCl") == 0.0


def test_salt_counts_as_its_ions(registry):
    v = make_vessel(registry)
    add_material(v, "diethyl-ether", 4.0, "liquid")
    add_material(v, "NaCl", 1.0, "dissolved")
    # 2 ion mol over (4 ether + 2 ions)
    assert absolute_purity([v], "NaCl") == pytest.approx(2.0 / 6.0, abs=1e-12)
    assert solute_purity([v], "NaCl") == 1.0
    assert salt_unit_moles(v, "NaCl") == pytest.approx(1.0)


@given(scale=st.floats(min_value=1e-3, max_value=1e3))
@settings(max_examples=25, deadline=None)
def test_purity_scale_invariance(registry, scale):
    a = make_vessel(registry, "a", capacity=1e6)
    a.solvents = {"diethyl-ether": 2.0 * scale}
    a.solutes = {"dodecane": {"diethyl-ether": 0.7 * scale},
                 "Na+": {"diethyl-ether": 0.2 * scale},
                 "Cl-": {"diethyl-ether": 0.2 * scale}}
    assert solute_purity([a], "dodecane") == pytest.approx(7 / 11, rel=1e-9)
    assert absolute_purity([a], "dodecane") == pytest.approx(
        0.7 / (2 + 1.1), rel=1e-9
    )


@given(
    fractions=st.lists(st.floats(min_value=0.0, max_value=1.0), min_size=1, max_size=6),
    order=st.lists(st.integers(min_value=0, max_value=5), min_size=1, max_size=6),
)
@settings(max_examples=40, deadline=None)
def test_transfer_sequences_conserve(registry, fractions, order):
    """Any pour/drain sequence conserves ion-equivalent totals to 1e-9."""
    vessels = [make_vessel(registry, f"v{i}", capacity=3.0) for i in range(3)]
    add_material(vessels[0], "diethyl-ether", 4.0, "liquid")
    add_material(vessels[0], "NaCl", 1.0, "dissolved")
    add_material(vessels[0], "dodecane", 1.0, "dissolved")
    add_material(vessels[1], "water", 4.0, "liquid")
    before = ion_equivalent_totals(vessels, registry)
    overflow: dict[str, float] = {}
    for f, o in zip(fractions, order):
        src = vessels[o % 3]
        dst = vessels[(o + 1 + o % 2) % 3]
        if src is dst:
            continue
        op = pour if o % 2 == 0 else drain
        _, _, report = op(src, dst, f)
        for (mat, _), amount in report.overflow.items():
            ions = registry.salt_ions.get(mat)
            for name in ions if ions else (mat,):
                overflow[name] = overflow.get(name, 0.0) + amount
    after = ion_equivalent_totals(vessels, registry)
    for name in before:
        total = after.get(name, 0.0) + overflow.get(name, 0.0)
        assert total == pytest.approx(before[name], abs=1e-9)
