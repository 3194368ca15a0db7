import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from chembench import solvents as dyn
from chembench.vessel import add_material, total_moles

from conftest import make_material, make_registry, make_vessel


def two_solvent_vessel(p_solute=0.5, p1=0.4, p2=0.6, moles1=10.0, moles2=10.0,
                       equal_volumes=True):
    """Synthetic two-solvent vessel with a single dissolved tracker solute."""
    mv = 0.018  # L/mol for both when equal_volumes
    s1 = make_material("s1", molar_mass=18.0, density=1.0, polarity=p1,
                       roles={"solvent"})
    density2 = 18.0 / (mv * 1000) if equal_volumes else 0.655
    s2 = make_material("s2", molar_mass=18.0, density=density2, polarity=p2,
                       roles={"solvent"})
    solute = make_material("tracker", polarity=p_solute, roles={"solute"})
    reg = make_registry(s1, s2, solute)
    v = make_vessel(reg, capacity=50.0)
    v.solvents = {"s1": moles1, "s2": moles2}
    v.solutes = {"tracker": {"s1": 0.0, "s2": 0.0}}
    return reg, v


def test_layer_variance_values():
    assert dyn.layer_variance(0.0) == pytest.approx(1.0 / math.sqrt(2 * math.pi))
    assert dyn.layer_variance(2.0) < dyn.layer_variance(1.0)
    assert dyn.layer_variance(50.0) < 1e-20


def test_layer_mean_water_hexane(registry):
    v = make_vessel(registry, capacity=10.0)
    v.solvents = {"water": 10.0, "hexane": 10.0}
    names = dyn.layer_profile(v).names
    i_water, i_hexane = names.index("water"), names.index("hexane")
    assert dyn.layer_mean(v, i_water, t=1.0) == pytest.approx(-0.345)
    assert dyn.layer_mean(v, i_hexane, t=1.0) == pytest.approx(0.345)
    assert dyn.layer_mean(v, i_water, t=0.0) == 0.0


def test_equal_densities_never_separate():
    s1 = make_material("a", density=0.9, roles={"solvent"})
    s2 = make_material("b", density=0.9, roles={"solvent"})
    s3 = make_material("c", density=0.9, roles={"solvent"})
    reg = make_registry(s1, s2, s3)
    v = make_vessel(reg)
    v.solvents = {"a": 1.0, "b": 2.0, "c": 3.0}
    v.settle_time = 7.0
    assert np.allclose(dyn.layer_profile(v).means, 0.0)


@given(
    densities=st.lists(
        st.floats(min_value=0.4, max_value=3.0).map(lambda x: round(x, 3)),
        min_size=2, max_size=5, unique=True,
    ),
    t=st.floats(min_value=5.0, max_value=50.0),
)
@settings(max_examples=40, deadline=None)
def test_means_order_by_density(densities, t):
    means = dyn.layer_means(np.array(densities), t)
    order_by_mean = np.argsort(means)            # lowest (bottom) first
    order_by_density = np.argsort(-np.array(densities))
    assert list(order_by_mean) == list(order_by_density)


def test_settle_identity_and_mix_clamp():
    _, v = two_solvent_vessel()
    v.solutes["tracker"] = {"s1": 1.0, "s2": 0.0}
    before = {k: dict(d) for k, d in v.solutes.items()}
    dyn.settle(v, 0.0)
    assert v.solutes == before and v.settle_time == 0.0
    dyn.mix(v, 5.0)
    assert v.settle_time == 0.0  # clamped at the fully mixed floor


def test_mix_reaches_mole_fraction_split():
    """At the fully mixed point the partition is the solvent mole fractions."""
    _, v = two_solvent_vessel(moles1=2.0, moles2=2.0)
    v.solutes["tracker"] = {"s1": 1.0, "s2": 0.0}
    v.settle_time = 3.0
    dyn.mix(v, 10.0)
    assert v.solutes["tracker"]["s1"] == pytest.approx(0.5, abs=1e-9)
    assert v.solutes["tracker"]["s2"] == pytest.approx(0.5, abs=1e-9)


def test_settle_reaches_polarity_asymptote():
    reg, v = two_solvent_vessel(p_solute=0.5, p1=0.4, p2=0.9)
    v.solutes["tracker"] = {"s1": 0.5, "s2": 0.5}
    dyn.settle(v, 20.0)
    # d1 = 0.1, d2 = 0.4 -> raw (1 - 0.2)/den, (1 - 0.8)/den -> 0.8 / 0.2
    assert v.solutes["tracker"]["s1"] == pytest.approx(0.8, abs=1e-6)
    assert v.solutes["tracker"]["s2"] == pytest.approx(0.2, abs=1e-6)


def test_asymptotic_partition_worked_example():
    """|P_S - P_1| = 0.1, |P_S - P_2| = 0.9 -> fractions 0.9 / 0.1."""
    reg, v = two_solvent_vessel(p_solute=1.0, p1=0.9, p2=0.1)
    fractions = dyn.asymptotic_partition(v, "tracker")
    assert fractions["s1"] == pytest.approx(0.9, abs=1e-12)
    assert fractions["s2"] == pytest.approx(0.1, abs=1e-12)


def test_asymptotic_partition_symmetry_and_single_solvent():
    reg, v = two_solvent_vessel(p_solute=0.5, p1=0.3, p2=0.7)
    fractions = dyn.asymptotic_partition(v, "tracker")
    assert fractions["s1"] == pytest.approx(0.5)
    v.solvents = {"s1": 5.0}
    assert dyn.asymptotic_partition(v, "tracker") == {"s1": 1.0}


def test_added_polar_solvent_extracts_ions(registry):
    """Salt dissolved in hexane moves to added water on settling."""
    v = make_vessel(registry, capacity=10.0)
    add_material(v, "hexane", 10.0, "liquid")
    add_material(v, "NaCl", 1.0, "dissolved")
    add_material(v, "water", 10.0, "liquid")
    dyn.settle(v, 15.0)
    for ion in ("Na+", "Cl-"):
        in_water = v.solutes[ion]["water"]
        assert in_water / total_moles(v, ion) >= 0.8
    # oracle: direct evaluation of the asymptote formula
    d_w = abs(0.88 - 0.9)
    d_h = abs(0.88 - 0.01)
    expected = (1 - d_w / (d_w + d_h))
    raw = [1 - d_w / (d_w + d_h), 1 - d_h / (d_w + d_h)]
    expected = raw[0] / sum(raw)
    assert v.solutes["Na+"]["water"] == pytest.approx(expected, abs=1e-6)


def test_settle_composition_is_additive():
    """From the mixed state, settle(a) then settle(b) equals settle(a+b)."""
    def fresh():
        _, v = two_solvent_vessel(p_solute=0.45, p1=0.2, p2=0.8,
                                  moles1=3.0, moles2=7.0)
        v.solutes["tracker"] = {"s1": 0.3, "s2": 0.7}  # mole-fraction split
        return v

    v1, v2 = fresh(), fresh()
    dyn.settle(v1, 0.07)
    dyn.settle(v1, 0.05)
    dyn.settle(v2, 0.12)
    for solvent in ("s1", "s2"):
        assert v1.solutes["tracker"][solvent] == pytest.approx(
            v2.solutes["tracker"][solvent], abs=1e-9
        )


@given(
    split=st.floats(min_value=0.0, max_value=1.0),
    steps=st.lists(
        st.tuples(st.booleans(), st.floats(min_value=0.0, max_value=3.0)),
        min_size=1, max_size=8,
    ),
)
@settings(max_examples=40, deadline=None)
def test_settle_mix_conserve_solute(split, steps):
    _, v = two_solvent_vessel(p_solute=0.3, p1=0.1, p2=0.9)
    v.solutes["tracker"] = {"s1": split, "s2": 1.0 - split}
    for forward, dt in steps:
        (dyn.settle if forward else dyn.mix)(v, dt)
    assert sum(v.solutes["tracker"].values()) == pytest.approx(1.0, abs=1e-9)
    assert all(x >= 0.0 for x in v.solutes["tracker"].values())


# ---------------------------------------------------------------------------
# rendering


def test_render_single_solvent_single_label(registry):
    v = make_vessel(registry, capacity=0.7206)
    v.solvents = {"water": 40.0}  # exactly fills the vessel
    for seed in (0, 1, 2):
        column = dyn.render_layers(v, 50, np.random.default_rng(seed))
        assert set(column.labels()) == {"water"}


def test_render_settled_bands_ordered(registry):
    v = make_vessel(registry, capacity=2.0)
    v.solvents = {"water": 40.0, "hexane": 5.0}  # 0.721 L + 0.658 L + air
    v.settle_time = 12.0
    column = dyn.render_layers(v, 100, np.random.default_rng(7))
    labels = column.labels()
    water_px = [i for i, x in enumerate(labels) if x == "water"]
    hexane_px = [i for i, x in enumerate(labels) if x == "hexane"]
    air_px = [i for i, x in enumerate(labels) if x == "air"]
    assert water_px and hexane_px and air_px
    assert max(water_px) < min(hexane_px) < max(hexane_px) < min(air_px)
    # band sizes proportional to volumes (air tops up the capacity)
    liquid = 0.7206 + 0.6578
    assert len(water_px) == pytest.approx(100 * 0.7206 / 2.0, abs=2)
    assert len(air_px) == pytest.approx(100 * (2.0 - liquid) / 2.0, abs=2)


def test_render_mixed_is_bernoulli(registry):
    """Fully mixed equal-volume pair: i.i.d. labels, no long runs."""
    mv_water = 18.015 / 1.0 / 1000
    mv_hexane = 86.178 / 0.655 / 1000
    v = make_vessel(registry, capacity=1.0)
    v.solvents = {"water": 0.5 / mv_water, "hexane": 0.5 / mv_hexane}
    v.settle_time = 0.0
    column = dyn.render_layers(v, 100, np.random.default_rng(3))
    labels = column.labels()
    assert set(labels) <= {"water", "hexane"}
    longest = run = 1
    for a, b in zip(labels, labels[1:]):
        run = run + 1 if a == b else 1
        longest = max(longest, run)
    assert longest < 20
    assert 20 <= labels.count("water") <= 80


def test_render_deterministic_under_seed(registry):
    v = make_vessel(registry, capacity=2.0)
    v.solvents = {"water": 20.0, "hexane": 5.0}
    v.settle_time = 0.8
    a = dyn.render_layers(v, 100, np.random.default_rng(11))
    b = dyn.render_layers(v, 100, np.random.default_rng(11))
    assert a.classes == b.classes
    assert np.array_equal(a.pixels, b.pixels)


def test_render_probabilities_match_sampling(registry):
    v = make_vessel(registry, capacity=2.0)
    v.solvents = {"water": 20.0, "hexane": 10.0}
    v.settle_time = 0.6
    classes, probs = dyn.render_probabilities(v, 60)
    assert probs.shape == (60, len(classes))
    assert np.allclose(probs.sum(axis=1), 1.0)
    rng = np.random.default_rng(5)
    counts = np.zeros_like(probs)
    n = 2000
    for _ in range(n):
        column = dyn.render_layers(v, 60, rng)
        for i, c in enumerate(column.pixels):
            counts[i, c] += 1
    freq = counts / n
    sigma = np.sqrt(probs * (1 - probs) / n)
    assert np.all(np.abs(freq - probs) <= 3.5 * sigma + 2.0 / n)
