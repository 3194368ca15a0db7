"""Extraction physics: solvent layers, settle/mix partition, pixel rendering.

Solvent layers are Gaussians on a vertical position axis (0 = column center,
up positive). The mean of solvent i is

    mu_i = (t - t_mix) * sum_{j != i} (D_j - D_i)

so denser solvents sink as the settling coordinate t grows, and the shared
variance

    sigma^2(t) = exp(-t) / sqrt(2*pi)

shrinks as layers form. t_mix = 0 here and the settling coordinate is clamped
to t >= t_mix: running the clock backwards past the fully mixed point would
stratify the column upside-down.

Dissolved solutes partition between solvents by a blend between the fully
mixed split (mole fraction of each solvent) and a polarity-driven asymptote;
the blend factor is exp(30*(t_mix - t)). The asymptote's raw per-solvent
values do not sum to the dissolved total, so every update renormalizes each
solute's distribution, conserving its total exactly.

Settling moves the partition forward through time additively,

    S(t) = S*(t) + S(t') - S*(t'),        t > t'

and mixing moves it backwards with linear contraction toward the mixed split,

    S(t) = S*(t) + (t - t_mix)/(t' - t_mix) * (S(t') - S*(t')),   t < t'

applied here in fraction space (per unit of dissolved solute), which makes
composition of successive updates exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erf

T_MIX = 0.0
BLEND_RATE = 30.0       # decay rate of the mixed-split term
_VAR_FLOOR = 1e-18      # keeps Gaussian evaluation finite at large t
_PRESENT = 1e-12        # mol threshold for a solvent to count as present

AIR_LABEL = "air"


# ---------------------------------------------------------------------------
# layer geometry


def layer_means(densities: np.ndarray, t_rel: float) -> np.ndarray:
    """Gaussian means for solvents with the given densities at t - t_mix."""
    densities = np.asarray(densities, dtype=float)
    n = densities.size
    return t_rel * (densities.sum() - n * densities)


def layer_variance(t: float) -> float:
    """Shared Gaussian variance of every solvent layer at settling time t."""
    return math.exp(-t) / math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class LayerProfile:
    """Per-solvent Gaussian layer description of one vessel."""

    names: tuple[str, ...]
    means: np.ndarray       # position
    variance: float         # shared, position^2
    weights: np.ndarray     # volume fractions, sum to 1
    volumes: np.ndarray     # L per solvent


def _present_solvents(vessel) -> list[str]:
    order = [n for n in vessel.registry.names if n in vessel.solvents]
    return [n for n in order if vessel.solvents[n] > _PRESENT]


def layer_profile(vessel) -> LayerProfile:
    """Layer profile of a vessel's present solvents at its settle time."""
    names = _present_solvents(vessel)
    if not names:
        empty = np.zeros(0)
        return LayerProfile((), empty, layer_variance(vessel.settle_time), empty, empty)
    registry = vessel.registry
    densities = np.array([registry[n].density for n in names])
    volumes = np.array([vessel.solvents[n] * registry[n].molar_volume for n in names])
    means = layer_means(densities, vessel.settle_time - T_MIX)
    variance = max(layer_variance(vessel.settle_time), _VAR_FLOOR)
    return LayerProfile(tuple(names), means, variance, volumes / volumes.sum(), volumes)


def layer_mean(vessel, solvent_index: int, t: float, t_mix: float = T_MIX) -> float:
    """Mean position of one solvent layer at settling time t >= t_mix."""
    names = _present_solvents(vessel)
    densities = np.array([vessel.registry[n].density for n in names])
    return float(layer_means(densities, t - t_mix)[solvent_index])


# ---------------------------------------------------------------------------
# solute partition


def _equilibrium_fractions(
    solute_conc: float,
    polarity: float,
    solvent_polarities: np.ndarray,
    solvent_mole_fracs: np.ndarray,
    t: float,
) -> np.ndarray:
    """Normalized equilibrium split of one solute across solvents at time t."""
    n = solvent_polarities.size
    if n == 1:
        return np.ones(1)
    beta = math.exp(-BLEND_RATE * max(t - T_MIX, 0.0))
    d = np.abs(polarity - solvent_polarities)
    sum_d = d.sum()
    if sum_d <= 0.0:
        asymptote = np.ones(n)
    else:
        denom = 1.0 - float(solvent_mole_fracs @ d) / sum_d
        asymptote = (1.0 - d / sum_d) / denom
    raw = solute_conc * solvent_mole_fracs * beta + asymptote * (1.0 - beta)
    total = raw.sum()
    if total <= 0.0:
        return solvent_mole_fracs.copy()
    return raw / total


def _partition_arrays(vessel, solvent_names):
    """(solute names, amount matrix a[s, L]) over the given solvents."""
    solutes = sorted(vessel.solutes)
    amounts = np.zeros((len(solutes), len(solvent_names)))
    for i, s in enumerate(solutes):
        per_solvent = vessel.solutes[s]
        for j, L in enumerate(solvent_names):
            amounts[i, j] = per_solvent.get(L, 0.0)
    return solutes, amounts


def _write_partition(vessel, solute_names, solvent_names, amounts):
    for i, s in enumerate(solute_names):
        row = amounts[i]
        entry = {}
        for j, L in enumerate(solvent_names):
            if row[j] > 0.0:
                entry[L] = float(row[j])
        if entry:
            vessel.solutes[s] = entry
        else:
            vessel.solutes.pop(s, None)


def _advance_partition(vessel, t_old: float, t_new: float, backwards: bool) -> None:
    names = _present_solvents(vessel)
    if not names or not vessel.solutes:
        return
    registry = vessel.registry
    moles = np.array([vessel.solvents[n] for n in names])
    mole_fracs = moles / moles.sum()
    pols = np.array([registry[n].polarity for n in names])
    volume = float(
        sum(vessel.solvents[n] * registry[n].molar_volume for n in names)
    )
    solute_names, amounts = _partition_arrays(vessel, names)
    for i, s in enumerate(solute_names):
        total = amounts[i].sum()
        if total <= 0.0:
            continue
        conc = total / volume
        pol = registry[s].polarity
        f_prev = amounts[i] / total
        f_old = _equilibrium_fractions(conc, pol, pols, mole_fracs, t_old)
        f_new_eq = _equilibrium_fractions(conc, pol, pols, mole_fracs, t_new)
        if backwards:
            span = t_old - T_MIX
            factor = (t_new - T_MIX) / span if span > 0.0 else 0.0
            f_new = f_new_eq + factor * (f_prev - f_old)
        else:
            f_new = f_new_eq + f_prev - f_old
        f_new = np.maximum(f_new, 0.0)
        norm = f_new.sum()
        f_new = f_new / norm if norm > 0.0 else f_new_eq
        amounts[i] = total * f_new
    _write_partition(vessel, solute_names, names, amounts)


def settle(vessel, dt: float):
    """Advance the settling clock by dt >= 0, re-partitioning solutes."""
    if dt < 0:
        raise ValueError(f"settle dt must be >= 0, got {dt}")
    if dt == 0:
        return vessel
    t_old = vessel.settle_time
    t_new = t_old + dt
    _advance_partition(vessel, t_old, t_new, backwards=False)
    vessel.settle_time = t_new
    return vessel


def mix(vessel, dt: float):
    """Run the settling clock backwards by dt >= 0, clamped at t_mix."""
    if dt < 0:
        raise ValueError(f"mix dt must be >= 0, got {dt}")
    if dt == 0:
        return vessel
    t_old = vessel.settle_time
    t_new = max(T_MIX, t_old - dt)
    _advance_partition(vessel, t_old, t_new, backwards=True)
    vessel.settle_time = t_new
    return vessel


def homogenize(vessel):
    """Force the fully mixed state: settle time t_mix, mixed solute split.

    Used when a vessel's contents are agitated wholesale (receiving a pour,
    a solvent addition): the column re-forms and every solute returns to the
    mole-fraction split of the present solvents.
    """
    names = _present_solvents(vessel)
    vessel.settle_time = T_MIX
    if not names or not vessel.solutes:
        return vessel
    moles = np.array([vessel.solvents[n] for n in names])
    fracs = moles / moles.sum()
    solute_names, amounts = _partition_arrays(vessel, names)
    totals = amounts.sum(axis=1)
    _write_partition(vessel, solute_names, names, totals[:, None] * fracs[None, :])
    return vessel


def asymptotic_partition(vessel, solute: str) -> dict[str, float]:
    """Polarity-driven t -> infinity split of a solute, normalized to 1."""
    names = _present_solvents(vessel)
    if not names:
        raise ValueError("asymptotic_partition requires at least one solvent")
    registry = vessel.registry
    moles = np.array([vessel.solvents[n] for n in names])
    fracs = _equilibrium_fractions(
        1.0,
        registry[solute].polarity,
        np.array([registry[n].polarity for n in names]),
        moles / moles.sum(),
        t=np.inf,
    )
    return dict(zip(names, fracs.tolist()))


# ---------------------------------------------------------------------------
# column slicing (pour/drain) and rendering


def _phi(z: np.ndarray) -> np.ndarray:
    return 0.5 * (1.0 + erf(z / math.sqrt(2.0)))


def transfer_shares(vessel, fraction: float, from_top: bool) -> dict[str, float]:
    """Per-solvent share of its own volume inside the requested column slice.

    The slice holds ``fraction`` of the total liquid volume, taken from the
    top (pour) or the bottom (drain) of the settled column. Shares are found
    by slicing the Gaussian volume profile at the position where the
    cumulative volume matches the request.
    """
    profile = layer_profile(vessel)
    names = profile.names
    if not names or fraction <= 0.0:
        return {n: 0.0 for n in names}
    if fraction >= 1.0:
        return {n: 1.0 for n in names}
    if len(names) == 1:
        return {names[0]: fraction}

    sigma = math.sqrt(profile.variance)
    mu = profile.means
    vol = profile.volumes
    total = vol.sum()
    # volume below the threshold must equal target (drain) / complement (pour)
    target = fraction * total if from_top is False else (1.0 - fraction) * total

    lo = float(mu.min() - 40.0 * sigma)
    hi = float(mu.max() + 40.0 * sigma)
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        below = float(vol @ _phi((mid - mu) / sigma))
        if below < target:
            lo = mid
        else:
            hi = mid
    p_star = 0.5 * (lo + hi)
    below_shares = _phi((p_star - mu) / sigma)
    shares = below_shares if not from_top else 1.0 - below_shares
    return {n: float(min(max(shares[i], 0.0), 1.0)) for i, n in enumerate(names)}


@dataclass(frozen=True)
class RenderedColumn:
    """Pixel rendering of a vessel's column, bottom (index 0) to top."""

    classes: tuple[str, ...]    # class 0 is always "air"
    pixels: np.ndarray          # int class ids, shape (n_pixels,)

    def labels(self) -> list[str]:
        return [self.classes[i] for i in self.pixels]


def _pixel_layout(vessel, n_pixels: int):
    """(profile, classes, n_air, positions, probability matrix) for rendering."""
    profile = layer_profile(vessel)
    classes = (AIR_LABEL,) + profile.names
    liquid_volume = float(profile.volumes.sum()) if profile.names else 0.0
    capacity = vessel.volume_capacity
    air_frac = min(max(1.0 - liquid_volume / capacity, 0.0), 1.0)
    n_air = int(round(n_pixels * air_frac))
    n_liq = n_pixels - n_air
    if not profile.names or n_liq <= 0:
        return profile, classes, n_pixels, np.zeros(0), np.zeros((0, 0))

    sigma = math.sqrt(profile.variance)
    mu = profile.means
    grid = np.linspace(mu.min() - 6.0 * sigma, mu.max() + 6.0 * sigma, 801)
    cdf = profile.weights @ _phi((grid[None, :] - mu[:, None]) / sigma)
    cdf = cdf + np.linspace(0.0, 1e-9, grid.size)  # strictly increasing for interp
    quantiles = (np.arange(n_liq) + 0.5) / n_liq
    positions = np.interp(quantiles, cdf, grid)

    z = -((positions[:, None] - mu[None, :]) ** 2) / (2.0 * profile.variance)
    z -= z.max(axis=1, keepdims=True)
    scores = profile.weights[None, :] * np.exp(z)
    probs = scores / scores.sum(axis=1, keepdims=True)
    return profile, classes, n_air, positions, probs


def render_layers(vessel, n_pixels: int, rng: np.random.Generator) -> RenderedColumn:
    """Sample a pixel column of solvent-class labels for one vessel.

    Each liquid pixel sits at a volume quantile of the Gaussian layer mixture
    and draws its label with probability proportional to each layer's local
    height; the air gap above the liquid fills the remaining top pixels.
    Deterministic under a fixed generator state.
    """
    if n_pixels < 1:
        raise ValueError("n_pixels must be >= 1")
    _, classes, n_air, _, probs = _pixel_layout(vessel, n_pixels)
    n_liq = n_pixels - n_air
    pixels = np.zeros(n_pixels, dtype=np.int64)
    if n_liq > 0:
        u = rng.random(n_liq)
        cum = np.cumsum(probs, axis=1)
        ids = (u[:, None] > cum).sum(axis=1)
        pixels[:n_liq] = ids + 1  # class 0 is air
    return RenderedColumn(classes, pixels)


def render_probabilities(vessel, n_pixels: int) -> tuple[tuple[str, ...], np.ndarray]:
    """Exact per-pixel class probabilities matching ``render_layers``."""
    _, classes, n_air, _, probs = _pixel_layout(vessel, n_pixels)
    n_liq = n_pixels - n_air
    full = np.zeros((n_pixels, len(classes)))
    if n_liq > 0:
        full[:n_liq, 1:] = probs
    full[n_liq:, 0] = 1.0
    return classes, full
