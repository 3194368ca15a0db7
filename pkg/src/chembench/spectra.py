"""Measurement synthesis: UV-Vis absorption spectra of vessel contents.

The spectrum is a concentration-weighted sum of per-material Gaussian peaks,
sampled at bin centers and clipped to [0, 1] (spectrometer saturation).
Weights are mole fractions over everything in the vessel, so the spectrum is
invariant under uniform scaling of all amounts.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import UnknownMethod
from .vessel import Vessel, total_moles

DEFAULT_BINS = 100
DEFAULT_RANGE = (400.0, 800.0)  # nm


@dataclass(frozen=True)
class Spectrum:
    bins: np.ndarray                    # absorbance in [0, 1]
    wavelength_range: tuple[float, float]

    @property
    def wavelengths(self) -> np.ndarray:
        lo, hi = self.wavelength_range
        width = (hi - lo) / self.bins.size
        return lo + width * (np.arange(self.bins.size) + 0.5)


def uv_vis(
    vessel: Vessel,
    bins: int = DEFAULT_BINS,
    wavelength_range: tuple[float, float] = DEFAULT_RANGE,
) -> Spectrum:
    """Synthesize the UV-Vis absorption spectrum of a vessel."""
    if bins < 1:
        raise ValueError("bins must be >= 1")
    lo, hi = wavelength_range
    width = (hi - lo) / bins
    lam = lo + width * (np.arange(bins) + 0.5)
    absorbance = np.zeros(bins)

    amounts = {name: total_moles(vessel, name) for name in vessel.material_names()}
    total = sum(amounts.values())
    if total <= 0.0:
        return Spectrum(absorbance, wavelength_range)

    for name in sorted(amounts):
        weight = amounts[name] / total
        if weight <= 0.0:
            continue
        for center, peak_width, height in vessel.registry[name].uv_peaks:
            absorbance += (
                weight * height * np.exp(-((lam - center) ** 2) / (2.0 * peak_width**2))
            )
    return Spectrum(np.clip(absorbance, 0.0, 1.0), wavelength_range)


_METHODS = {"uv-vis": uv_vis}


def characterize(vessel: Vessel, method: str, **kwargs):
    """Dispatch a registered characterization method; purely observational."""
    try:
        fn = _METHODS[method]
    except KeyError:
        raise UnknownMethod(
            f"unknown characterization method {method!r}; "
            f"registered: {sorted(_METHODS)}"
        ) from None
    return fn(vessel, **kwargs)
