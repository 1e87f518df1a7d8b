"""Synthetic spectra and echo traces with known ground truth, for checks and demos."""

from __future__ import annotations

import numpy as np

from .spectra.core import Spectrum, SpectrumKind


def gaussian(x, center, width, height=1.0):
    return height * np.exp(-0.5 * ((x - center) / width) ** 2)


def pl_grid(start=550.0, stop=800.0, step=0.5):
    return np.arange(start, stop + step / 2, step)


def nv_minus_reference(grid=None):
    """ZPL at 637 nm plus a phonon sideband peaking near 690 nm."""
    x = pl_grid() if grid is None else grid
    y = gaussian(x, 637.0, 1.5, 0.3) + gaussian(x, 690.0, 30.0, 1.0) + gaussian(x, 740.0, 25.0, 0.4)
    return Spectrum(x, y, SpectrumKind.PL_COUNTS)


def nv_zero_reference(grid=None):
    """ZPL at 575 nm plus a sideband peaking near 620 nm."""
    x = pl_grid() if grid is None else grid
    y = gaussian(x, 575.0, 1.5, 0.3) + gaussian(x, 620.0, 28.0, 1.0) + gaussian(x, 660.0, 25.0, 0.3)
    return Spectrum(x, y, SpectrumKind.PL_COUNTS)


def pl_mixture(w_minus, w_zero, noise_sigma=0.0, rng=None, grid=None):
    rm = nv_minus_reference(grid)
    r0 = nv_zero_reference(grid)
    y = w_minus * rm.values + w_zero * r0.values
    if noise_sigma:
        rng = rng if rng is not None else np.random.default_rng(0)
        y = y + rng.normal(0.0, noise_sigma, size=y.shape)
    return Spectrum(rm.wavelengths_nm, y, SpectrumKind.PL_COUNTS)


def echo_times(t_max_s=500e-6, n=401):
    return np.linspace(0.0, t_max_s, n)


def echo_trace(t2_s=100e-6, amplitude=1.0, offset=0.1, noise_frac=0.0, rng=None, times=None):
    """``a·exp(-t/T2) + c`` sampled on ``times``; noise sigma is ``noise_frac·a``."""
    t = echo_times() if times is None else np.asarray(times, dtype=float)
    s = amplitude * np.exp(-t / t2_s) + offset
    if noise_frac:
        rng = rng if rng is not None else np.random.default_rng(0)
        s = s + rng.normal(0.0, noise_frac * abs(amplitude), size=s.shape)
    return t, s


def uvvis_grid(start=220.0, stop=800.0, step=1.0):
    return np.arange(start, stop + step / 2, step)


def uvvis_spectrum(bands=(), ramp=0.0, noise_sigma=0.0, rng=None, base=0.05):
    """Absorption spectrum: flat base + optional 1/λ⁴ ramp + Gaussian bands.

    ``bands`` is a sequence of ``(center_nm, width_nm, height_cm-1)``.
    """
    x = uvvis_grid()
    y = np.full_like(x, base) + ramp * (300.0 / x) ** 4
    for center, width, height in bands:
        y = y + gaussian(x, center, width, height)
    if noise_sigma:
        rng = rng if rng is not None else np.random.default_rng(0)
        y = y + rng.normal(0.0, noise_sigma, size=y.shape)
    return Spectrum(x, y, SpectrumKind.ABSORPTION_COEFFICIENT)


GR1_ONLY = ((741.0, 3.0, 0.5),)
ND1_ONLY = ((393.0, 4.0, 0.5),)
