"""Local-baseline band integration and defect-band detection for UV-Vis spectra.

Each band is integrated over a fixed window after subtracting a straight line
fitted to the spectrum just outside the window. A local line absorbs the
broad absorption 'ramp' without modelling it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import BadCalibration, WindowOutOfRange

P1_WINDOW = (255.0, 285.0)


@dataclass(frozen=True)
class BandDef:
    name: str
    zpl_nm: tuple
    window_nm: tuple
    broad_nm: tuple | None = None


BANDS = (
    BandDef("P1_270", (270.0,), P1_WINDOW),
    BandDef("ND1", (393.0, 375.0, 384.0), (360.0, 400.0)),
    BandDef("C489", (489.0,), (450.0, 500.0)),
    BandDef("NV_zero_575", (575.0,), (565.0, 585.0)),
    BandDef("NV_minus_637", (637.0,), (625.0, 650.0)),
    BandDef("GR1", (741.0,), (720.0, 760.0), broad_nm=(500.0, 750.0)),
)


@dataclass(frozen=True, eq=False)
class BaselineResult:
    wavelengths_nm: np.ndarray
    corrected: np.ndarray
    baseline: np.ndarray
    residual_rms: float
    slope: float
    intercept: float

    @property
    def strength(self):
        """Trapezoidal integral of the corrected segment, negatives clamped to 0."""
        return float(np.trapezoid(np.clip(self.corrected, 0.0, None), self.wavelengths_nm))

    @property
    def peak(self):
        return float(np.max(self.corrected))


def _margin(wl, mask_side, edge, width, min_points, left):
    idx = np.flatnonzero(mask_side)
    near = idx[np.abs(wl[idx] - edge) <= width]
    if len(near) >= min_points:
        return near
    return idx[-min_points:] if left else idx[:min_points]


def subtract_baseline(spectrum, window, margin_frac=0.1, min_margin_points=3, min_side_points=5):
    """Remove a straight line fitted to both side margins of ``window``.

    Margins sit just outside the window, each 10 % of the window width wide
    and at least ``min_margin_points`` samples. The spectrum must extend at
    least ``min_side_points`` samples past each window edge.
    """
    lo, hi = float(window[0]), float(window[1])
    if not hi > lo:
        raise WindowOutOfRange(f"empty window {window}")
    wl = spectrum.wavelengths_nm
    vals = spectrum.values
    below = wl < lo
    above = wl > hi
    inside = ~below & ~above
    if below.sum() < min_side_points or above.sum() < min_side_points or inside.sum() < 2:
        raise WindowOutOfRange(
            f"window {lo:g}-{hi:g} nm needs {min_side_points} points of margin on both sides "
            f"of spectrum range {wl[0]:g}-{wl[-1]:g} nm"
        )
    width = margin_frac * (hi - lo)
    left = _margin(wl, below, lo, width, min_margin_points, left=True)
    right = _margin(wl, above, hi, width, min_margin_points, left=False)
    idx = np.concatenate([left, right])
    x, y = wl[idx], vals[idx]
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    rms = float(np.sqrt(np.mean(resid**2)))
    seg = wl[inside]
    base = slope * seg + intercept
    return BaselineResult(seg, vals[inside] - base, base, rms, float(slope), float(intercept))


def band_strength(spectrum, window):
    return subtract_baseline(spectrum, window).strength


@dataclass(frozen=True)
class BandRecord:
    name: str
    zpl_nm: tuple
    window_nm: tuple
    covered: bool
    integrated_strength: float | None
    peak: float | None
    noise_rms: float | None
    present: bool
    broad_present: bool | None = None

    def to_dict(self):
        d = {
            "name": self.name,
            "zpl_nm": list(self.zpl_nm),
            "window_nm": list(self.window_nm),
            "covered": self.covered,
            "integrated_strength": self.integrated_strength,
            "peak": self.peak,
            "noise_rms": self.noise_rms,
            "present": self.present,
        }
        if self.broad_present is not None:
            d["broad_present"] = self.broad_present
        return d


@dataclass(frozen=True)
class BandReport:
    bands: tuple
    over_irradiation_warning: bool
    threshold_factor: float

    def __getitem__(self, name):
        for b in self.bands:
            if b.name == name:
                return b
        raise KeyError(name)

    @property
    def complete(self):
        return all(b.covered for b in self.bands)

    def to_dict(self):
        return {
            "bands": [b.to_dict() for b in self.bands],
            "over_irradiation_warning": self.over_irradiation_warning,
            "threshold_factor": self.threshold_factor,
            "complete": self.complete,
        }


def _is_present(result, threshold_factor, scale):
    # The floor keeps round-off in an exactly flat spectrum from counting as a band.
    floor = 1e-9 * scale
    return result.peak > max(threshold_factor * result.residual_rms, floor)


def detect_bands(spectrum, threshold_factor=3.0, bands=BANDS):
    """Integrate and flag every known band the spectrum covers.

    A band is present when its baseline-corrected peak exceeds
    ``threshold_factor`` times the RMS scatter of the margin points about the
    fitted baseline. Uncovered bands are reported with ``covered=False``.
    A present GR1 zero-phonon line sets ``over_irradiation_warning``.
    """
    scale = float(np.max(np.abs(spectrum.values))) if len(spectrum) else 0.0
    records = []
    for band in bands:
        try:
            res = subtract_baseline(spectrum, band.window_nm)
        except WindowOutOfRange:
            records.append(BandRecord(band.name, band.zpl_nm, band.window_nm, False, None, None, None, False))
            continue
        broad = None
        if band.broad_nm is not None:
            try:
                broad = _is_present(subtract_baseline(spectrum, band.broad_nm), threshold_factor, scale)
            except WindowOutOfRange:
                broad = None
        records.append(BandRecord(
            band.name, band.zpl_nm, band.window_nm, True,
            res.strength, res.peak, res.residual_rms,
            _is_present(res, threshold_factor, scale), broad,
        ))
    report = tuple(records)
    gr1 = next((r for r in report if r.name == "GR1"), None)
    return BandReport(report, bool(gr1 and gr1.present), threshold_factor)


@dataclass(frozen=True)
class Band270Calibration:
    reference_strength: float
    reference_p1_ppm: float

    def __post_init__(self):
        if not self.reference_strength > 0:
            raise BadCalibration("reference band strength must be > 0")
        if not self.reference_p1_ppm >= 0:
            raise BadCalibration("reference P1 must be >= 0")


def calibrate_270(reference_spectrum, reference_p1_ppm):
    return Band270Calibration(band_strength(reference_spectrum, P1_WINDOW), reference_p1_ppm)


def p1_from_270_band(spectrum, calibration):
    """P1 (ppm) by scaling a reference sample with the 270 nm band strength."""
    if not isinstance(calibration, Band270Calibration):
        calibration = Band270Calibration(*calibration)
    return calibration.reference_p1_ppm * band_strength(spectrum, P1_WINDOW) / calibration.reference_strength
