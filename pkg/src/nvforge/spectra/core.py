"""Spectrum container, CSV parsing, and absorption-based NV quantification."""

from __future__ import annotations

import csv
import enum
import io
import math
from dataclasses import dataclass

import numpy as np

from ..errors import (
    DuplicateWavelength,
    EmptyOverlap,
    KindMismatch,
    NonPositiveThickness,
    ParseError,
    TooShort,
    ValidationError,
)
from ..state import CARBON_DENSITY_CM3, cm3_to_ppb

SIGMA_532_CM2 = 0.95e-16
SIGMA_532_ERR_CM2 = 0.25e-16


class SpectrumKind(str, enum.Enum):
    ABSORPTION_COEFFICIENT = "AbsorptionCoefficient"
    ABSORBANCE = "Absorbance"
    PL_COUNTS = "PhotoluminescenceCounts"


@dataclass(frozen=True, eq=False)
class Spectrum:
    wavelengths_nm: np.ndarray
    values: np.ndarray
    kind: SpectrumKind = SpectrumKind.ABSORPTION_COEFFICIENT
    warnings: tuple = ()

    def __post_init__(self):
        wl = np.asarray(self.wavelengths_nm, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if wl.ndim != 1 or wl.shape != v.shape:
            raise ValidationError("wavelengths and values must be 1-D and the same length")
        if len(wl) < 2:
            raise TooShort("a spectrum needs at least 2 points")
        if not (np.all(np.isfinite(wl)) and np.all(np.isfinite(v))):
            raise ValidationError("spectrum contains non-finite values")
        if np.any(np.diff(wl) <= 0):
            raise ValidationError("wavelengths must be strictly increasing")
        wl.flags.writeable = False
        v.flags.writeable = False
        object.__setattr__(self, "wavelengths_nm", wl)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "kind", SpectrumKind(self.kind))

    def __len__(self):
        return len(self.wavelengths_nm)

    @property
    def range_nm(self):
        return float(self.wavelengths_nm[0]), float(self.wavelengths_nm[-1])

    def scaled(self, k):
        return Spectrum(self.wavelengths_nm, self.values * k, self.kind)

    def value_at(self, wavelength_nm):
        lo, hi = self.range_nm
        if not lo <= wavelength_nm <= hi:
            raise ValidationError(f"{wavelength_nm} nm outside spectrum range {lo}-{hi} nm")
        return float(np.interp(wavelength_nm, self.wavelengths_nm, self.values))


def parse_spectrum(source, kind=SpectrumKind.ABSORPTION_COEFFICIENT):
    """Read ``wavelength_nm,value`` CSV from text, bytes or a file-like object.

    A non-numeric first row is taken as a header. Descending input is sorted
    and noted in ``Spectrum.warnings``.
    """
    if hasattr(source, "read"):
        source = source.read()
    if isinstance(source, bytes):
        source = source.decode("utf-8-sig")
    rows = []
    for lineno, row in enumerate(csv.reader(io.StringIO(source)), start=1):
        cells = [c.strip() for c in row]
        if not cells or all(not c for c in cells):
            continue
        if len(cells) < 2:
            raise ParseError("expected two columns wavelength_nm,value", line=lineno)
        try:
            wl, val = float(cells[0]), float(cells[1])
        except ValueError:
            if lineno == 1 and not rows:
                continue
            raise ParseError(f"non-numeric row {','.join(cells)!r}", line=lineno) from None
        if not (math.isfinite(wl) and math.isfinite(val)):
            raise ParseError("non-finite value", line=lineno)
        rows.append((wl, val, lineno))
    if len(rows) < 2:
        raise TooShort(f"need at least 2 data rows, got {len(rows)}")
    warnings = []
    wl = np.array([r[0] for r in rows])
    if np.any(np.diff(wl) < 0):
        warnings.append("input was not in increasing wavelength order; sorted")
    order = np.argsort(wl, kind="stable")
    sorted_rows = [rows[i] for i in order]
    for a, b in zip(sorted_rows, sorted_rows[1:]):
        if a[0] == b[0]:
            raise DuplicateWavelength(f"duplicate wavelength {a[0]} nm", line=b[2])
    return Spectrum(
        np.array([r[0] for r in sorted_rows]),
        np.array([r[1] for r in sorted_rows]),
        kind,
        tuple(warnings),
    )


def spectrum_to_csv(spectrum):
    lines = ["wavelength_nm,value"]
    lines += [f"{w!r},{v!r}" for w, v in zip(spectrum.wavelengths_nm.tolist(), spectrum.values.tolist())]
    return "\n".join(lines) + "\n"


def absorbance_to_mu(absorbance, thickness_cm):
    """Decadic absorbance to the natural-log absorption coefficient in cm⁻¹."""
    if not thickness_cm > 0:
        raise NonPositiveThickness("thickness must be > 0")
    return absorbance * math.log(10.0) / thickness_cm


def to_absorption_coefficient(spectrum, thickness_cm):
    if spectrum.kind is SpectrumKind.ABSORPTION_COEFFICIENT:
        return spectrum
    if spectrum.kind is not SpectrumKind.ABSORBANCE:
        raise KindMismatch(f"cannot convert {spectrum.kind.value} to absorption coefficient")
    return Spectrum(
        spectrum.wavelengths_nm,
        absorbance_to_mu(spectrum.values, thickness_cm),
        SpectrumKind.ABSORPTION_COEFFICIENT,
        spectrum.warnings,
    )


@dataclass(frozen=True)
class NVConcentration:
    cm3: float
    ppb: float
    cm3_err: float
    ppb_err: float
    relative_uncertainty: float

    def to_dict(self):
        return {
            "nv_cm3": self.cm3,
            "nv_ppb": self.ppb,
            "nv_cm3_err": self.cm3_err,
            "nv_ppb_err": self.ppb_err,
            "relative_uncertainty": self.relative_uncertainty,
        }


def nv_from_absorption(mu_532, sigma_cm2=SIGMA_532_CM2, sigma_err_cm2=SIGMA_532_ERR_CM2,
                       carbon_density=CARBON_DENSITY_CM3):
    """NV concentration from the 532 nm absorption coefficient.

    The relative uncertainty is carried over from the cross-section alone.
    """
    if mu_532 < 0:
        raise ValidationError("absorption coefficient must be >= 0")
    if not sigma_cm2 > 0:
        raise ValidationError("cross-section must be > 0")
    rel = sigma_err_cm2 / sigma_cm2
    cm3 = mu_532 / sigma_cm2
    ppb = cm3_to_ppb(cm3, carbon_density)
    return NVConcentration(cm3, ppb, cm3 * rel, ppb * rel, rel)


def difference_spectrum(after, before):
    """``after - before`` on the part of ``after``'s grid covered by ``before``."""
    if after.kind != before.kind:
        raise KindMismatch(f"{after.kind.value} vs {before.kind.value}")
    lo, hi = before.range_nm
    mask = (after.wavelengths_nm >= lo) & (after.wavelengths_nm <= hi)
    if mask.sum() < 2:
        raise EmptyOverlap("spectra share fewer than 2 wavelength points")
    wl = after.wavelengths_nm[mask]
    diff = after.values[mask] - np.interp(wl, before.wavelengths_nm, before.values)
    return Spectrum(wl, diff, after.kind)
