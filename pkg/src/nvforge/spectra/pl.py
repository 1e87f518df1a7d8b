"""NV charge-state decomposition of a PL spectrum into NV⁻ and NV⁰ references.

The measured spectrum is fitted as a non-negative weighted sum of the two
reference spectra. Photon numbers are the weighted reference integrals; the
concentration ratio corrects them with the excited-state decay rates,
``[NV⁻]/[NV⁰] = (N⁻/N⁰) · (Γ⁻/Γ⁰)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import DegenerateReferences, EmptyOverlap, ValidationError

GAMMA_MINUS_PER_NS = 1.0 / 12.0
GAMMA_ZERO_PER_NS = 1.0 / 20.0


def nnls(A, b, max_iter=None):
    """Lawson-Hanson active-set non-negative least squares.

    Ties in the gradient are broken toward the lowest column index so the
    result does not depend on floating-point ordering.
    """
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    n = A.shape[1]
    x = np.zeros(n)
    passive = np.zeros(n, dtype=bool)
    max_iter = max_iter or 3 * n + 10
    tol = 10 * np.finfo(float).eps * np.linalg.norm(A, 1) * max(A.shape)
    for _ in range(max_iter):
        w = A.T @ (b - A @ x)
        candidates = np.flatnonzero(~passive & (w > tol))
        if len(candidates) == 0:
            break
        best = w[candidates].max()
        j = candidates[np.flatnonzero(w[candidates] == best)[0]]
        passive[j] = True
        while True:
            idx = np.flatnonzero(passive)
            z = np.zeros(n)
            z[idx] = np.linalg.lstsq(A[:, idx], b, rcond=None)[0]
            if np.all(z[idx] > 0):
                x = z
                break
            neg = idx[z[idx] <= 0]
            alpha = np.min(x[neg] / (x[neg] - z[neg]))
            x = x + alpha * (z - x)
            passive &= ~(np.abs(x) <= tol)
            x[~passive] = 0.0
    return x


@dataclass(frozen=True)
class ChargeStateFit:
    w_minus: float
    w_zero: float
    photon_ratio: float
    conc_ratio: float
    nv_minus_frac: float
    overlap_fraction: float = 1.0
    residual_rms: float = 0.0

    def to_dict(self):
        def fin(v):
            return v if math.isfinite(v) else None

        return {
            "w_minus": self.w_minus,
            "w_zero": self.w_zero,
            "photon_ratio": fin(self.photon_ratio),
            "conc_ratio": fin(self.conc_ratio),
            "nv_minus_frac": self.nv_minus_frac,
            "overlap_fraction": self.overlap_fraction,
            "residual_rms": self.residual_rms,
        }


def rate_correction(gamma_minus=GAMMA_MINUS_PER_NS, gamma_zero=GAMMA_ZERO_PER_NS):
    return gamma_minus / gamma_zero


def fraction_from_photon_ratio(photon_ratio, gamma_minus=GAMMA_MINUS_PER_NS, gamma_zero=GAMMA_ZERO_PER_NS):
    conc = photon_ratio * rate_correction(gamma_minus, gamma_zero)
    if math.isinf(conc):
        return conc, 1.0
    return conc, conc / (1.0 + conc)


def photon_ratio_for_fraction(nv_minus_frac, gamma_minus=GAMMA_MINUS_PER_NS, gamma_zero=GAMMA_ZERO_PER_NS):
    """Inverse of :func:`fraction_from_photon_ratio`."""
    if not 0 <= nv_minus_frac < 1:
        raise ValidationError("nv_minus_frac must be in [0, 1)")
    return nv_minus_frac / (1.0 - nv_minus_frac) / rate_correction(gamma_minus, gamma_zero)


def resample(reference, grid):
    """Linear interpolation onto ``grid``; zero outside the reference range."""
    return np.interp(grid, reference.wavelengths_nm, reference.values, left=0.0, right=0.0)


def decompose_pl(spectrum, ref_minus, ref_zero, gamma_minus=GAMMA_MINUS_PER_NS,
                 gamma_zero=GAMMA_ZERO_PER_NS):
    """Fit ``spectrum ≈ w⁻·ref⁻ + w⁰·ref⁰`` with non-negative weights."""
    grid = spectrum.wavelengths_nm
    lo = max(ref_minus.range_nm[0], ref_zero.range_nm[0])
    hi = min(ref_minus.range_nm[1], ref_zero.range_nm[1])
    covered = (grid >= lo) & (grid <= hi)
    if hi <= lo or covered.sum() < 2:
        raise EmptyOverlap("references and spectrum share no common wavelength range")
    overlap = float(covered.mean())

    rm = resample(ref_minus, grid)
    r0 = resample(ref_zero, grid)
    for name, ref in (("NV⁻", rm), ("NV⁰", r0)):
        if np.any(ref < 0):
            raise ValidationError(f"{name} reference has negative values")
        if not np.any(ref > 0):
            raise DegenerateReferences(f"{name} reference is zero on the measurement grid")
    cos = float(rm @ r0) / (np.linalg.norm(rm) * np.linalg.norm(r0))
    if 1.0 - cos < 1e-10:
        raise DegenerateReferences("reference spectra are collinear")

    A = np.column_stack([rm, r0])
    w_minus, w_zero = nnls(A, spectrum.values)
    resid = spectrum.values - A @ np.array([w_minus, w_zero])
    n_minus = w_minus * float(np.trapezoid(rm, grid))
    n_zero = w_zero * float(np.trapezoid(r0, grid))
    if n_minus == 0 and n_zero == 0:
        raise ValidationError("spectrum contains no NV emission")
    photon_ratio = math.inf if n_zero == 0 else n_minus / n_zero
    conc, frac = fraction_from_photon_ratio(photon_ratio, gamma_minus, gamma_zero)
    return ChargeStateFit(
        float(w_minus), float(w_zero), photon_ratio, conc, frac, overlap,
        float(np.sqrt(np.mean(resid**2))),
    )
