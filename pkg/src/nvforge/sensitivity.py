"""Shot-noise figure of merit ``C * sqrt(NV⁻ * T2)`` and improvement ratios.

Sensitivity scales as the inverse of the figure of merit. No absolute
prefactor exists, so everything here is relative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ValidationError, ZeroDenominator


@dataclass(frozen=True)
class SensitivityReport:
    fom: float
    contrast_factor: float
    product_ratio: float | None = None
    sqrt_factor: float | None = None

    def to_dict(self):
        return {
            "fom": self.fom,
            "contrast_factor": self.contrast_factor,
            "product_ratio": self.product_ratio,
            "sqrt_factor": self.sqrt_factor,
        }


def figure_of_merit(nv_minus_ppb, t2_s, contrast_factor):
    for name, v in (("nv_minus_ppb", nv_minus_ppb), ("t2_s", t2_s), ("contrast_factor", contrast_factor)):
        if v < 0:
            raise ValidationError(f"{name} must be >= 0")
    return contrast_factor * math.sqrt(nv_minus_ppb * t2_s)


def contrast_factor(nv_minus_frac, bright_minus=1.0, bright_zero=1.0):
    """Share of detected photons that come from NV⁻.

    With equal brightness weights this is just the NV⁻ fraction.
    """
    if not 0 <= nv_minus_frac <= 1:
        raise ValidationError("nv_minus_frac must be in [0, 1]")
    if bright_minus <= 0 or bright_zero <= 0:
        raise ValidationError("brightness weights must be > 0")
    num = nv_minus_frac * bright_minus
    return num / (num + (1.0 - nv_minus_frac) * bright_zero)


def improvement_ratio(before, after):
    """``(product_ratio, sqrt_factor)`` for (NV⁻, T₂) pairs before and after treatment."""
    product_before = before[0] * before[1]
    if product_before <= 0:
        raise ZeroDenominator("NV⁻·T2 product before treatment must be > 0")
    ratio = (after[0] * after[1]) / product_before
    return ratio, math.sqrt(ratio)


def sensitivity_report(nv_minus_ppb, t2_s, nv_minus_frac, before=None, **weights):
    c = contrast_factor(nv_minus_frac, **weights)
    report = SensitivityReport(figure_of_merit(nv_minus_ppb, t2_s, c), c)
    if before is not None:
        ratio, sq = improvement_ratio(before, (nv_minus_ppb, t2_s))
        report = SensitivityReport(report.fom, c, ratio, sq)
    return report
