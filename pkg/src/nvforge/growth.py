"""As-grown P1 and NV⁻ concentrations as a function of the plasma N/C ratio."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .csvio import read_columns
from .errors import DegenerateData, InsufficientData, ValidationError

ASGROWN_NV_P1_RATIO = 0.0025


@dataclass(frozen=True)
class GrowthLaw:
    """Sublinear power law ``p1_ppm = coefficient_a * nc_ppm ** exponent_b``."""

    coefficient_a: float = 0.09
    exponent_b: float = 0.5

    def __post_init__(self):
        if not self.coefficient_a > 0:
            raise ValidationError("coefficient_a must be > 0")
        if not 0 < self.exponent_b < 1:
            raise ValidationError("exponent_b must be in (0, 1)")

    def to_dict(self):
        return {"coefficient_a": self.coefficient_a, "exponent_b": self.exponent_b}


DEFAULT_GROWTH_LAW = GrowthLaw()


@dataclass(frozen=True)
class GrowthRecipe:
    nc_ratio_ppm: float

    def __post_init__(self):
        if not (math.isfinite(self.nc_ratio_ppm) and self.nc_ratio_ppm >= 0):
            raise ValidationError("nc_ratio_ppm must be finite and >= 0")


def p1_from_nc(recipe, law=DEFAULT_GROWTH_LAW):
    nc = recipe.nc_ratio_ppm if isinstance(recipe, GrowthRecipe) else GrowthRecipe(recipe).nc_ratio_ppm
    if nc == 0:
        return 0.0
    return law.coefficient_a * nc ** law.exponent_b


def fit_growth_law(points):
    """Ordinary least squares of log(p1) on log(nc).

    Raises ``ValidationError`` if the fitted exponent is not sublinear.
    """
    pts = [(float(nc), float(p1)) for nc, p1 in points]
    if len(pts) < 2:
        raise InsufficientData("need at least 2 (nc, p1) points")
    if any(nc <= 0 or p1 <= 0 for nc, p1 in pts):
        raise ValidationError("nc and p1 must be > 0 for a log-log fit")
    x = np.log([nc for nc, _ in pts])
    y = np.log([p1 for _, p1 in pts])
    if np.ptp(x) == 0:
        raise DegenerateData("all N/C values are equal")
    design = np.column_stack([np.ones_like(x), x])
    (log_a, b), *_ = np.linalg.lstsq(design, y, rcond=None)
    return GrowthLaw(float(np.exp(log_a)), float(b))


def asgrown_nv_minus(p1_ppm, ratio=ASGROWN_NV_P1_RATIO):
    """As-grown NV⁻ in ppb from P1 in ppm and a fixed NV/P1 ratio."""
    if p1_ppm < 0:
        raise ValidationError("p1_ppm must be >= 0")
    if not 0 < ratio < 1:
        raise ValidationError("ratio must be in (0, 1)")
    return p1_ppm * ratio * 1000.0


def read_growth_points(text):
    """Parse ``nc_ppm,p1_ppm`` CSV text into a list of point tuples."""
    return read_columns(text, ("nc_ppm", "p1_ppm"))
