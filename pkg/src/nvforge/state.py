"""Defect inventory of a diamond sample and the ratios derived from it.

Concentrations are atomic fractions: P1 and vacancies in ppm, NV centres in
ppb. ``CARBON_DENSITY_CM3`` converts them to volume densities; every
conversion function takes an explicit ``carbon_density`` so the value can be
overridden from a run configuration.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field, replace

from .errors import ValidationError, ZeroDenominator

CARBON_DENSITY_CM3 = 1.76e23

PPB_PER_PPM = 1000.0


def ppm_to_ppb(x):
    return x * PPB_PER_PPM


def ppb_to_ppm(x):
    return x / PPB_PER_PPM


def ppb_to_cm3(x, carbon_density=CARBON_DENSITY_CM3):
    return x * 1e-9 * carbon_density


def cm3_to_ppb(x, carbon_density=CARBON_DENSITY_CM3):
    return x / carbon_density * 1e9


def ppm_to_cm3(x, carbon_density=CARBON_DENSITY_CM3):
    return x * 1e-6 * carbon_density


def cm3_to_ppm(x, carbon_density=CARBON_DENSITY_CM3):
    return x / carbon_density * 1e6


class Stage(str, enum.Enum):
    AS_GROWN = "AsGrown"
    IRRADIATED = "Irradiated"
    ANNEALED = "Annealed"

    @property
    def order(self):
        return _STAGE_ORDER[self]

    def can_advance_to(self, other):
        return other.order == self.order + 1


_STAGE_ORDER = {Stage.AS_GROWN: 0, Stage.IRRADIATED: 1, Stage.ANNEALED: 2}


def _check_concentration(name, value):
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise ValidationError(f"{name} must be a number, got {value!r}")
    if not math.isfinite(value) or value < 0:
        raise ValidationError(f"{name} must be finite and >= 0, got {value!r}")


@dataclass(frozen=True)
class MaterialState:
    """Defect inventory of one diamond at one processing stage."""

    p1_ppm: float
    nv_minus_ppb: float = 0.0
    nv_zero_ppb: float = 0.0
    vacancy_ppm: float = 0.0
    stage: Stage = Stage.AS_GROWN

    def __post_init__(self):
        for name in ("p1_ppm", "nv_minus_ppb", "nv_zero_ppb", "vacancy_ppm"):
            _check_concentration(name, getattr(self, name))
        object.__setattr__(self, "stage", Stage(self.stage))

    @property
    def nv_total_ppb(self):
        return self.nv_minus_ppb + self.nv_zero_ppb

    @property
    def nv_minus_fraction(self):
        """NV⁻/NV as a fraction, or ``None`` when there are no NV centres."""
        total = self.nv_total_ppb
        return self.nv_minus_ppb / total if total > 0 else None

    def advance(self, stage, **changes):
        """Return a copy at a later processing stage.

        Only single steps AsGrown→Irradiated→Annealed are allowed, except that
        AsGrown→Annealed is accepted as the combined irradiate-and-anneal
        treatment.
        """
        stage = Stage(stage)
        combined = self.stage is Stage.AS_GROWN and stage is Stage.ANNEALED
        if not (self.stage.can_advance_to(stage) or combined):
            raise ValidationError(f"cannot go from {self.stage.value} to {stage.value}")
        return replace(self, stage=stage, **changes)

    def to_dict(self):
        return {
            "p1_ppm": self.p1_ppm,
            "nv_minus_ppb": self.nv_minus_ppb,
            "nv_zero_ppb": self.nv_zero_ppb,
            "vacancy_ppm": self.vacancy_ppm,
            "stage": self.stage.value,
        }

    @classmethod
    def from_dict(cls, data):
        expected = {"p1_ppm", "nv_minus_ppb", "nv_zero_ppb", "vacancy_ppm", "stage"}
        unknown = set(data) - expected
        if unknown:
            raise ValidationError(f"unknown MaterialState fields: {sorted(unknown)}")
        return cls(**data)

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class IrradiationPlan:
    energy_mev: float
    fluence_e_per_cm2: float

    def __post_init__(self):
        _check_concentration("fluence_e_per_cm2", self.fluence_e_per_cm2)
        if not (self.energy_mev > 0):
            raise ValidationError(f"energy_mev must be > 0, got {self.energy_mev!r}")


@dataclass(frozen=True)
class ConversionRatios:
    """Conversion ratios as plain fractions (multiply by 100 for percent).

    r_re = NV/P1_remain, r_con = NV/P1_grown, r_con_minus = NV⁻/P1_grown.
    """

    r_re: float
    r_con: float
    r_con_minus: float

    def __post_init__(self):
        for name in ("r_re", "r_con", "r_con_minus"):
            _check_concentration(name, getattr(self, name))

    def percent(self):
        return {k: 100.0 * v for k, v in self.to_dict().items()}

    def to_dict(self):
        return {"r_re": self.r_re, "r_con": self.r_con, "r_con_minus": self.r_con_minus}


def conversion_ratios(grown, treated):
    """Ratios of a treated sample relative to its as-grown state."""
    if grown.stage is not Stage.AS_GROWN:
        raise ValidationError("grown state must have stage AsGrown")
    if treated.stage is not Stage.ANNEALED:
        raise ValidationError("treated state must have stage Annealed")
    if grown.p1_ppm == 0 or treated.p1_ppm == 0:
        raise ZeroDenominator("P1 concentration is zero")
    nv_total = ppb_to_ppm(treated.nv_total_ppb)
    nv_minus = ppb_to_ppm(treated.nv_minus_ppb)
    return ConversionRatios(
        r_re=nv_total / treated.p1_ppm,
        r_con=nv_total / grown.p1_ppm,
        r_con_minus=nv_minus / grown.p1_ppm,
    )
