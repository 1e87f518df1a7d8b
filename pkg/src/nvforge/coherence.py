"""Hahn-echo T₂ as a function of total nitrogen content.

``1/T2 = b_rate * [N] + 1/t2_other`` with ``b_rate`` in angular units
(rad s⁻¹ per ppm). T₂ depends on total nitrogen only, so irradiation and
annealing, which convert P1 into NV without removing nitrogen, leave it
unchanged.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import OutOfRange, ValidationError

DEFAULT_B_RATE_KHZ_PER_PPM = 1.0
DEFAULT_T2_OTHER_US = 694.0
DEFAULT_P1_FRACTION = 0.75


def b_rate_from_khz(khz_per_ppm):
    """Convert a decoherence rate quoted as 2π × kHz/ppm to rad s⁻¹ per ppm."""
    return 2.0 * math.pi * 1e3 * khz_per_ppm


@dataclass(frozen=True)
class CoherenceParams:
    b_rate: float = b_rate_from_khz(DEFAULT_B_RATE_KHZ_PER_PPM)
    t2_other_s: float = DEFAULT_T2_OTHER_US * 1e-6
    p1_fraction: float = DEFAULT_P1_FRACTION

    def __post_init__(self):
        if not self.b_rate > 0:
            raise ValidationError("b_rate must be > 0")
        if not self.t2_other_s > 0:
            raise ValidationError("t2_other_s must be > 0")
        if not 0 < self.p1_fraction <= 1:
            raise ValidationError("p1_fraction must be in (0, 1]")

    def to_dict(self):
        return {
            "b_rate": self.b_rate,
            "t2_other_s": self.t2_other_s,
            "p1_fraction": self.p1_fraction,
        }


DEFAULT_COHERENCE = CoherenceParams()


def t2_from_nitrogen(n_ppm, params=DEFAULT_COHERENCE):
    if n_ppm < 0:
        raise ValidationError("nitrogen concentration must be >= 0")
    return 1.0 / (params.b_rate * n_ppm + 1.0 / params.t2_other_s)


def nitrogen_from_t2(t2_s, params=DEFAULT_COHERENCE):
    if not t2_s > 0:
        raise ValidationError("T2 must be > 0")
    if t2_s > params.t2_other_s:
        raise OutOfRange(
            f"T2 = {t2_s * 1e6:.4g} us exceeds t2_other = {params.t2_other_s * 1e6:.4g} us"
        )
    return max(0.0, (1.0 / t2_s - 1.0 / params.t2_other_s) / params.b_rate)


def nitrogen_from_p1(p1_ppm, params=DEFAULT_COHERENCE, p1_fraction=None):
    """Total nitrogen implied by a P1 concentration; ``p1_fraction`` overrides per call."""
    if p1_ppm < 0:
        raise ValidationError("p1_ppm must be >= 0")
    fraction = params.p1_fraction if p1_fraction is None else p1_fraction
    if not 0 < fraction <= 1:
        raise ValidationError("p1_fraction must be in (0, 1]")
    return p1_ppm / fraction


def t2_from_p1(p1_ppm, params=DEFAULT_COHERENCE):
    return t2_from_nitrogen(nitrogen_from_p1(p1_ppm, params), params)
