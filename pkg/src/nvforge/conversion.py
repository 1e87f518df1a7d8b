"""Post-anneal defect inventory and the charge-state design rules.

Charge-state curves map R_re (NV/P1_remain, percent) to NV⁻/NV (percent) by
linear interpolation between knots, clamped at both ends.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .csvio import read_columns
from .dataset import load_table
from .errors import ModelOverrun, ValidationError
from .irradiation import VacancyYieldTable, nv_total_after_anneal, vacancy_concentration
from .state import ConversionRatios, Stage, conversion_ratios, ppb_to_ppm, ppm_to_ppb

# R_re at which half of the NV centres are neutral.
HALF_NEUTRAL_ANCHOR = (35.0, 50.0)

R_CON_LIMIT_PCT = 10.0
R_RE_LIMIT_PCT = 35.0


@dataclass(frozen=True)
class ChargeStateCurve:
    """Knots ``(r_re_percent, nv_minus_frac_percent)``, strictly increasing in r_re.

    Raw measured knots need not be monotone; :func:`monotone` produces the
    calibrated, non-increasing form used by the forward model.
    """

    points: tuple

    def __post_init__(self):
        pts = tuple((float(r), float(f)) for r, f in self.points)
        if len(pts) < 2:
            raise ValidationError("a charge-state curve needs at least 2 points")
        for (r0, _), (r1, _) in zip(pts, pts[1:]):
            if not r1 > r0:
                raise ValidationError("r_re knots must be strictly increasing")
        for r, f in pts:
            if not (math.isfinite(r) and r >= 0):
                raise ValidationError(f"r_re knot {r} must be finite and >= 0")
            if not 0 <= f <= 100:
                raise ValidationError(f"NV⁻/NV knot {f} outside [0, 100]")
        object.__setattr__(self, "points", pts)

    @property
    def r_re(self):
        return np.array([p[0] for p in self.points])

    @property
    def frac(self):
        return np.array([p[1] for p in self.points])

    def is_monotone(self):
        return bool(np.all(np.diff(self.frac) <= 0))

    def to_dict(self):
        return {"points": [list(p) for p in self.points]}


def from_unsorted(pairs):
    """Build a curve from arbitrary pairs; duplicate r_re knots are averaged."""
    grouped = {}
    for r, f in pairs:
        grouped.setdefault(float(r), []).append(float(f))
    return ChargeStateCurve(tuple((r, sum(v) / len(v)) for r, v in sorted(grouped.items())))


def monotone(curve):
    """Running minimum from low to high R_re.

    Keeps the first knot and every knot that already lies at or below all
    earlier ones exactly; a knot that rises above an earlier one is lowered
    to that level.
    """
    return ChargeStateCurve(tuple(zip(curve.r_re, np.minimum.accumulate(curve.frac))))


def table1_knots():
    return [(r.r_re_pct, r.nv_minus_frac_treated_pct) for r in load_table("table1")]


def default_charge_state_curve(monotonize=True):
    """Measured Table-1 knots plus the half-neutral anchor."""
    curve = from_unsorted(table1_knots() + [HALF_NEUTRAL_ANCHOR])
    return monotone(curve) if monotonize else curve


def nv_minus_fraction(r_re_percent, curve=None):
    """NV⁻/NV in percent at the given R_re; clamps outside the knot range."""
    if r_re_percent < 0:
        raise ValidationError("r_re must be >= 0")
    curve = curve or default_charge_state_curve()
    return float(np.interp(r_re_percent, curve.r_re, curve.frac))


def apply_treatment(grown, plan, curve, cs=None, yield_table=None):
    """Irradiate-and-anneal ``grown`` and return the Annealed state.

    Each created NV consumes one P1. NV already present after growth count
    toward the total but did not consume P1 during treatment.
    """
    if grown.stage is not Stage.AS_GROWN:
        raise ValidationError("apply_treatment needs an AsGrown state")
    cs = cs or default_charge_state_curve()
    yield_table = yield_table or VacancyYieldTable()
    vacancies = vacancy_concentration(plan, yield_table)

    grown_nv = ppb_to_ppm(grown.nv_total_ppb)
    nv_total = nv_total_after_anneal(grown.p1_ppm, plan, curve)
    if nv_total <= grown_nv:
        return grown.advance(Stage.ANNEALED, vacancy_ppm=grown.vacancy_ppm + vacancies)
    created = nv_total - grown_nv
    if created >= grown.p1_ppm:
        raise ModelOverrun(
            f"predicted NV {nv_total:.4g} ppm exhausts P1 {grown.p1_ppm:.4g} ppm"
        )
    p1_remain = grown.p1_ppm - created
    r_re = nv_total / p1_remain
    frac = nv_minus_fraction(100.0 * r_re, cs) / 100.0
    nv_minus = nv_total * frac
    return grown.advance(
        Stage.ANNEALED,
        p1_ppm=p1_remain,
        nv_minus_ppb=ppm_to_ppb(nv_minus),
        nv_zero_ppb=ppm_to_ppb(nv_total - nv_minus),
        vacancy_ppm=max(0.0, grown.vacancy_ppm + vacancies - created),
    )


@dataclass(frozen=True)
class RuleReport:
    charge_stable: bool
    nv_minus_dominant: bool
    r_values: ConversionRatios
    r_con_limit_pct: float = R_CON_LIMIT_PCT
    r_re_limit_pct: float = R_RE_LIMIT_PCT

    def to_dict(self):
        return {
            "charge_stable": self.charge_stable,
            "nv_minus_dominant": self.nv_minus_dominant,
            "r_values_pct": self.r_values.percent(),
            "r_con_limit_pct": self.r_con_limit_pct,
            "r_re_limit_pct": self.r_re_limit_pct,
        }


def rules_from_ratios(ratios, r_con_limit_pct=R_CON_LIMIT_PCT, r_re_limit_pct=R_RE_LIMIT_PCT):
    return RuleReport(
        charge_stable=100.0 * ratios.r_con < r_con_limit_pct,
        nv_minus_dominant=100.0 * ratios.r_re < r_re_limit_pct,
        r_values=ratios,
        r_con_limit_pct=r_con_limit_pct,
        r_re_limit_pct=r_re_limit_pct,
    )


def check_rules(grown, treated, r_con_limit_pct=R_CON_LIMIT_PCT, r_re_limit_pct=R_RE_LIMIT_PCT):
    """Charge-stability (R_con) and NV⁻-dominance (R_re) flags."""
    return rules_from_ratios(conversion_ratios(grown, treated), r_con_limit_pct, r_re_limit_pct)


def read_charge_state_curve(text, monotonize=False):
    """Load ``r_re_percent,nv_minus_frac_percent`` CSV text."""
    rows = read_columns(text, ("r_re_percent", "nv_minus_frac_percent"))
    curve = from_unsorted(rows)
    return monotone(curve) if monotonize else curve
