"""Calibrated process model: growth → irradiation/anneal → T₂ and figure of merit.

:func:`default_model` fits the conversion and charge-state curves to the
embedded Table 1 data once per process.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field, replace

from . import coherence, conversion, growth, sensitivity
from .dataset import load_table
from .errors import UncalibratedEnergy, ValidationError
from .irradiation import VacancyYieldTable, _energy_key, fit_conversion_curve
from .state import IrradiationPlan, MaterialState, conversion_ratios, ppb_to_ppm

# Fitted to Nitrogen series #1 of Table 2 (six rows with a printed P1).
TABLE2_GROWTH_LAW = growth.GrowthLaw(0.007519608775875267, 0.6179948812620284)


@dataclass(frozen=True)
class ProcessModel:
    conversion_curves: dict
    charge_state: conversion.ChargeStateCurve
    growth_law: growth.GrowthLaw = TABLE2_GROWTH_LAW
    yield_table: VacancyYieldTable = field(default_factory=VacancyYieldTable)
    coherence: coherence.CoherenceParams = coherence.DEFAULT_COHERENCE
    asgrown_ratio: float = growth.ASGROWN_NV_P1_RATIO
    r_con_limit_pct: float = conversion.R_CON_LIMIT_PCT
    r_re_limit_pct: float = conversion.R_RE_LIMIT_PCT
    bright_minus: float = 1.0
    bright_zero: float = 1.0

    def __post_init__(self):
        object.__setattr__(
            self, "conversion_curves",
            {_energy_key(e): c for e, c in self.conversion_curves.items()},
        )
        for limit in (self.r_con_limit_pct, self.r_re_limit_pct):
            if not 0 < limit < 100:
                raise ValidationError("rule thresholds must be in (0, 100)")

    @property
    def energies(self):
        return tuple(sorted(self.conversion_curves))

    def curve_for(self, energy):
        try:
            return self.conversion_curves[_energy_key(energy)]
        except KeyError:
            raise UncalibratedEnergy(f"no conversion curve calibrated for {energy} MeV") from None

    def with_changes(self, **changes):
        return replace(self, **changes)


def asgrown_state(p1_ppm, model):
    """As-grown inventory: NV⁻ from the fixed NV/P1 ratio, NV⁰ from the charge-state curve.

    The curve is evaluated at the as-grown R_re, which itself depends on the
    NV⁰ share, so a short fixed-point iteration is used.
    """
    nv_minus = growth.asgrown_nv_minus(p1_ppm, model.asgrown_ratio)
    if p1_ppm == 0:
        return MaterialState(p1_ppm=0.0)
    frac = conversion.nv_minus_fraction(100.0 * ppb_to_ppm(nv_minus) / p1_ppm, model.charge_state) / 100.0
    for _ in range(100):
        if frac <= 0:
            raise ValidationError("charge-state curve gives no NV⁻ at the as-grown R_re")
        nv_total = nv_minus / frac
        new = conversion.nv_minus_fraction(100.0 * ppb_to_ppm(nv_total) / p1_ppm, model.charge_state) / 100.0
        if abs(new - frac) < 1e-14:
            break
        frac = new
    return MaterialState(p1_ppm=p1_ppm, nv_minus_ppb=nv_minus, nv_zero_ppb=nv_minus / frac - nv_minus)


def treat(grown, plan, model):
    return conversion.apply_treatment(
        grown, plan, model.curve_for(plan.energy_mev), model.charge_state, model.yield_table
    )


@dataclass(frozen=True)
class Prediction:
    grown: MaterialState
    treated: MaterialState
    plan: IrradiationPlan
    rules: conversion.RuleReport | None
    t2_s: float
    sensitivity_before: sensitivity.SensitivityReport
    sensitivity_after: sensitivity.SensitivityReport
    nc_ratio_ppm: float | None = None

    @property
    def nv_minus_frac_pct(self):
        f = self.treated.nv_minus_fraction
        return None if f is None else 100.0 * f

    def to_dict(self):
        return {
            "nc_ratio_ppm": self.nc_ratio_ppm,
            "plan": {"energy_mev": self.plan.energy_mev, "fluence_e_per_cm2": self.plan.fluence_e_per_cm2},
            "as_grown": self.grown.to_dict(),
            "treated": self.treated.to_dict(),
            "nv_minus_frac_pct": self.nv_minus_frac_pct,
            "ratios_pct": self.rules.r_values.percent() if self.rules else None,
            "rules": self.rules.to_dict() if self.rules else None,
            "t2_us": self.t2_s * 1e6,
            "t2_asgrown_us": self.t2_s * 1e6,
            "sensitivity_asgrown": self.sensitivity_before.to_dict(),
            "sensitivity_treated": self.sensitivity_after.to_dict(),
        }


def _sens(state, t2_s, model, before=None):
    frac = state.nv_minus_fraction
    frac = 0.0 if frac is None else frac
    return sensitivity.sensitivity_report(
        state.nv_minus_ppb, t2_s, frac, before=before,
        bright_minus=model.bright_minus, bright_zero=model.bright_zero,
    )


def predict(p1_ppm=None, energy_mev=2.0, fluence=0.0, model=None, nc_ratio_ppm=None):
    """Forward prediction from P1 (or N/C ratio) and an irradiation plan."""
    model = model or default_model()
    if p1_ppm is None:
        if nc_ratio_ppm is None:
            raise ValidationError("give p1_ppm or nc_ratio_ppm")
        p1_ppm = growth.p1_from_nc(growth.GrowthRecipe(nc_ratio_ppm), model.growth_law)
    grown = asgrown_state(p1_ppm, model)
    plan = IrradiationPlan(energy_mev, fluence)
    treated = treat(grown, plan, model)
    # T2 follows total nitrogen, fixed at growth.
    t2 = coherence.t2_from_p1(grown.p1_ppm, model.coherence)
    rules = None
    if grown.p1_ppm > 0 and treated.p1_ppm > 0:
        rules = conversion.rules_from_ratios(
            conversion_ratios(grown, treated), model.r_con_limit_pct, model.r_re_limit_pct
        )
    before = _sens(grown, t2, model)
    after = _sens(
        treated, t2, model,
        before=(grown.nv_minus_ppb, t2) if grown.nv_minus_ppb > 0 else None,
    )
    return Prediction(grown, treated, plan, rules, t2, before, after, nc_ratio_ppm)


# -- calibration against Table 1 ------------------------------------------------

def implied_nv_total_ppm(record):
    """NV total implied by a Table 1 row: P1_grown · (NV⁻/P1_grown) / (NV⁻/NV)."""
    return record.p1_grown_ppm * record.r_con_minus_pct / record.nv_minus_frac_treated_pct


def fit_table1_curves(records):
    """Per-energy conversion curves fitted to the implied NV totals of ``records``."""
    by_energy = {}
    for rec in records:
        by_energy.setdefault(rec.energy_mev, []).append(rec)
    curves = {}
    for energy, rows in sorted(by_energy.items()):
        p1 = rows[0].p1_grown_ppm
        series = [(r.fluence, implied_nv_total_ppm(r)) for r in rows]
        curves[energy] = fit_conversion_curve(series, p1, energy)
    return curves


def calibrate_charge_state(records, curves, base_model=None, anchors=(conversion.HALF_NEUTRAL_ANCHOR,)):
    """Charge-state curve placed on the model's own R_re axis.

    Measured R_re includes P1 lost to sinks other than NV, which the
    one-P1-per-NV bookkeeping ignores. Each knot is therefore placed at the
    R_re the forward model produces for that row's treatment, paired with
    the measured NV⁻/NV, then made non-increasing.
    """
    base = base_model or ProcessModel(curves, conversion.default_charge_state_curve())
    base = base.with_changes(conversion_curves=curves)
    knots = []
    for rec in records:
        grown = asgrown_state(rec.p1_grown_ppm, base)
        plan = IrradiationPlan(rec.energy_mev, rec.fluence)
        nv_total = max(
            conversion.nv_total_after_anneal(grown.p1_ppm, plan, base.curve_for(rec.energy_mev)),
            ppb_to_ppm(grown.nv_total_ppb),
        )
        created = nv_total - ppb_to_ppm(grown.nv_total_ppb)
        knots.append((100.0 * nv_total / (grown.p1_ppm - created), rec.nv_minus_frac_treated_pct))
    knots.extend(anchors)
    return conversion.monotone(conversion.from_unsorted(knots))


def calibrate_table1(records=None, base_model=None):
    """Fit conversion curves and the charge-state curve to Table 1 rows."""
    records = list(records) if records is not None else load_table("table1")
    curves = fit_table1_curves(records)
    cs = calibrate_charge_state(records, curves, base_model)
    base = base_model or ProcessModel(curves, cs)
    return base.with_changes(conversion_curves=curves, charge_state=cs)


@functools.lru_cache(maxsize=1)
def default_model():
    return calibrate_table1()
