"""Model predictions set against the embedded Table 2 rows."""

from __future__ import annotations

from .dataset import load_table
from .model import default_model, predict
from .sensitivity import improvement_ratio


def measured_improvement(record):
    """(product_ratio, sqrt_factor) from a row's measured NV⁻ and T₂ before and after."""
    return improvement_ratio(
        (record.nv_minus_asgrown_ppb, record.t2_asgrown_us * 1e-6),
        (record.nv_minus_treated_ppb, record.t2_treated_us * 1e-6),
    )


def table2_comparison(model=None):
    """One row per Table 2 sample: measured values next to model predictions.

    Rows with no printed P1 are predicted from N/C through the growth law.
    Rows with no treatment (Nitrogen series #2) get as-grown predictions only.
    """
    model = model or default_model()
    rows = []
    for rec in load_table("table2"):
        treated = rec.fluence is not None
        if rec.p1_grown_ppm is not None:
            pred = predict(rec.p1_grown_ppm, rec.energy_mev or 2.0, rec.fluence or 0.0, model)
        else:
            pred = predict(None, rec.energy_mev or 2.0, rec.fluence or 0.0, model, nc_ratio_ppm=rec.nc_ppm)
        row = {
            "sample_id": rec.sample_id,
            "series": rec.series,
            "nc_ppm": rec.nc_ppm,
            "p1_ppm": rec.p1_grown_ppm,
            "p1_model_ppm": pred.grown.p1_ppm,
            "nv_minus_asgrown_ppb": rec.nv_minus_asgrown_ppb,
            "nv_minus_asgrown_model_ppb": pred.grown.nv_minus_ppb,
            "t2_asgrown_us": rec.t2_asgrown_us,
            "t2_model_us": pred.t2_s * 1e6,
            "nv_minus_treated_ppb": rec.nv_minus_treated_ppb if treated else None,
            "nv_minus_treated_model_ppb": pred.treated.nv_minus_ppb if treated else None,
            "nv_minus_frac_treated_pct": rec.nv_minus_frac_treated_pct if treated else None,
            "nv_minus_frac_model_pct": pred.nv_minus_frac_pct if treated else None,
            "t2_treated_us": rec.t2_treated_us if treated else None,
            "product_ratio_measured": None,
            "sqrt_factor_measured": None,
            "product_ratio_model": pred.sensitivity_after.product_ratio if treated else None,
        }
        if treated and rec.t2_asgrown_us and rec.t2_treated_us:
            row["product_ratio_measured"], row["sqrt_factor_measured"] = measured_improvement(rec)
        rows.append(row)
    return rows
