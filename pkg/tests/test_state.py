import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from nvforge.errors import ValidationError, ZeroDenominator
from nvforge.state import (
    CARBON_DENSITY_CM3,
    ConversionRatios,
    IrradiationPlan,
    MaterialState,
    Stage,
    cm3_to_ppb,
    cm3_to_ppm,
    conversion_ratios,
    ppb_to_cm3,
    ppb_to_ppm,
    ppm_to_cm3,
    ppm_to_ppb,
)


def test_nv_total_is_exact_sum():
    s = MaterialState(1.0, nv_minus_ppb=0.1, nv_zero_ppb=0.2)
    assert s.nv_total_ppb == 0.1 + 0.2


@pytest.mark.parametrize("field", ["p1_ppm", "nv_minus_ppb", "nv_zero_ppb", "vacancy_ppm"])
def test_negative_concentration_rejected(field):
    kwargs = {"p1_ppm": 1.0, field: -1e-9}
    with pytest.raises(ValidationError):
        MaterialState(**kwargs)


def test_nan_rejected():
    with pytest.raises(ValidationError):
        MaterialState(float("nan"))


def test_stage_transitions():
    s = MaterialState(1.0)
    irr = s.advance(Stage.IRRADIATED, vacancy_ppm=1.1)
    ann = irr.advance("Annealed")
    assert ann.stage is Stage.ANNEALED and ann.vacancy_ppm == 1.1
    assert s.advance(Stage.ANNEALED).stage is Stage.ANNEALED
    with pytest.raises(ValidationError):
        ann.advance(Stage.IRRADIATED)
    with pytest.raises(ValidationError):
        irr.advance(Stage.AS_GROWN)


def test_json_field_names_and_round_trip():
    s = MaterialState(2.2, 5.5, 0.9, 0.1, Stage.ANNEALED)
    d = json.loads(s.to_json())
    assert set(d) == {"p1_ppm", "nv_minus_ppb", "nv_zero_ppb", "vacancy_ppm", "stage"}
    assert d["stage"] == "Annealed"
    assert MaterialState.from_json(s.to_json()) == s


def test_from_dict_rejects_unknown_fields():
    with pytest.raises(ValidationError):
        MaterialState.from_dict({"p1_ppm": 1.0, "colour": "blue"})


def test_plan_rejects_negative_fluence():
    with pytest.raises(ValidationError):
        IrradiationPlan(2.0, -1.0)


def _pair(p1_grown, p1_treated, nv_minus_ppb, nv_zero_ppb):
    g = MaterialState(p1_grown)
    t = MaterialState(p1_treated, nv_minus_ppb, nv_zero_ppb, stage=Stage.ANNEALED)
    return g, t


def test_ratios_direct_arithmetic():
    g, t = _pair(1.0, 0.9, 90.0, 0.0)
    r = conversion_ratios(g, t)
    assert r.r_re == pytest.approx(0.10, rel=1e-12)
    assert r.r_con == pytest.approx(0.09, rel=1e-12)
    assert r.r_con_minus == pytest.approx(0.09, rel=1e-12)


def test_ratios_zero_nv():
    g, t = _pair(1.0, 1.0, 0.0, 0.0)
    r = conversion_ratios(g, t)
    assert (r.r_re, r.r_con, r.r_con_minus) == (0.0, 0.0, 0.0)


def test_ratios_table1_row_i2_04():
    # NV⁻/P1_grown = 5.1 % and NV⁻/NV = 82.4 % imply NV/P1_grown ≈ 6.2 %
    p1 = 2.2
    nv_minus = 0.051 * p1
    nv_total = nv_minus / 0.824
    g, t = _pair(p1, p1 - nv_total, nv_minus * 1000, (nv_total - nv_minus) * 1000)
    r = conversion_ratios(g, t)
    assert 100 * r.r_con == pytest.approx(6.19, abs=0.01)
    assert 100 * r.r_con_minus == pytest.approx(5.1, abs=1e-9)
    assert r.r_con < r.r_re


def test_ratios_zero_denominator():
    g, t = _pair(1.0, 0.0, 1.0, 0.0)
    with pytest.raises(ZeroDenominator):
        conversion_ratios(g, t)
    with pytest.raises(ZeroDenominator):
        conversion_ratios(MaterialState(0.0), MaterialState(1.0, stage=Stage.ANNEALED))


def test_ratios_stage_precondition():
    with pytest.raises(ValidationError):
        conversion_ratios(MaterialState(1.0), MaterialState(1.0))


def test_ratios_percent_view():
    r = ConversionRatios(0.1, 0.09, 0.05)
    assert r.percent() == pytest.approx({"r_re": 10.0, "r_con": 9.0, "r_con_minus": 5.0})


def test_carbon_density_constant():
    assert ppb_to_cm3(1.0) == pytest.approx(1.76e14, rel=1e-15)
    assert CARBON_DENSITY_CM3 == 1.76e23


@given(st.floats(min_value=1e-6, max_value=1e6))
def test_unit_round_trips(x):
    assert ppb_to_ppm(ppm_to_ppb(x)) == pytest.approx(x, rel=1e-12)
    assert cm3_to_ppb(ppb_to_cm3(x)) == pytest.approx(x, rel=1e-12)
    assert cm3_to_ppm(ppm_to_cm3(x)) == pytest.approx(x, rel=1e-12)
    assert cm3_to_ppm(ppb_to_cm3(ppm_to_ppb(x))) == pytest.approx(x, rel=1e-12)
