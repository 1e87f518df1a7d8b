import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from nvforge.dataset import load_table
from nvforge.errors import EnergyMismatch, InsufficientData, UnknownEnergy, ValidationError
from nvforge.irradiation import (
    ConversionCurve,
    VacancyYieldTable,
    curve_sse,
    fit_conversion_curve,
    nv_total_after_anneal,
    read_series,
    vacancy_concentration,
)
from nvforge.model import fit_table1_curves, implied_nv_total_ppm
from nvforge.state import IrradiationPlan


def test_vacancy_examples():
    assert vacancy_concentration(IrradiationPlan(2.0, 1e17)) == pytest.approx(1.1, rel=1e-12)
    assert vacancy_concentration(IrradiationPlan(1.0, 3e18)) == pytest.approx(27.0, abs=1e-9)
    assert vacancy_concentration(IrradiationPlan(1.0, 0.0)) == 0.0


def test_unknown_energy():
    with pytest.raises(UnknownEnergy):
        vacancy_concentration(IrradiationPlan(3.0, 1e17))


def test_yield_table_validation():
    with pytest.raises(ValidationError):
        VacancyYieldTable({2.0: 0.0})
    assert 2.0 in VacancyYieldTable() and 1.5 not in VacancyYieldTable()


@given(st.sampled_from([1.0, 2.0]), st.one_of(st.just(0.0), st.floats(1.0, 1e19)))
def test_vacancy_linear(energy, phi):
    assert vacancy_concentration(IrradiationPlan(energy, 2 * phi)) == pytest.approx(
        2 * vacancy_concentration(IrradiationPlan(energy, phi)), rel=1e-12
    )


CURVE = ConversionCurve(2.0, 0.2, 3e17)


def test_curve_limits():
    assert nv_total_after_anneal(2.2, IrradiationPlan(2.0, 0.0), CURVE) == 0.0
    far = nv_total_after_anneal(2.2, IrradiationPlan(2.0, 50 * 3e17), CURVE)
    assert far == pytest.approx(2.2 * 0.2, rel=1e-9)


def test_curve_energy_mismatch():
    with pytest.raises(EnergyMismatch):
        nv_total_after_anneal(2.2, IrradiationPlan(1.0, 1e17), CURVE)


@pytest.mark.parametrize("kwargs", [dict(nv_max_frac=0.0), dict(nv_max_frac=1.1), dict(phi0=0.0)])
def test_curve_invariants(kwargs):
    base = dict(energy_mev=2.0, nv_max_frac=0.2, phi0=3e17)
    with pytest.raises(ValidationError):
        ConversionCurve(**{**base, **kwargs})


def test_fit_exact_recovery():
    series = [(f, nv_total_after_anneal(2.2, IrradiationPlan(2.0, f), CURVE)) for f in (1e16, 1e17, 5e17, 1e18, 3e18)]
    fit = fit_conversion_curve(series, 2.2, 2.0)
    assert fit.nv_max_frac == pytest.approx(0.2, rel=1e-6)
    assert fit.phi0 == pytest.approx(3e17, rel=1e-6)


def test_fit_needs_three_points():
    with pytest.raises(InsufficientData):
        fit_conversion_curve([(1e17, 0.1), (1e18, 0.2)], 2.2, 2.0)


def test_fit_rejects_bad_fluences():
    with pytest.raises(ValidationError):
        fit_conversion_curve([(1e17, 0.1), (1e17, 0.2), (1e18, 0.3)], 2.2, 2.0)
    with pytest.raises(ValidationError):
        fit_conversion_curve([(0.0, 0.0), (1e17, 0.2), (1e18, 0.3)], 2.2, 2.0)


def _series(energy):
    rows = [r for r in load_table("table1") if r.energy_mev == energy]
    return [(r.fluence, implied_nv_total_ppm(r)) for r in rows]


def _grid_oracle(series, p1):
    """Coarse 2-D SSE scan over nv_max_frac ∈ (0, 1] and log-spaced phi0 ∈ [1e15, 1e19]."""
    phi = np.array([f for f, _ in series])
    nv = np.array([n for _, n in series])
    m = np.linspace(0.005, 1.0, 200)[:, None, None]
    phi0 = np.geomspace(1e15, 1e19, 400)[None, :, None]
    pred = p1 * m * (1 - np.exp(-phi[None, None, :] / phi0))
    sse = ((pred - nv) ** 2).sum(axis=2)
    i, j = np.unravel_index(np.argmin(sse), sse.shape)
    return float(sse[i, j]), float(m[i, 0, 0]), float(phi0[0, j, 0])


@pytest.mark.parametrize("energy", [2.0, 1.0])
def test_table1_fit_at_least_as_good_as_grid_oracle(energy):
    series = _series(energy)
    curve = fit_table1_curves(load_table("table1"))[energy]
    best_sse, m, phi0 = _grid_oracle(series, 2.2)
    assert curve_sse(curve, series, 2.2) <= best_sse
    assert curve.nv_max_frac == pytest.approx(m, rel=0.05)
    assert curve.phi0 == pytest.approx(phi0, rel=0.05)


def test_table1_fit_reproduces_i2_04_total(model):
    implied = 2.2 * 0.051 / 0.824
    assert implied == pytest.approx(0.136, abs=0.001)
    got = nv_total_after_anneal(2.2, IrradiationPlan(2.0, 1e17), model.curve_for(2.0))
    assert got == pytest.approx(implied, rel=0.15)


def test_p1_scaling_of_phi0():
    c = ConversionCurve(2.0, 0.2, 3e17, reference_p1_ppm=2.2, fluence_range=(1e16, 1e18))
    assert c.effective_phi0(4.4) == pytest.approx(6e17)
    assert c.calibrated_range(1.1) == pytest.approx((5e15, 5e17))
    # the low-fluence slope stays vacancy limited, independent of P1
    lo = [nv_total_after_anneal(p, IrradiationPlan(2.0, 1e14), c) for p in (1.1, 2.2, 4.4)]
    assert lo == pytest.approx([lo[0]] * 3, rel=1e-3)


@given(st.floats(0.01, 50.0), st.floats(0, 1e20))
def test_nv_total_bounded_by_p1(p1, phi):
    assert nv_total_after_anneal(p1, IrradiationPlan(2.0, phi), CURVE) <= p1


@given(st.floats(0.01, 50.0), st.floats(1e14, 1e19), st.floats(1.01, 10.0))
def test_nv_total_increasing(p1, phi, k):
    a = nv_total_after_anneal(p1, IrradiationPlan(2.0, phi), CURVE)
    b = nv_total_after_anneal(p1, IrradiationPlan(2.0, phi * k), CURVE)
    assert b >= a


def test_read_series():
    rows = read_series("fluence_e_per_cm2,nv_total_ppm\n1e17,0.13\n\n1e18,0.3\n")
    assert rows == [(1e17, 0.13), (1e18, 0.3)]
