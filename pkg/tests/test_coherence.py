import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from nvforge.coherence import (
    CoherenceParams,
    b_rate_from_khz,
    nitrogen_from_p1,
    nitrogen_from_t2,
    t2_from_nitrogen,
    t2_from_p1,
)
from nvforge.errors import OutOfRange, ValidationError
from nvforge.model import asgrown_state, treat
from nvforge.state import IrradiationPlan


def test_defaults():
    p = CoherenceParams()
    assert p.b_rate == 2 * math.pi * 1000
    assert p.t2_other_s == 694e-6 and p.p1_fraction == 0.75
    assert b_rate_from_khz(1.0) == p.b_rate


def test_examples():
    assert t2_from_nitrogen(0.0) == 694e-6
    n = nitrogen_from_p1(2.6)
    assert n == pytest.approx(3.4667, abs=1e-4)
    assert t2_from_nitrogen(n) * 1e6 == pytest.approx(43.1, abs=0.05)
    assert t2_from_nitrogen(1e6) < 1e-9


def test_inverse_examples():
    assert nitrogen_from_t2(694e-6) == 0.0
    n = nitrogen_from_t2(101.3e-6)
    oracle = (1 / 101.3e-6 - 1 / 694e-6) / (2 * math.pi * 1000)
    assert n == pytest.approx(oracle, rel=1e-12)
    assert n == pytest.approx(1.34, abs=0.01)
    # compare NDT-34: P1 0.8 ppm at fraction 0.75
    assert nitrogen_from_p1(0.8) == pytest.approx(1.0667, abs=1e-4)


def test_out_of_range():
    with pytest.raises(OutOfRange):
        nitrogen_from_t2(700e-6)
    nitrogen_from_t2(497.7e-6)  # NDT-26 is representable


def test_p1_bridge():
    assert nitrogen_from_p1(0.0) == 0.0
    assert nitrogen_from_p1(0.75) == pytest.approx(1.0)
    assert nitrogen_from_p1(1.0, p1_fraction=0.5) == 2.0
    with pytest.raises(ValidationError):
        nitrogen_from_p1(1.0, p1_fraction=0.0)


@pytest.mark.parametrize("kwargs", [dict(b_rate=0), dict(t2_other_s=0), dict(p1_fraction=0), dict(p1_fraction=1.2)])
def test_param_invariants(kwargs):
    with pytest.raises(ValidationError):
        CoherenceParams(**kwargs)


@pytest.mark.parametrize("x", [0.1, 1.0, 10.0])
def test_round_trip(x):
    assert nitrogen_from_t2(t2_from_nitrogen(x)) == pytest.approx(x, rel=1e-9)


@given(st.floats(0, 1e4), st.floats(1e-6, 1e4))
def test_strictly_decreasing(n, dn):
    assert t2_from_nitrogen(n + dn) < t2_from_nitrogen(n)


@given(st.floats(1e-6, 690e-6), st.floats(1e-7, 3e-6))
def test_inverse_decreasing(t2, dt):
    assert nitrogen_from_t2(t2 + dt) < nitrogen_from_t2(t2)


@given(st.floats(0.05, 20), st.sampled_from([1.0, 2.0]), st.floats(1e15, 1e18))
def test_t2_invariant_under_treatment(model, p1, energy, phi):
    grown = asgrown_state(p1, model)
    before = t2_from_p1(grown.p1_ppm, model.coherence)
    treat(grown, IrradiationPlan(energy, phi), model)
    from nvforge.model import predict

    assert predict(p1, energy, phi, model).t2_s == before
