import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nvforge import synthetic
from nvforge.errors import BadCalibration, WindowOutOfRange
from nvforge.spectra.bands import (
    Band270Calibration,
    band_strength,
    calibrate_270,
    detect_bands,
    p1_from_270_band,
    subtract_baseline,
)
from nvforge.spectra.core import Spectrum


def _x():
    return synthetic.uvvis_grid()


def test_linear_spectrum_gives_zero():
    x = _x()
    res = subtract_baseline(Spectrum(x, 0.3 + 0.002 * x), (560.0, 600.0))
    assert np.allclose(res.corrected, 0.0, atol=1e-10)
    assert res.strength == pytest.approx(0.0, abs=1e-8)


def test_gaussian_area_on_ramp():
    x = np.arange(300.0, 800.0, 0.5)
    width, height = 6.0, 2.0
    y = 5.0 - 0.004 * x + synthetic.gaussian(x, 637.0, width, height)
    area = band_strength(Spectrum(x, y), (600.0, 675.0))
    assert area == pytest.approx(height * width * math.sqrt(2 * math.pi), rel=0.02)


def test_window_at_edge():
    with pytest.raises(WindowOutOfRange):
        subtract_baseline(Spectrum(_x(), np.ones_like(_x())), (215.0, 240.0))
    with pytest.raises(WindowOutOfRange):
        subtract_baseline(Spectrum(_x(), np.ones_like(_x())), (400.0, 400.0))


def test_flat_spectrum_all_absent():
    report = detect_bands(synthetic.uvvis_spectrum())
    assert not any(b.present for b in report.bands)
    assert not report.over_irradiation_warning


def test_gr1_raises_warning():
    noise = 0.01
    s = synthetic.uvvis_spectrum(bands=((741.0, 4.0, 10 * noise),), noise_sigma=noise,
                                 rng=np.random.default_rng(3))
    report = detect_bands(s)
    assert report["GR1"].present
    assert report.over_irradiation_warning


def test_nd1_triplet():
    s = synthetic.uvvis_spectrum(bands=((375.0, 2.0, 0.3), (384.0, 2.0, 0.3), (393.0, 2.0, 0.5)))
    report = detect_bands(s)
    assert report["ND1"].present
    assert not report["GR1"].present
    assert not report.over_irradiation_warning


def test_uncovered_band_reported():
    x = np.arange(500.0, 800.0)
    report = detect_bands(Spectrum(x, np.ones_like(x)))
    assert not report["P1_270"].covered
    assert not report.complete


@settings(max_examples=25)
@given(st.floats(0.01, 100.0), st.integers(0, 2**31 - 1))
def test_presence_scale_invariant(k, seed):
    s = synthetic.uvvis_spectrum(bands=((741.0, 4.0, 0.05), (393.0, 4.0, 0.02)), ramp=0.5,
                                 noise_sigma=0.005, rng=np.random.default_rng(seed))
    a = [b.present for b in detect_bands(s).bands]
    b = [b.present for b in detect_bands(s.scaled(k)).bands]
    assert a == b


def test_p1_from_270_linearity():
    ref = synthetic.uvvis_spectrum(bands=((270.0, 5.0, 1.0),))
    cal = calibrate_270(ref, 2.2)
    assert p1_from_270_band(ref, cal) == pytest.approx(2.2, rel=1e-12)
    half = synthetic.uvvis_spectrum(bands=((270.0, 5.0, 0.5),))
    assert p1_from_270_band(half, cal) == pytest.approx(1.1, rel=1e-9)
    double = synthetic.uvvis_spectrum(bands=((270.0, 5.0, 2.0),))
    assert p1_from_270_band(double, (cal.reference_strength, cal.reference_p1_ppm)) == pytest.approx(4.4, rel=1e-9)


def test_bad_calibration():
    with pytest.raises(BadCalibration):
        Band270Calibration(0.0, 2.2)
    with pytest.raises(BadCalibration):
        calibrate_270(synthetic.uvvis_spectrum(), 2.2)
